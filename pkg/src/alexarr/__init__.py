"""Alexander invariants and Chen ranks of complex line arrangement groups."""

from pathlib import Path

DATA_DIR = Path(__file__).resolve().parent / "data"

__version__ = "0.1.0"
