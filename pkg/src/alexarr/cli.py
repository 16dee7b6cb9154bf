"""The ``chen`` command: from arrangement, lattice, monodromy or presentation files to Chen ranks.

Exit status is 0 on success, 1 when ``--verify`` finds a disagreement and
2 for unreadable input or violated preconditions.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from math import comb
from pathlib import Path

from .alexinv import Presentation, presentation_completed_reduced, presentation_general, presentation_real
from .braidrep import parse_monodromy
from .chenranks import chen_ranks, chen_ranks_oracle
from .geomingest import CentralArrangement3, lattice2, parse_arrangement, real_monodromy
from .koszul import label
from .localcc import Lattice2, cone_lattice, decomposes, parse_lattice, theta_cc

PIPELINES = ("general", "real", "reduced")


@dataclass
class JobSpec:
    kind: str  # arrangement | lattice | monodromy | presentation
    path: str
    central: bool = False
    decone: int | None = None
    K: int = 8
    truncate: int | None = None
    pipeline: str | None = None
    verify: bool = False
    json_path: str | None = None
    write_presentation: str | None = None

    def __post_init__(self):
        if self.kind not in ("arrangement", "lattice", "monodromy", "presentation"):
            raise ValueError(f"unknown input kind {self.kind!r}")
        if self.K < 2:
            raise ValueError("K must be at least 2")
        if self.pipeline is not None and self.pipeline not in PIPELINES:
            raise ValueError(f"unknown pipeline {self.pipeline!r}")


class Report:
    """Accumulates the structured report and the AGREE/MISMATCH checks."""

    def __init__(self, job: JobSpec):
        self.data: dict = {"input": {"kind": job.kind, "path": job.path}}
        self.checks: list = []

    def check(self, name: str, k, left: int, right: int):
        self.checks.append({"check": name, "k": k, "left": left, "right": right, "agree": left == right})

    @property
    def ok(self) -> bool:
        return all(c["agree"] for c in self.checks)

    def as_dict(self) -> dict:
        out = dict(self.data)
        if self.checks:
            out["checks"] = self.checks
            out["verified"] = self.ok
        return out


# -- stages ---------------------------------------------------------------------------

def _set(V) -> str:
    return "{" + ",".join(map(str, V)) + "}"


def _lattice_section(rep: Report, lat: Lattice2):
    lat.check_partition()
    dec = decomposes(lat)
    rep.data["lattice"] = {
        "n": lat.n,
        "b2": lat.b2,
        "vertex_sets": [list(V) for V in lat.vertex_sets],
        "multiplicities": {str(k): v for k, v in lat.multiplicities().items()},
    }
    rep.data["psi3"] = {
        "source_dim": comb(lat.n, 3),
        "target_dim": dec.target_dim,
        "rank": dec.rank,
        "coker_free_rank": dec.coker.free_rank,
        "coker_torsion": dec.coker.torsion,
        "coker_basis": [
            [[_set(V), label(J), c] for (V, J), c in vec.items()] for vec in dec.coker_basis_labeled()
        ],
    }
    rep.data["decomposable"] = dec.decomposable
    rep.data["theta3_lattice"] = dec.coker.free_rank + theta_cc(lat, 3)
    return dec


def _presentation_info(p: Presentation) -> dict:
    return {"relations": p.num_relations, "generators": p.num_generators, "ring": p.ring, "variables": p.n}


def _monodromy_presentations(twists, n: int, names, D: int) -> dict:
    out = {}
    for name in names:
        if name == "general":
            out[name] = presentation_general(twists, n)
        elif name == "real":
            out[name] = presentation_real(twists, n)
        else:
            out[name] = presentation_completed_reduced(twists, n, D)
    return out


def run(job: JobSpec) -> Report:
    """Carry out the job and return the report (no printing)."""
    rep = Report(job)
    text = Path(job.path).read_text()
    K = job.K
    D = job.truncate if job.truncate is not None else K - 2
    if D < K - 2:
        raise ValueError(f"truncation degree {D} cannot give Chen ranks up to k = {K} (need at least {K - 2})")
    lat = None
    presentations: dict = {}
    theta1 = None

    if job.kind == "lattice":
        lat = parse_lattice(text)
        rep.data["input"]["hyperplanes"] = lat.n
    elif job.kind == "presentation":
        p = Presentation.loads(text)
        if p.truncation is not None and p.truncation < K - 2:
            raise ValueError(f"presentation known only modulo degree {p.truncation + 1}; use K <= {p.truncation + 2}")
        presentations["file"] = p
        theta1 = p.n
        if p.expected:
            rep.data["expected"] = {str(k): v for k, v in p.expected}
    elif job.kind == "monodromy":
        n, twists = parse_monodromy(text)
        rep.data["monodromy"] = [str(t) for t in twists]
        rep.data["input"]["strands"] = n
        lat = cone_lattice(Lattice2(n, tuple(t.V for t in twists)))
        pipeline = job.pipeline or "general"
        presentations = _monodromy_presentations(twists, n, [pipeline], D)
        theta1 = n
    else:
        arr = parse_arrangement(text)
        if job.central and not isinstance(arr, CentralArrangement3):
            arr = CentralArrangement3(arr.lines)
        central = isinstance(arr, CentralArrangement3)
        rep.data["input"]["central"] = central
        rep.data["input"]["hyperplanes"] = arr.n
        lat = lattice2(arr) if central else cone_lattice(lattice2(arr))
        pipeline = job.pipeline or "real"
        if job.decone is not None and not central:
            raise ValueError("--decone needs a central arrangement")
        chart = "generic" if pipeline == "reduced" else "decone"
        rm = real_monodromy(arr, job.decone, chart=chart) if central else real_monodromy(arr, chart=chart)
        rep.data["chart"] = {
            "kind": chart if central else ("generic" if chart == "generic" else "affine"),
            "plane": (job.decone or arr.n) if central and chart == "decone" else None,
            "lines": rm.n,
        }
        rep.data["frame"] = [[str(x) for x in row] for row in rm.frame.matrix]
        rep.data["wiring"] = [
            {"V": list(ev.V), "J": list(ev.J), "lines": list(ls)}
            for ev, ls in zip(rm.wiring.events, rm.wiring.line_vertex_sets())
        ]
        rep.data["strand_to_line"] = list(rm.wiring.strand_to_line)
        rep.data["monodromy"] = [str(t) for t in rm.twists]
        names = [pipeline]
        if job.verify:
            # a real arrangement has both presentations; they must agree
            names += [x for x in ("real", "general") if x != pipeline]
        presentations = _monodromy_presentations(rm.twists, rm.n, names, D)
        theta1 = arr.n

    if lat is not None:
        _lattice_section(rep, lat)
        rep.data["theta_cc"] = {str(k): theta_cc(lat, k) for k in range(2, K + 1)}
        if not presentations:
            # without monodromy only theta_1, theta_2 and theta_3 are determined
            rep.data["theta"] = {"1": lat.n, "2": comb(lat.n, 2) - lat.b2, "3": rep.data["theta3_lattice"]}

    if presentations:
        rep.data["presentations"] = {name: _presentation_info(p) for name, p in presentations.items()}
        main_name = next(iter(presentations))
        profiles = {name: chen_ranks(p, K) for name, p in presentations.items()}
        prof = profiles[main_name]
        theta = {"1": theta1}
        theta.update({str(k): v for k, v in prof.theta.items()})
        rep.data["theta"] = theta
        rep.data["linear_tail"] = list(prof.stabilized) if prof.stabilized else None
        if job.verify:
            oracle = chen_ranks_oracle(presentations[main_name], K)
            for k in sorted(oracle.theta):
                rep.check(f"groebner-vs-oracle[{main_name}]", k, prof.theta[k], oracle.theta[k])
            for name in presentations:
                if name == main_name:
                    continue
                for k in sorted(prof.theta):
                    rep.check(f"{main_name}-vs-{name}", k, prof.theta[k], profiles[name].theta[k])
            if lat is not None:
                rep.check("theta2-vs-lattice", 2, prof.theta[2], comb(lat.n, 2) - lat.b2)
                if 3 in prof.theta:
                    rep.check("theta3-vs-lattice", 3, prof.theta[3], rep.data["theta3_lattice"])
                for k in sorted(prof.theta):
                    cc = theta_cc(lat, k)
                    rep.check("theta-at-least-cc", k, int(prof.theta[k] >= cc), 1)
            p0 = presentations[main_name]
            for k, v in p0.expected:
                if k in prof.theta:
                    rep.check("recorded", k, prof.theta[k], v)
        if job.write_presentation:
            p0 = presentations[main_name]
            saved = Presentation(p0.matrix, p0.ring, tuple(sorted(prof.theta.items())))
            Path(job.write_presentation).write_text(saved.dumps())
    elif job.verify and lat is not None:
        rep.check("theta2-formula", 2, comb(lat.n, 2) - lat.b2, theta_cc(lat, 2))
    return rep


# -- rendering ------------------------------------------------------------------------

def render(rep: Report) -> str:
    d = rep.data
    out = []
    inp = d["input"]
    desc = f"{inp['kind']} {inp['path']}"
    if "hyperplanes" in inp:
        desc += f" ({'central, ' if inp.get('central') else ''}{inp['hyperplanes']} hyperplanes)"
    out.append(f"input: {desc}")
    if "lattice" in d:
        lat = d["lattice"]
        mult = " ".join(f"{k}:{v}" for k, v in lat["multiplicities"].items())
        out.append(f"L2: n = {lat['n']}, b2 = {lat['b2']}, multiplicities {mult}")
        out.append("  " + " ".join(_set(V) for V in lat["vertex_sets"]))
    if "chart" in d:
        ch = d["chart"]
        where = f" (plane {ch['plane']} at infinity)" if ch["plane"] else ""
        out.append(f"chart: {ch['kind']}{where}, {ch['lines']} affine lines")
        out.append("frame: " + " ".join("[" + " ".join(r) + "]" for r in d["frame"]))
        out.append("wiring (strands numbered bottom to top at the far left):")
        for i, ev in enumerate(d["wiring"], start=1):
            out.append(f"  v{i}: V = {_set(ev['V'])}  J = {_set(ev['J'])}  lines {_set(ev['lines'])}")
    if "monodromy" in d:
        out.append("monodromy:")
        out.extend(f"  {t}" for t in d["monodromy"])
    if "presentations" in d:
        for name, info in d["presentations"].items():
            out.append(f"presentation [{name}]: {info['relations']} relations on {info['generators']} generators over {info['ring']}")
    if "psi3" in d:
        ps = d["psi3"]
        tors = ",".join(map(str, ps["coker_torsion"])) or "none"
        out.append(f"Psi3bar: Z^{ps['source_dim']} -> Z^{ps['target_dim']}, rank {ps['rank']}, "
                   f"coker free rank {ps['coker_free_rank']}, torsion {tors}")
        for i, vec in enumerate(ps["coker_basis"], start=1):
            terms = " ".join(f"{c:+d}*{V}:{J}" for V, J, c in vec)
            out.append(f"  coker basis {i}: {terms}")
        out.append("verdict: " + ("decomposable" if d["decomposable"] else "not decomposable"))
        out.append(f"theta3 from the lattice: {d['theta3_lattice']}")
    theta = d.get("theta", {})
    tcc = d.get("theta_cc", {})
    if theta or tcc:
        ks = sorted({int(k) for k in theta} | {int(k) for k in tcc})
        out.append(f"{'k':>3} {'theta_k':>9} {'theta^cc_k':>11}")
        for k in ks:
            t = theta.get(str(k), "-")
            c = tcc.get(str(k), "-")
            out.append(f"{k:>3} {t!s:>9} {c!s:>11}")
        if d.get("linear_tail"):
            a, b = d["linear_tail"]
            out.append(f"theta_k = {a}k {'+' if b >= 0 else '-'} {abs(b)} for k >= 4 (within the computed range)")
    for c in rep.checks:
        tag = "AGREE" if c["agree"] else "MISMATCH"
        out.append(f"{tag} {c['check']} k={c['k']}: {c['left']} {'=' if c['agree'] else '!='} {c['right']}")
    if rep.checks:
        out.append("verification: " + ("all checks agree" if rep.ok else "FAILED"))
    return "\n".join(out) + "\n"


# -- entry point ------------------------------------------------------------------------

def render_comparison(reports) -> str:
    """theta_k of several inputs in adjacent columns."""
    names = [Path(r.data["input"]["path"]).name for r in reports]
    thetas = [r.data.get("theta", {}) for r in reports]
    ks = sorted({int(k) for t in thetas for k in t})
    width = max(9, *(len(nm) for nm in names))
    out = ["comparison of theta_k:", f"{'k':>3} " + " ".join(f"{nm:>{width}}" for nm in names)]
    for k in ks:
        out.append(f"{k:>3} " + " ".join(f"{t.get(str(k), '-')!s:>{width}}" for t in thetas))
    differ = [k for k in ks if len({t.get(str(k)) for t in thetas}) > 1]
    out.append("profiles differ at k = " + ", ".join(map(str, differ)) if differ else "profiles agree")
    return "\n".join(out) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chen", description="Chen ranks and decomposition data for line arrangements.")
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--arrangement", nargs="+", metavar="FILE", help="real arrangement, one 'a b c' per line")
    src.add_argument("--lattice", nargs="+", metavar="FILE", help="vertex sets: n, then {i,j,...} per line")
    src.add_argument("--monodromy", nargs="+", metavar="FILE",
                     help="n, then one twist 'T{..} ^ (A[i,j] ...)' per line")
    src.add_argument("--presentation", nargs="+", metavar="FILE", help="presentation in the package text format")
    ap.add_argument("--central", action="store_true", help="read the arrangement as central planes")
    ap.add_argument("--decone", type=int, metavar="I", help="plane sent to infinity (default: last)")
    ap.add_argument("-K", type=int, default=8, help="compute theta_k for k <= K (default 8)")
    ap.add_argument("--truncate", type=int, metavar="D", help="power series truncation degree (default K-2)")
    ap.add_argument("--pipeline", choices=PIPELINES, help="which presentation to use")
    ap.add_argument("--verify", action="store_true", help="cross-check with the oracle and other presentations")
    ap.add_argument("--json", metavar="PATH", help="also write the report as JSON (a list for several inputs)")
    ap.add_argument("--write-presentation", metavar="PATH",
                    help="save the presentation used, with the computed ranks recorded")
    return ap


def main(argv=None) -> int:
    """Several files of one kind are processed in turn and then compared."""
    args = build_parser().parse_args(argv)
    for kind in ("arrangement", "lattice", "monodromy", "presentation"):
        if getattr(args, kind):
            paths = getattr(args, kind)
            break
    if len(paths) > 1 and args.write_presentation:
        print("chen: error: --write-presentation takes a single input file", file=sys.stderr)
        return 2
    reports = []
    try:
        for path in paths:
            job = JobSpec(kind, path, args.central, args.decone, args.K, args.truncate,
                          args.pipeline, args.verify, args.json, args.write_presentation)
            reports.append(run(job))
    except (ValueError, OSError) as exc:
        print(f"chen: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write("\n".join(render(rep) for rep in reports))
    if len(reports) > 1:
        sys.stdout.write("\n" + render_comparison(reports))
    if args.json:
        doc = reports[0].as_dict() if len(reports) == 1 else [rep.as_dict() for rep in reports]
        Path(args.json).write_text(json.dumps(doc, indent=2) + "\n")
    return 0 if all(rep.ok for rep in reports) else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
