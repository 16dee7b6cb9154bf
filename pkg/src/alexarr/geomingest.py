"""Real line arrangements: deconing, generic frames, wiring diagrams and monodromy.

Everything is exact rational arithmetic.  Wires are numbered 1..n by their
bottom-to-top order far to the left (x -> -infinity) in the chosen frame,
and braid monodromy is expressed in those strand numbers.  ``strand_to_line``
translates strand numbers back to the labels of the input lines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .braidrep import BraidWord, ConjugatedTwist
from .localcc import Lattice2

F = Fraction


@dataclass(frozen=True)
class AffineLineArrangement:
    """Lines a*x + b*y = c, labelled 1..n in order."""

    lines: tuple

    def __post_init__(self):
        lines = tuple(tuple(F(v) for v in ln) for ln in self.lines)
        for k, (a, b, _) in enumerate(lines, start=1):
            if a == 0 and b == 0:
                raise ValueError(f"line {k} has zero normal vector")
        for (i, p), (j, q) in combinations(enumerate(lines, start=1), 2):
            if _proportional(p, q):
                raise ValueError(f"lines {i} and {j} coincide")
        object.__setattr__(self, "lines", lines)

    @property
    def n(self) -> int:
        return len(self.lines)


@dataclass(frozen=True)
class CentralArrangement3:
    """Planes a*x + b*y + c*z = 0, labelled 1..n in order."""

    planes: tuple

    def __post_init__(self):
        planes = tuple(tuple(F(v) for v in p) for p in self.planes)
        for k, p in enumerate(planes, start=1):
            if not any(p):
                raise ValueError(f"plane {k} has zero normal vector")
        for (i, p), (j, q) in combinations(enumerate(planes, start=1), 2):
            if _proportional(p, q):
                raise ValueError(f"planes {i} and {j} coincide")
        object.__setattr__(self, "planes", planes)

    @property
    def n(self) -> int:
        return len(self.planes)


def _proportional(p, q) -> bool:
    return all(p[i] * q[j] == p[j] * q[i] for i in range(len(p)) for j in range(len(p)))


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


# -- lattices --------------------------------------------------------------------

def lattice2(arr) -> Lattice2:
    """Vertex sets of an affine or central arrangement.

    For a central arrangement the result partitions all pairs.  For an
    affine arrangement, pairs of parallel lines meet at infinity and belong
    to no vertex set.
    """
    if isinstance(arr, CentralArrangement3):
        flats = {}
        for i, j in combinations(range(arr.n), 2):
            d = _cross(arr.planes[i], arr.planes[j])
            members = tuple(k + 1 for k in range(arr.n) if _dot(arr.planes[k], d) == 0)
            flats[members] = None
        return Lattice2(arr.n, tuple(sorted(flats, key=lambda V: (V[0], V))))
    points = vertices(arr)
    return Lattice2(arr.n, tuple(sorted((V for V in points.values()), key=lambda V: (V[0], V))))


def vertices(a: AffineLineArrangement) -> dict:
    """{point: sorted tuple of lines through it}."""
    pts: dict = {}
    for i, j in combinations(range(a.n), 2):
        p = _intersection(a.lines[i], a.lines[j])
        if p is None:
            continue
        pts.setdefault(p, set()).update((i + 1, j + 1))
    return {p: tuple(sorted(s)) for p, s in pts.items()}


def _intersection(l1, l2):
    a1, b1, c1 = l1
    a2, b2, c2 = l2
    det = a1 * b2 - a2 * b1
    if det == 0:
        return None
    return ((c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det)


# -- deconing ----------------------------------------------------------------------

def decone(c: CentralArrangement3, which: int) -> AffineLineArrangement:
    """Send plane ``which`` (1-based) to infinity and restrict to the affine chart.

    Coordinates are changed so that the chosen plane becomes z = 0; when the
    chosen plane is z itself this is literally setting z = 1.  The remaining
    planes keep their relative order and are renumbered 1..n-1.
    """
    if not 1 <= which <= c.n:
        raise ValueError(f"plane {which} is not in the arrangement (1..{c.n})")
    h = c.planes[which - 1]
    # rows of T: two standard coordinates completing h to a basis, then h
    basis = None
    for i, j in ((0, 1), (0, 2), (1, 2)):
        rows = [tuple(F(int(k == i)) for k in range(3)), tuple(F(int(k == j)) for k in range(3)), h]
        if _det3(rows) != 0:
            basis = rows
            break
    Tinv = _inv3(basis)
    lines = []
    for k, p in enumerate(c.planes, start=1):
        if k == which:
            continue
        v = tuple(sum(p[r] * Tinv[r][col] for r in range(3)) for col in range(3))
        lines.append((v[0], v[1], -v[2]))
    return AffineLineArrangement(tuple(lines))


def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _inv3(m):
    d = _det3(m)
    cof = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            minor = [[m[r][s] for s in range(3) if s != j] for r in range(3) if r != i]
            cof[i][j] = (-1) ** (i + j) * (minor[0][0] * minor[1][1] - minor[0][1] * minor[1][0])
    return [[cof[j][i] / d for j in range(3)] for i in range(3)]


def cone(a: AffineLineArrangement) -> CentralArrangement3:
    """Homogenize: a x + b y = c becomes a x + b y - c z = 0, plus z = 0 last."""
    planes = [(ln[0], ln[1], -ln[2]) for ln in a.lines] + [(0, 0, 1)]
    return CentralArrangement3(tuple(planes))


def generic_chart(c: CentralArrangement3) -> AffineLineArrangement:
    """Affine chart whose line at infinity avoids every vertex (all n planes stay)."""
    dirs = []
    for i, j in combinations(range(c.n), 2):
        dirs.append(_cross(c.planes[i], c.planes[j]))
    for h in _candidate_planes():
        if any(_proportional(h, p) for p in c.planes):
            continue
        if all(_dot(h, d) != 0 for d in dirs):
            arr = CentralArrangement3(tuple(c.planes) + (h,))
            return decone(arr, arr.n)
    raise RuntimeError("no generic plane found")  # pragma: no cover


def _candidate_planes():
    k = 1
    while True:
        for a in range(-k, k + 1):
            for b in range(-k, k + 1):
                yield (F(a), F(b), F(k))
        k += 1


# -- frames ------------------------------------------------------------------------------

@dataclass(frozen=True)
class Frame:
    """Linear change of coordinates X' = M X with certificate data."""

    matrix: tuple
    projections: tuple = ()

    def apply(self, a: AffineLineArrangement) -> AffineLineArrangement:
        (p, q), (r, s) = self.matrix
        det = p * s - q * r
        inv = ((s / det, -q / det), (-r / det, p / det))
        lines = []
        for (la, lb, lc) in a.lines:
            na = la * inv[0][0] + lb * inv[1][0]
            nb = la * inv[0][1] + lb * inv[1][1]
            lines.append((na, nb, lc))
        return AffineLineArrangement(tuple(lines))


def frame_problems(a: AffineLineArrangement) -> list[str]:
    """Reasons the first-coordinate projection is not generic (empty if it is)."""
    out = []
    for k, (_, b, _) in enumerate(a.lines, start=1):
        if b == 0:
            out.append(f"line {k} is vertical")
    if out:
        return out
    seen: dict = {}
    for p, V in vertices(a).items():
        if p[0] in seen:
            out.append(f"vertices {seen[p[0]]} and {V} share x = {p[0]}")
        seen[p[0]] = V
    return out


def _shears():
    yield F(0)
    k = 1
    while True:
        for den in range(1, k + 1):
            for num in (k, -k):
                q = F(num, den)
                if q.denominator == den:
                    yield q
        k += 1


def generic_frame(a: AffineLineArrangement, matrix=None) -> tuple[AffineLineArrangement, Frame]:
    """A frame in which pr_1 is generic: first certified shear x -> x + q*y, or the given matrix."""
    if matrix is not None:
        m = tuple(tuple(F(v) for v in r) for r in matrix)
        fr = Frame(m)
        b = fr.apply(a)
        problems = frame_problems(b)
        if problems:
            raise ValueError(f"frame is not generic: {problems[0]}")
        return b, Frame(m, tuple(sorted(p[0] for p in vertices(b))))
    for q in _shears():
        m = ((F(1), q), (F(0), F(1)))
        b = Frame(m).apply(a)
        if not frame_problems(b):
            return b, Frame(m, tuple(sorted(p[0] for p in vertices(b))))
    raise RuntimeError("unreachable")  # pragma: no cover


# -- wiring diagrams -------------------------------------------------------------------------

@dataclass(frozen=True)
class WiringEvent:
    V: tuple  # strands meeting at the vertex
    U: tuple  # strands above the vertex
    J: tuple  # (V-bar minus V) intersected with U


@dataclass
class WiringDiagram:
    n: int
    events: list
    strand_to_line: tuple  # strand s (1-based) is input line strand_to_line[s-1]
    points: list = field(default_factory=list)

    def line_vertex_sets(self) -> list[tuple]:
        """Vertex sets in the labels of the input lines."""
        return [tuple(sorted(self.strand_to_line[s - 1] for s in ev.V)) for ev in self.events]


def wiring_diagram(a: AffineLineArrangement) -> WiringDiagram:
    """Vertices in increasing x; strands numbered bottom to top far to the left."""
    problems = frame_problems(a)
    if problems:
        raise ValueError(f"non-generic projection: {problems[0]}")
    slopes = [(-la / lb, lc / lb) for la, lb, lc in a.lines]  # y = m x + k
    # far left: larger slope is lower; parallel lines ordered by intercept
    order = sorted(range(a.n), key=lambda i: (-slopes[i][0], slopes[i][1]))
    strand_of = {line: s + 1 for s, line in enumerate(order)}
    events, points = [], []
    for p, V in sorted(vertices(a).items()):
        x, y = p
        strands = tuple(sorted(strand_of[v - 1] for v in V))
        above = tuple(sorted(strand_of[i] for i in range(a.n) if slopes[i][0] * x + slopes[i][1] > y))
        lo, hi = strands[0], strands[-1]
        J = tuple(s for s in above if lo < s < hi and s not in strands)
        events.append(WiringEvent(strands, above, J))
        points.append(p)
    return WiringDiagram(a.n, events, tuple(i + 1 for i in order), points)


def delta_from_above(V, J, n: int) -> BraidWord:
    """delta = prod A_{j,i} over i in V (increasing) and j in J with j < i (increasing)."""
    letters = []
    for i in sorted(V):
        for j in sorted(J):
            if j < i:
                letters.append(((j, i), 1))
    return BraidWord(n, tuple(letters))


def monodromy_real(w: WiringDiagram) -> list[ConjugatedTwist]:
    """Braid monodromy generators A_{V_k}^{delta_k} of a real wiring diagram."""
    return [ConjugatedTwist(ev.V, delta_from_above(ev.V, ev.J, w.n)) for ev in w.events]


@dataclass
class RealMonodromy:
    """Everything derived from a real arrangement on the way to its monodromy."""

    affine: AffineLineArrangement  # in the generic frame
    frame: Frame
    wiring: WiringDiagram
    twists: list

    @property
    def n(self) -> int:
        return self.wiring.n


def real_monodromy(arr, decone_plane: int | None = None, chart: str = "decone", matrix=None) -> RealMonodromy:
    """Affine part, generic frame, wiring diagram and monodromy in one call.

    A central arrangement is first made affine: ``chart="decone"`` sends
    ``decone_plane`` (default: the last plane) to infinity, while
    ``chart="generic"`` keeps all planes and uses a generic line at infinity,
    which makes every pair of lines meet.
    """
    if isinstance(arr, CentralArrangement3):
        if chart == "generic":
            arr = generic_chart(arr)
        elif chart == "decone":
            arr = decone(arr, decone_plane or arr.n)
        else:
            raise ValueError(f"unknown chart {chart!r}")
    elif chart == "generic":
        arr = generic_chart(cone(arr))
    b, fr = generic_frame(arr, matrix)
    w = wiring_diagram(b)
    return RealMonodromy(b, fr, w, monodromy_real(w))


# -- text formats ------------------------------------------------------------------------------

def parse_arrangement(text: str):
    """One hyperplane per line as rationals; a line ``central`` marks a central 3-arrangement.

    Affine lines are ``a b c`` meaning a*x + b*y = c; central planes are
    ``a b c`` meaning a*x + b*y + c*z = 0.
    """
    central = False
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower() == "central":
            central = True
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected three rationals, got {line!r}")
        try:
            rows.append(tuple(F(x) for x in parts))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"line {lineno}: bad rational in {line!r}") from None
    if not rows:
        raise ValueError("no hyperplanes in arrangement file")
    return CentralArrangement3(tuple(rows)) if central else AffineLineArrangement(tuple(rows))


def arrangement_from_forms(forms, central: bool = True):
    """Build from linear forms given as coefficient triples."""
    return CentralArrangement3(tuple(forms)) if central else AffineLineArrangement(tuple(forms))
