"""Local Alexander invariants, the chain maps Psi, and the integer map Psi-bar_3.

For a vertex set V with i1 = min V and V' = V - {i1}, the local invariant
B_V is presented on C_2(V') by the rows of mu~(d_3) indexed by the 3-sets J
with |J & V'| >= 2.  That index set spans the summand C_2(V') ^ C_1 of C_3
and is the target of Psi_{V,3}; its basis vectors are written e_J.  When a
product element e_K ^ e_j is needed it is converted with the wedge sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

from .alexinv import Presentation
from .braidrep import exterior_power, mu_matrix, mu_substitution
from .exactring import LaurentPoly, RingMatrix
from .koszul import basis_index, differential, label, sort_with_sign, wedge_basis


@dataclass(frozen=True)
class Lattice2:
    """Rank-two flats of an arrangement, recorded as vertex sets."""

    n: int
    vertex_sets: tuple

    def __post_init__(self):
        sets = []
        for V in self.vertex_sets:
            V = tuple(sorted(set(V)))
            if len(V) < 2:
                raise ValueError(f"vertex set {V} has fewer than two elements")
            if V[0] < 1 or V[-1] > self.n:
                raise ValueError(f"vertex set {V} out of range 1..{self.n}")
            sets.append(V)
        object.__setattr__(self, "vertex_sets", tuple(sets))

    @classmethod
    def completed(cls, n: int, sets) -> "Lattice2":
        """Add the double points needed so that every pair lies in exactly one set."""
        lat = cls(n, tuple(sets))
        covered = set()
        for V in lat.vertex_sets:
            for p in combinations(V, 2):
                if p in covered:
                    raise ValueError(f"not an arrangement lattice: pair {p} covered twice")
                covered.add(p)
        extra = [p for p in combinations(range(1, n + 1), 2) if p not in covered]
        return cls(n, lat.vertex_sets + tuple(extra))

    def check_partition(self):
        seen = {}
        for V in self.vertex_sets:
            for p in combinations(V, 2):
                if p in seen:
                    raise ValueError(f"not an arrangement lattice: pair {p} covered twice")
                seen[p] = V
        for p in combinations(range(1, self.n + 1), 2):
            if p not in seen:
                raise ValueError(f"not an arrangement lattice: pair {p} never covered")

    @property
    def b2(self) -> int:
        return sum(len(V) - 1 for V in self.vertex_sets)

    def multiplicities(self) -> dict:
        out: dict = {}
        for V in self.vertex_sets:
            out[len(V)] = out.get(len(V), 0) + 1
        return dict(sorted(out.items()))

    def multiple_points(self) -> list[tuple]:
        return [V for V in self.vertex_sets if len(V) >= 3]

    def canonical(self) -> "Lattice2":
        return Lattice2(self.n, tuple(sorted(self.vertex_sets, key=lambda V: (len(V), V))))

    def relabel(self, perm) -> "Lattice2":
        """Image under i -> perm[i-1] (a permutation of 1..n)."""
        return Lattice2(self.n, tuple(tuple(sorted(perm[i - 1] for i in V)) for V in self.vertex_sets))

    def dumps(self) -> str:
        return f"{self.n}\n" + "\n".join("{" + ",".join(map(str, V)) + "}" for V in self.vertex_sets) + "\n"

    def __str__(self):
        return " ".join("{" + ",".join(map(str, V)) + "}" for V in self.vertex_sets)


def parse_lattice(text: str, complete: bool = True) -> Lattice2:
    """Lattice file: first line n, then one ``{i,j,...}`` per line (``#`` comments)."""
    n, sets = None, []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            try:
                n = int(line)
            except ValueError:
                raise ValueError(f"line {lineno}: expected the number of hyperplanes") from None
            continue
        body = line.strip()
        if not (body.startswith("{") and body.endswith("}")):
            raise ValueError(f"line {lineno}: expected a vertex set like {{1,2,4}}")
        try:
            sets.append(tuple(int(x) for x in body[1:-1].split(",")))
        except ValueError:
            raise ValueError(f"line {lineno}: bad integer in {body!r}") from None
    if n is None:
        raise ValueError("empty lattice file")
    try:
        return Lattice2.completed(n, sets) if complete else Lattice2(n, tuple(sets))
    except ValueError as exc:
        raise ValueError(f"lattice: {exc}") from None


def cone_lattice(lat: Lattice2) -> Lattice2:
    """Lattice of the cone over an affine line arrangement.

    Pairs missing from ``lat`` are parallel lines.  Parallelism is an
    equivalence relation, so each class meets the new hyperplane n+1 in a
    single flat; lines parallel to no other line give a double point with it.
    """
    covered = set()
    for V in lat.vertex_sets:
        for p in combinations(V, 2):
            if p in covered:
                raise ValueError(f"not an arrangement lattice: pair {p} covered twice")
            covered.add(p)
    classes: list = []
    for i in range(1, lat.n + 1):
        for cls in classes:
            if all((min(i, j), max(i, j)) not in covered for j in cls):
                cls.append(i)
                break
        else:
            classes.append([i])
    parallel = set()
    for cls in classes:
        parallel.update(combinations(cls, 2))
    missing = set(combinations(range(1, lat.n + 1), 2)) - covered
    if missing != parallel:
        raise ValueError("uncovered pairs do not form parallel classes")
    extra = tuple(tuple(cls) + (lat.n + 1,) for cls in classes)
    return Lattice2(lat.n + 1, lat.vertex_sets + extra)


# -- index sets --------------------------------------------------------------------

def local_generators(V, n: int) -> list[tuple]:
    """Pairs inside V' (basis of C_2(V'))."""
    V = sorted(V)
    return list(combinations(V[1:], 2))


def local_relations(V, n: int) -> list[tuple]:
    """3-sets J with |J & V'| >= 2: the basis of C_2(V') ^ C_1 inside C_3."""
    Vp = set(sorted(V)[1:])
    return [J for J in wedge_basis(n, 3) if len(Vp.intersection(J)) >= 2]


def wedge_label_sign(V, J) -> tuple[tuple, int, int]:
    """Write e_J as sign * e_K ^ e_j with K inside V' (K the first two of J & V')."""
    Vp = set(sorted(V)[1:])
    inside = [j for j in J if j in Vp]
    K = tuple(inside[:2])
    rest = [j for j in J if j not in K]
    (j,) = rest
    s, _ = sort_with_sign(K + (j,))
    return K, j, s


# -- presentations and chain maps --------------------------------------------------

def local_presentation(V, n: int) -> Presentation:
    """Delta_V: rows J of mu~(d_3), columns the pairs of V'."""
    V = sorted(V)
    if len(V) < 2:
        raise ValueError("|V| >= 2 required")
    gens = local_generators(V, n)
    rels = local_relations(V, n)
    if not gens:
        return Presentation(RingMatrix([], n, [], []))
    d3 = differential(n, 3)
    idx3, idx2 = basis_index(n, 3), basis_index(n, 2)
    images = mu_substitution(V, n)
    rows = [[d3.entries[idx3[J]][idx2[K]].substitute(images) if d3.entries[idx3[J]][idx2[K]] else LaurentPoly.zero(n)
             for K in gens] for J in rels]
    return Presentation(RingMatrix(rows, n, [label(J) for J in rels], [label(K) for K in gens]))


def _projection(n: int, k: int, keep: list[tuple]) -> RingMatrix:
    idx = basis_index(n, k)
    zero, one = LaurentPoly.zero(n), LaurentPoly.one(n)
    rows = []
    for J in wedge_basis(n, k):
        row = [zero] * len(keep)
        rows.append(row)
    for c, J in enumerate(keep):
        rows[idx[J]][c] = one
    return RingMatrix(rows, n, [label(J) for J in wedge_basis(n, k)], [label(J) for J in keep])


def local_chain_map(V, n: int, k: int) -> RingMatrix:
    """Psi_{V,k} = Theta_k(mu_V)^{-1} followed by projection onto C_2(V') ^ C_{k-2}."""
    if k < 2:
        raise ValueError("k >= 2 required")
    V = sorted(V)
    Vp = set(V[1:])
    keep = [J for J in wedge_basis(n, k) if len(Vp.intersection(J)) >= 2]
    inv = exterior_power(mu_matrix(V, n)[1], k)
    return inv @ _projection(n, k, keep)


# -- integer linear algebra ----------------------------------------------------------

def smith_normal_form(a: list[list[int]]):
    """Return (diag, U, V, Vinv) with U a V = diag matrix (U, V unimodular).

    ``diag`` lists the nonzero invariant factors d_1 | d_2 | ... in order.
    """
    m = len(a)
    N = len(a[0]) if a else 0
    A = [list(r) for r in a]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Vm = [[int(i == j) for j in range(N)] for i in range(N)]
    Vi = [[int(i == j) for j in range(N)] for i in range(N)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in Vm:
            r[i], r[j] = r[j], r[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, f):  # row dst += f * row src
        if f:
            A[dst] = [x + f * y for x, y in zip(A[dst], A[src])]
            U[dst] = [x + f * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, f):  # col dst += f * col src
        if f:
            for r in A:
                r[dst] += f * r[src]
            for r in Vm:
                r[dst] += f * r[src]
            # inverse: row src of Vinv -= f * row dst
            Vi[src] = [x - f * y for x, y in zip(Vi[src], Vi[dst])]

    diag = []
    t = 0
    while t < min(m, N):
        nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, N) if A[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    add_row(i, t, -q)
                    if A[i][t]:
                        done = False
                        swap_rows(t, i)
            for j in range(t + 1, N):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    add_col(j, t, -q)
                    if A[t][j]:
                        done = False
                        swap_cols(t, j)
            if not done:
                continue
            # divisibility of the remaining block
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, N):
                    if A[i][j] % A[t][t]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        diag.append(A[t][t])
        t += 1
    return diag, U, Vm, Vi


def int_rank(a: list[list[int]]) -> int:
    return len(smith_normal_form(a)[0])


@dataclass
class CokernelInfo:
    rank: int  # rank of the map
    free_rank: int  # rank of the cokernel
    torsion: list  # invariant factors > 1
    basis: list  # integer vectors generating the free part
    torsion_generators: list

    @property
    def surjective(self) -> bool:
        return self.free_rank == 0 and not self.torsion


def cokernel(a: list[list[int]], N: int) -> CokernelInfo:
    """Cokernel of the row-space map Z^m -> Z^N given by the rows of ``a``."""
    if not a:
        ident = [[int(i == j) for j in range(N)] for i in range(N)]
        return CokernelInfo(0, N, [], ident, [])
    diag, _, _, Vi = smith_normal_form(a)
    r = len(diag)
    torsion = [d for d in diag if d > 1]
    tgen = [Vi[i] for i, d in enumerate(diag) if d > 1]
    return CokernelInfo(r, N - r, torsion, [Vi[i] for i in range(r, N)], tgen)


# -- Psi-bar_3 and the decomposition test -------------------------------------------

@dataclass
class Psi3Bar:
    lattice: Lattice2
    matrix: list  # C(n,3) rows, one column per (V, J)
    columns: list  # (V, J) labels

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.matrix), len(self.columns)


def _at_one(m: RingMatrix) -> list[list[int]]:
    return [[int(x.evaluate_at_one()) if x else 0 for x in r] for r in m.entries]


def psi3_bar(lat: Lattice2) -> Psi3Bar:
    """Integer matrix of Psi_3 = sum_V Psi_{V,3} at t = 1."""
    n = lat.n
    rows = [[] for _ in wedge_basis(n, 3)]
    columns = []
    for V in lat.vertex_sets:
        if len(V) < 3:
            continue
        block = _at_one(local_chain_map(V, n, 3))
        keep = local_relations(V, n)
        for r, br in zip(rows, block):
            r.extend(br)
        columns.extend((V, J) for J in keep)
    return Psi3Bar(lat, rows, columns)


def psi2_bar(lat: Lattice2) -> tuple[list, list]:
    """Integer matrix of Psi_2 (the map called Upsilon_0) at t = 1."""
    n = lat.n
    rows = [[] for _ in wedge_basis(n, 2)]
    columns = []
    for V in lat.vertex_sets:
        if len(V) < 3:
            continue
        block = _at_one(local_chain_map(V, n, 2))
        for r, br in zip(rows, block):
            r.extend(br)
        columns.extend((V, K) for K in local_generators(V, n))
    return rows, columns


@dataclass
class Decomposition:
    decomposable: bool
    rank: int
    target_dim: int
    coker: CokernelInfo
    columns: list

    def coker_basis_labeled(self) -> list[dict]:
        return [{self.columns[i]: c for i, c in enumerate(v) if c} for v in self.coker.basis]


def decomposes(lat: Lattice2) -> Decomposition:
    """Surjectivity of Psi-bar_3 over Z and a Z-basis of its cokernel."""
    lat.check_partition()
    psi = psi3_bar(lat)
    N = len(psi.columns)
    info = cokernel(psi.matrix, N)
    return Decomposition(info.surjective, info.rank, N, info, psi.columns)


def theta_cc(lat: Lattice2, k: int) -> int:
    """Coarse combinatorial Chen rank: sum over V of (k-1) C(k+|V|-3, k)."""
    if k < 2:
        raise ValueError("k >= 2 required")
    return sum((k - 1) * comb(k + len(V) - 3, k) for V in lat.vertex_sets)


def theta3(lat: Lattice2) -> int:
    return decomposes(lat).coker.free_rank + theta_cc(lat, 3)


def l1_vector(psi: Psi3Bar, terms) -> list[int]:
    """Coordinates of sum c * e_K ^ e_j in the Psi-bar_3 target basis.

    ``terms`` are (c, K, j) with K a pair inside some V'.  The block is
    the unique multiple point V with K inside V'.
    """
    pos = {col: i for i, col in enumerate(psi.columns)}
    vec = [0] * len(psi.columns)
    for c, K, j in terms:
        K = tuple(K)
        owners = [V for V in psi.lattice.vertex_sets if len(V) >= 3 and set(K) <= set(V[1:])]
        if len(owners) != 1:
            raise ValueError(f"pair {K} does not lie in V' for a unique multiple point")
        s, J = sort_with_sign(K + (j,))
        if not s:
            continue
        vec[pos[(owners[0], J)]] += s * c
    return vec


def in_row_span(a: list[list[int]], v: list[int]) -> bool:
    """Whether v is an integer combination of the rows of a."""
    base = cokernel(a, len(v))
    ext = cokernel(a + [v], len(v))
    return base.free_rank == ext.free_rank and base.torsion == ext.torsion


# -- lattice transport -----------------------------------------------------------------

def _omega3(omega, n_src: int, n_tgt: int) -> list[list[int]]:
    idx = basis_index(n_tgt, 3)
    out = []
    for J in wedge_basis(n_src, 3):
        row = [0] * len(idx)
        s, K = sort_with_sign(tuple(omega[j - 1] for j in J))
        row[idx[K]] = s
        out.append(row)
    return out


def _matmul(a, b):
    cols = list(zip(*b)) if b else []
    return [[sum(x * y for x, y in zip(r, c) if x and y) for c in cols] for r in a]


def transport_blocks(omega, src: Lattice2, tgt: Lattice2) -> dict:
    """Integer matrices xi^U_V for every multiple point V of the source.

    ``omega`` lists the images of 1..n_src.  Returns {V: (U, matrix)} where
    rows are indexed by local_relations(V) and columns by local_relations(U).
    """
    if len(set(omega)) != len(omega) or any(not 1 <= w <= tgt.n for w in omega):
        raise ValueError("omega must be an injection into 1..n_target")
    tsets = {frozenset(U): U for U in tgt.vertex_sets}
    w3 = _omega3(omega, src.n, tgt.n)
    out = {}
    for V in src.vertex_sets:
        image = frozenset(omega[v - 1] for v in V)
        if len(V) < 3:
            if not any(image <= set(U) for U in tgt.vertex_sets):
                raise ValueError(f"omega is not a lattice map: image of {V} lies in no vertex set")
            continue
        if image not in tsets:
            raise ValueError(f"omega is not a lattice map: image of {V} is not a vertex set")
        U = tsets[image]
        fwd = _at_one(exterior_power(mu_matrix(V, src.n)[0], 3))
        back = _at_one(local_chain_map(U, tgt.n, 3))
        idx = basis_index(src.n, 3)
        rows = [fwd[idx[J]] for J in local_relations(V, src.n)]
        out[V] = (U, _matmul(_matmul(rows, w3), back))
    return out


def lattice_transport(omega, src: Lattice2, tgt: Lattice2, vector: list[int]) -> list[int]:
    """Apply xi-bar = sum of xi^U_V to a vector in the source Psi-bar_3 target."""
    psi_s, psi_t = psi3_bar(src), psi3_bar(tgt)
    if len(vector) != len(psi_s.columns):
        raise ValueError("vector length does not match the source basis")
    blocks = transport_blocks(omega, src, tgt)
    tpos = {col: i for i, col in enumerate(psi_t.columns)}
    out = [0] * len(psi_t.columns)
    for i, (V, J) in enumerate(psi_s.columns):
        c = vector[i]
        if not c:
            continue
        U, mat = blocks[V]
        r = local_relations(V, src.n).index(J)
        for Jt, x in zip(local_relations(U, tgt.n), mat[r]):
            if x:
                out[tpos[(U, Jt)]] += c * x
    return out
