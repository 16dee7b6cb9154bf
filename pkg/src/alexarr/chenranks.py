"""Chen ranks from the tangent cone of the Magnus-embedded presentation.

The cokernel of a presentation over Lambda is completed at the augmentation
ideal; under t_i -> 1 - x_i this becomes R^b / J over the power series ring.
The Chen ranks are read off from the Hilbert function of R^b / LT(J), where
LT takes lowest-degree forms:

    theta_{d+2} = b * C(n+d-1, d) - dim LT(J)_d.

Because only degrees <= D = K - 2 are needed, all work happens in the
finite-dimensional module (R / m^{D+1})^b.  There a local degree ordering
is a well-ordering, so ordinary Buchberger reduction terminates and
computes a standard basis; terms of degree > D are simply discarded.

Monomials x^a e_c are packed into single integers so that multiplying by a
monomial is one integer addition and comparison is integer comparison.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd

from .exactring import Poly, clear_units, exponent_vectors, laurent_to_series, magnus_poly

WIDTH = 4  # bits per exponent field (exponents <= 7 plus a guard bit)


@dataclass
class ChenProfile:
    """theta_k for 2 <= k <= K plus bookkeeping."""

    theta: dict
    theta1: int
    generators: int = 0
    stabilized: tuple | None = None

    def as_list(self, start: int = 2) -> list[int]:
        return [self.theta[k] for k in sorted(self.theta) if k >= start]

    def __post_init__(self):
        self.stabilized = detect_linear(self.theta)


def detect_linear(theta: dict, start: int = 4) -> tuple | None:
    """(a, b) if theta_k = a*k + b for every computed k >= start (at least 3 points)."""
    ks = sorted(k for k in theta if k >= start)
    if len(ks) < 3:
        return None
    a = theta[ks[1]] - theta[ks[0]]
    b = theta[ks[0]] - a * ks[0]
    if all(theta[k] == a * k + b for k in ks):
        return (a, b)
    return None


class ModuleEncoding:
    """Packs (exponent vector, component) into an ordering key.

    key = ((deg * NC + comp) * BIG) + (BIG - 1 - packed); smaller key means
    larger in the local ordering, so the lead term is the minimum key.
    Ties at equal degree and component are broken by lex order on the
    exponent vector with x_1 most significant.
    """

    def __init__(self, n: int, ncomp: int, D: int):
        if D >= (1 << (WIDTH - 1)):
            raise ValueError(f"truncation degree {D} too large for the packed encoding")
        self.n, self.nc, self.D = n, max(ncomp, 1), D
        self.big = 1 << (WIDTH * n)
        self.guard = sum(1 << (WIDTH * i + WIDTH - 1) for i in range(n))
        self.limit = (D + 1) * self.nc * self.big

    def pack(self, exps) -> int:
        p = 0
        for e in exps:
            p = (p << WIDTH) | e
        return p

    def unpack(self, packed: int) -> tuple:
        mask = (1 << WIDTH) - 1
        out = []
        for _ in range(self.n):
            out.append(packed & mask)
            packed >>= WIDTH
        return tuple(reversed(out))

    def key(self, exps, comp: int) -> int:
        return ((sum(exps) * self.nc + comp) * self.big) + (self.big - 1 - self.pack(exps))

    def decode(self, key: int) -> tuple:
        """(degree, component, packed monomial)."""
        q, r = divmod(key, self.big)
        deg, comp = divmod(q, self.nc)
        return deg, comp, self.big - 1 - r

    def shift(self, exps) -> int:
        """Key increment for multiplication by x^exps."""
        return sum(exps) * self.nc * self.big - self.pack(exps)

    def divides(self, pb: int, pa: int) -> bool:
        """x^b | x^a on packed monomials (guard-bit borrow test)."""
        return ((pa | self.guard) - pb) & self.guard == self.guard


@dataclass
class GradedModuleBasis:
    """Standard basis elements as {key: int}, with the encoding to read lead terms."""

    encoding: ModuleEncoding
    elements: list = field(default_factory=list)

    def lead_terms(self) -> list[tuple]:
        """(exponent vector, component) of each element's lowest-degree lead term."""
        enc = self.encoding
        out = []
        for g in self.elements:
            _, comp, packed = enc.decode(min(g))
            out.append((enc.unpack(packed), comp))
        return out


# -- polynomial vector arithmetic on packed keys -----------------------------------

def _primitive(f: dict) -> dict:
    g = 0
    for c in f.values():
        g = gcd(g, c)
        if g == 1:
            break
    lead = f[min(f)]
    if lead < 0:
        g = -g
    if g not in (1,):
        f = {k: c // g for k, c in f.items()}
    return f


def _reduce_lead(f: dict, basis: list, by_comp: dict, enc: ModuleEncoding, full: bool = False) -> dict:
    """Lead-reduce f against the basis and return the result (f is consumed).

    Reduction only ever introduces keys larger than the current lead, so a
    lazily pruned heap of keys tracks the lead without rescanning f.
    """
    limit = enc.limit
    big, nc, guard = enc.big, enc.nc, enc.guard
    done: dict = {}
    heap = list(f)
    heapq.heapify(heap)
    while heap:
        lk = heapq.heappop(heap)
        if lk not in f:
            continue
        q, r = divmod(lk, big)
        comp = q % nc
        pa = big - 1 - r
        reducer = None
        for idx in by_comp.get(comp, ()):
            gp = basis[idx][2]
            if ((pa | guard) - gp) & guard == guard:
                reducer = basis[idx]
                break
        if reducer is None:
            if not full:
                heapq.heappush(heap, lk)
                break
            done[lk] = f.pop(lk)
            continue
        g, gk = reducer[0], reducer[1]
        shift = lk - gk
        a, b = f[lk], g[gk]
        d = gcd(a, b)
        fa, fb = b // d, a // d
        if fa < 0:
            fa, fb = -fa, -fb
        if fa != 1:
            f = {k: c * fa for k, c in f.items()}
            if done:
                done = {k: c * fa for k, c in done.items()}
        for k, c in g.items():
            k2 = k + shift
            if k2 >= limit:
                continue
            old = f.get(k2)
            if old is None:
                f[k2] = -fb * c
                heapq.heappush(heap, k2)
            else:
                v = old - fb * c
                if v:
                    f[k2] = v
                else:
                    del f[k2]
    if done:
        f = {**done, **f}
    return f


def tangent_cone_rows(rows: list[dict], enc: ModuleEncoding) -> GradedModuleBasis:
    """Truncated standard basis of the submodule spanned by ``rows`` (packed dicts)."""
    big = enc.big
    basis: list = []  # entries [poly, lead key, lead packed, degree, comp, exps]
    by_comp: dict = {}
    pairs: list = []
    D = enc.D

    def add(f: dict):
        f = _primitive(f)
        lk = min(f)
        deg, comp, packed = enc.decode(lk)
        exps = enc.unpack(packed)
        idx = len(basis)
        basis.append([f, lk, packed, deg, comp, exps])
        for j in by_comp.get(comp, ()):
            other = basis[j]
            if other is None:
                continue
            lcm = tuple(max(x, y) for x, y in zip(exps, other[5]))
            ldeg = sum(lcm)
            if ldeg > D:
                continue
            # coprime leads in the same component still need their S-pair
            heapq.heappush(pairs, (ldeg, enc.key(lcm, comp), j, idx))
        by_comp.setdefault(comp, []).append(idx)

    # sort input by lead so low degrees are settled first
    queue = [dict(r) for r in rows if r]
    for f in sorted(queue, key=min):
        h = _reduce_lead(f, basis, by_comp, enc)
        if h:
            add(h)

    while pairs:
        ldeg, lkey, i, j = heapq.heappop(pairs)
        gi, gj = basis[i], basis[j]
        if gi is None or gj is None:
            continue
        if _chain_skip(basis, by_comp, enc, lkey, i, j):
            continue
        lcm = enc.unpack(big - 1 - lkey % big)
        si = tuple(a - b for a, b in zip(lcm, gi[5]))
        sj = tuple(a - b for a, b in zip(lcm, gj[5]))
        shi, shj = enc.shift(si), enc.shift(sj)
        ci, cj = gi[0][gi[1]], gj[0][gj[1]]
        d = gcd(ci, cj)
        mi, mj = cj // d, ci // d
        s: dict = {}
        limit = enc.limit
        for k, c in gi[0].items():
            k2 = k + shi
            if k2 < limit:
                s[k2] = s.get(k2, 0) + mi * c
        for k, c in gj[0].items():
            k2 = k + shj
            if k2 < limit:
                v = s.get(k2, 0) - mj * c
                if v:
                    s[k2] = v
                else:
                    s.pop(k2, None)
        s = {k: c for k, c in s.items() if c}
        if not s:
            continue
        h = _reduce_lead(s, basis, by_comp, enc)
        if h:
            add(h)

    # minimalize: drop elements whose lead is divisible by another lead
    alive = [b for b in basis if b is not None]
    keep = []
    for a in alive:
        redundant = False
        for b in alive:
            if b is a or b[4] != a[4]:
                continue
            if enc.divides(b[2], a[2]) and (b[2] != a[2] or id(b) < id(a)):
                redundant = True
                break
        if not redundant:
            keep.append(a[0])
    keep.sort(key=min)
    return GradedModuleBasis(enc, keep)


def _chain_skip(basis, by_comp, enc, lkey, i, j) -> bool:
    """Chain criterion: skip (i, j) if some k's lead divides lcm and (i,k), (k,j) came earlier.

    Implemented conservatively: only when the third lead strictly divides the
    lcm and both of its pairs have strictly smaller lcm degree (hence were
    processed already).
    """
    big = enc.big
    comp = basis[i][4]
    lp = big - 1 - lkey % big
    lexps = enc.unpack(lp)
    ldeg = sum(lexps)
    for k in by_comp.get(comp, ()):
        if k in (i, j) or basis[k] is None or k > max(i, j):
            continue
        gk = basis[k]
        if not enc.divides(gk[2], lp):
            continue
        ok = True
        for other in (basis[i], basis[j]):
            l2 = sum(max(x, y) for x, y in zip(gk[5], other[5]))
            if l2 >= ldeg:
                ok = False
                break
        if ok:
            return True
    return False


# -- from presentations to packed rows ------------------------------------------------

def _integer_row(polys: list) -> list:
    den = 1
    for p in polys:
        for c in p.terms.values():
            if isinstance(c, Fraction):
                den = den * c.denominator // gcd(den, c.denominator)
    if den == 1:
        return polys
    return [p.scale(den) for p in polys]


def series_rows(p, D: int) -> tuple[list[list[Poly]], int, int]:
    """Rows of the presentation as polynomials in x, truncated at degree D."""
    from .alexinv import Presentation  # local import to avoid a cycle
    assert isinstance(p, Presentation)
    m = p.matrix
    n = p.n
    if p.ring == "Lambda":
        m = clear_units(m)
        rows = [[magnus_poly(x, D) for x in r] for r in m.entries]
    else:
        rows = [[Poly(n, x.terms, D) if not isinstance(x, Poly) else x.truncate(D) for x in r] for r in m.entries]
        if p.truncation is not None and p.truncation < D:
            raise ValueError(f"presentation known only modulo degree {p.truncation + 1}, need {D}")
    return rows, n, m.shape[1]


def pack_rows(rows, enc: ModuleEncoding) -> list[dict]:
    out = []
    for r in rows:
        r = _integer_row(r)
        f: dict = {}
        for comp, x in enumerate(r):
            for e, c in x.terms.items():
                if sum(e) <= enc.D:
                    f[enc.key(e, comp)] = int(c)
        if f:
            out.append(f)
    return out


def tangent_cone(p, D: int) -> GradedModuleBasis:
    """Standard basis of J + m^(D+1) for the presentation's Magnus image."""
    rows, n, b = series_rows(p, D)
    enc = ModuleEncoding(n, b, D)
    return tangent_cone_rows(pack_rows(rows, enc), enc)


def standard_monomial_counts(basis: GradedModuleBasis, b: int, D: int) -> list[int]:
    """Number of degree-d monomials of R^b outside LT, for d = 0..D."""
    enc = basis.encoding
    leads: dict = {}
    for exps, comp in basis.lead_terms():
        leads.setdefault(comp, []).append(enc.pack(exps))
    counts = []
    for d in range(D + 1):
        monos = [enc.pack(e) for e in exponent_vectors(enc.n, d)]
        total = 0
        for comp in range(b):
            ls = leads.get(comp, [])
            total += sum(1 for m in monos if not any(enc.divides(l, m) for l in ls))
        counts.append(total)
    return counts


def hilbert_theta(basis: GradedModuleBasis, b: int, K: int, n: int | None = None) -> ChenProfile:
    """theta_k for 2 <= k <= K from the standard monomials of degree k-2."""
    if K < 2:
        raise ValueError("K must be at least 2")
    counts = standard_monomial_counts(basis, b, K - 2)
    theta = {d + 2: counts[d] for d in range(K - 1)}
    return ChenProfile(theta, basis.encoding.n if n is None else n, b)


def chen_ranks(p, K: int = 8) -> ChenProfile:
    """Chen ranks theta_2..theta_K of the module presented by ``p``."""
    if K < 2:
        raise ValueError("K must be at least 2")
    D = K - 2
    if p.num_generators == 0:
        return ChenProfile({k: 0 for k in range(2, K + 1)}, p.n, 0)
    basis = tangent_cone(p, D)
    return hilbert_theta(basis, p.num_generators, K, p.n)


# -- the linear-algebra oracle ---------------------------------------------------------

def chen_ranks_oracle(p, K: int = 7) -> ChenProfile:
    """Independent check: graded ranks of the truncated Macaulay matrix over Q.

    Rows are x^a * r_i truncated at degree D = K - 2, columns are the
    monomials x^a e_c of degree <= D ordered by degree.  After row echelon
    reduction the number of pivots in degree-d columns is dim LT(J)_d.
    """
    if K < 2:
        raise ValueError("K must be at least 2")
    D = K - 2
    b = p.num_generators
    if b == 0:
        return ChenProfile({k: 0 for k in range(2, K + 1)}, p.n, 0)
    n = p.n
    if p.ring == "Lambda":
        rows = [[laurent_to_series(x, D) for x in r] for r in p.matrix.entries]
    else:
        rows = [[Poly(n, x.terms, D) for x in r] for r in p.matrix.entries]
    columns = []
    for d in range(D + 1):
        for e in exponent_vectors(n, d):
            for c in range(b):
                columns.append((e, c))
    col_index = {ec: i for i, ec in enumerate(columns)}
    col_degree = [sum(e) for e, _ in columns]

    pivots: dict = {}  # column -> primitive integer row with that leading column
    for r in rows:
        r = _integer_row(r)
        order = min((x.lowest_degree() for x in r if x), default=None)
        if order is None:
            continue
        for s in range(D - order + 1):
            for a in exponent_vectors(n, s):
                vec: dict = {}
                for c, x in enumerate(r):
                    for e, coef in x.terms.items():
                        if sum(e) + s > D:
                            continue
                        key = col_index[(tuple(u + v for u, v in zip(e, a)), c)]
                        vec[key] = vec.get(key, 0) + coef
                vec = {k: int(v) for k, v in vec.items() if v}
                _insert_row(vec, pivots)
    dims = [0] * (D + 1)
    for col in pivots:
        dims[col_degree[col]] += 1
    theta = {}
    for d in range(D + 1):
        theta[d + 2] = b * comb(n + d - 1, d) - dims[d]
    return ChenProfile(theta, n, b)


def _insert_row(vec: dict, pivots: dict):
    """Fraction-free forward elimination of an integer row into the pivot table."""
    heap = list(vec)
    heapq.heapify(heap)
    while heap:
        col = heapq.heappop(heap)
        if col not in vec:
            continue
        prow = pivots.get(col)
        if prow is None:
            pivots[col] = _primitive(vec)
            return
        a, b = vec[col], prow[col]
        d = gcd(a, b)
        fa, fb = b // d, a // d
        if fa < 0:
            fa, fb = -fa, -fb
        if fa != 1:
            vec = {k: v * fa for k, v in vec.items()}
        for k, v in prow.items():
            old = vec.get(k)
            if old is None:
                vec[k] = -fb * v
                heapq.heappush(heap, k)
            else:
                w = old - fb * v
                if w:
                    vec[k] = w
                else:
                    del vec[k]
        if fa != 1 and vec:
            vec = _primitive(vec)


def theta_free(n: int, k: int) -> int:
    """(k-1) C(k+n-2, k): Chen ranks of the free group of rank n."""
    return (k - 1) * comb(k + n - 2, k)


def theta_product(ds, k: int) -> int:
    return sum(theta_free(d, k) for d in ds)
