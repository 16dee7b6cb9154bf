"""The Koszul (exterior algebra) resolution C_* of Z over Lambda.

C_k has basis e_J for increasing k-subsets J of [n], ordered
lexicographically.  Vectors are sparse dicts ``{J: LaurentPoly}``.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

from .exactring import LaurentPoly, RingMatrix


@lru_cache(maxsize=None)
def wedge_basis(n: int, k: int) -> tuple:
    """Increasing k-subsets of 1..n in lexicographic order."""
    if k < 0 or k > n:
        return ()
    return tuple(combinations(range(1, n + 1), k))


@lru_cache(maxsize=None)
def basis_index(n: int, k: int) -> dict:
    return {J: i for i, J in enumerate(wedge_basis(n, k))}


def label(J) -> str:
    return "e{" + ",".join(str(j) for j in J) + "}"


def parse_label(text: str) -> tuple:
    text = text.strip()
    if not (text.startswith("e{") and text.endswith("}")):
        raise ValueError(f"bad basis label {text!r}")
    body = text[2:-1].strip()
    return tuple(int(x) for x in body.split(",")) if body else ()


def sort_with_sign(indices) -> tuple[int, tuple]:
    """Sign of the sorting permutation and the sorted tuple; sign 0 on repeats."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


def vec_add(acc: dict, J, c):
    v = acc.get(J)
    v = c if v is None else v + c
    if v:
        acc[J] = v
    else:
        acc.pop(J, None)


def wedge(u: dict, v: dict) -> dict:
    """Exterior product of two sparse vectors."""
    out: dict = {}
    for I, a in u.items():
        for J, b in v.items():
            s, K = sort_with_sign(I + J)
            if s:
                vec_add(out, K, a * b if s > 0 else -(a * b))
    return out


def basis_vector(n: int, J) -> dict:
    s, K = sort_with_sign(J)
    if not s:
        return {}
    one = LaurentPoly.one(n)
    return {K: one if s > 0 else -one}


def scale_vec(v: dict, c) -> dict:
    out = {}
    for J, a in v.items():
        p = a * c
        if p:
            out[J] = p
    return out


def vec_to_row(v: dict, n: int, k: int) -> list:
    zero = LaurentPoly.zero(n)
    idx = basis_index(n, k)
    row = [zero] * len(idx)
    for J, c in v.items():
        row[idx[J]] = c
    return row


def row_to_vec(row, n: int, k: int) -> dict:
    return {J: c for J, c in zip(wedge_basis(n, k), row) if c}


def differential(n: int, k: int) -> RingMatrix:
    """Matrix of d_k : C_k -> C_{k-1}; rows indexed by k-subsets."""
    if not 1 <= k <= n:
        raise ValueError(f"differential degree k={k} out of range 1..{n}")
    idx = basis_index(n, k - 1)
    zero = LaurentPoly.zero(n)
    rows = []
    for J in wedge_basis(n, k):
        row = [zero] * len(idx)
        for r, j in enumerate(J, start=1):
            c = LaurentPoly.var(n, j) - 1
            row[idx[J[:r - 1] + J[r:]]] = c if (k + r) % 2 == 0 else -c
        rows.append(row)
    return RingMatrix(rows, n, [label(J) for J in wedge_basis(n, k)],
                      [label(J) for J in wedge_basis(n, k - 1)])


def t_prod(n: int, indices) -> LaurentPoly:
    e = [0] * n
    for i in indices:
        e[i - 1] += 1
    return LaurentPoly.monomial(n, e)


def nabla_V(V, n: int) -> dict:
    """nabla_V = sum_{i in V} t_{V^i} e_i with V^i the members of V below i."""
    V = sorted(V)
    if not V:
        raise ValueError("V must be nonempty")
    return {(i,): t_prod(n, V[:r]) for r, i in enumerate(V)}


def subcomplex_basis(V, n: int, k: int) -> tuple:
    """Basis of C_k(V): subsets J of V."""
    Vs = set(V)
    return tuple(J for J in wedge_basis(n, k) if set(J) <= Vs)
