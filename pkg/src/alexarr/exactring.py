"""Exact sparse multivariate Laurent polynomials, truncated power series and
matrices over them.

``LaurentPoly`` models the group ring of Z^n, ``Poly`` the polynomial ring
(optionally truncated at a total degree, which is how elements of the
completed group ring are carried around).  Coefficients are Python ints or
``fractions.Fraction``; nothing here ever touches floating point.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

Exponent = tuple


def _clean(terms: dict) -> dict:
    return {e: c for e, c in terms.items() if c != 0}


def _norm_coeff(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class LaurentPoly:
    """Element of Z[t_1^{+-1}, ..., t_n^{+-1}] (or Q[...]).

    ``terms`` maps exponent tuples of length ``n`` to nonzero coefficients.
    Instances are treated as immutable.
    """

    __slots__ = ("n", "terms", "_hash")
    var_name = "t"

    def __init__(self, n: int, terms: dict | None = None):
        self.n = n
        self.terms = {} if terms is None else {e: _norm_coeff(c) for e, c in terms.items() if c != 0}
        self._hash = None

    # -- construction -------------------------------------------------
    def _new(self, terms: dict):
        obj = object.__new__(type(self))
        obj.n = self.n
        obj.terms = terms
        obj._hash = None
        self._copy_extra(obj)
        return obj

    def _copy_extra(self, obj):
        pass

    @classmethod
    def zero(cls, n: int):
        return cls(n)

    @classmethod
    def one(cls, n: int):
        return cls(n, {(0,) * n: 1})

    @classmethod
    def constant(cls, n: int, c):
        return cls(n, {(0,) * n: c})

    @classmethod
    def var(cls, n: int, i: int):
        """The variable with 1-based index ``i``."""
        e = [0] * n
        e[i - 1] = 1
        return cls(n, {tuple(e): 1})

    @classmethod
    def monomial(cls, n: int, exps: Sequence[int], c=1):
        return cls(n, {tuple(exps): c})

    # -- predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_unit(self) -> bool:
        """True for +-(monomial), the units of the integral group ring."""
        if len(self.terms) != 1:
            return False
        (c,) = self.terms.values()
        return c in (1, -1)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def has_negative_exponents(self) -> bool:
        return any(x < 0 for e in self.terms for x in e)

    def constant_term(self):
        return self.terms.get((0,) * self.n, 0)

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            if other.n != self.n:
                raise ValueError(f"variable count mismatch: {self.n} vs {other.n}")
            return other
        if isinstance(other, (int, Fraction)):
            return self._new({(0,) * self.n: other} if other else {})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for e, c in other.terms.items():
            v = terms.get(e, 0) + c
            if v:
                terms[e] = _norm_coeff(v)
            else:
                terms.pop(e, None)
        return self._result(terms, other)

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return self._result({}, other)
        terms: dict = {}
        get = terms.get
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = get(e, 0) + c1 * c2
        return self._result(_clean(terms), other)

    __rmul__ = __mul__

    def _result(self, terms, other):
        return self._new({e: _norm_coeff(c) for e, c in terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse_unit() ** (-k)
        result = self._new({(0,) * self.n: 1})
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c):
        if c == 0:
            return self._new({})
        return self._new({e: _norm_coeff(v * c) for e, v in self.terms.items()})

    def shift(self, exps: Sequence[int]):
        """Multiply by the monomial t^exps."""
        return self._new({tuple(a + b for a, b in zip(e, exps)): c for e, c in self.terms.items()})

    def inverse_unit(self):
        if not self.is_unit():
            raise ZeroDivisionError(f"{self} is not a unit of the group ring")
        ((e, c),) = self.terms.items()
        return self._new({tuple(-x for x in e): c})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    # -- evaluation and substitution ---------------------------------
    def evaluate_at_one(self):
        """Image under the augmentation t_i -> 1."""
        return _norm_coeff(sum(self.terms.values(), 0))

    def evaluate(self, values: Sequence):
        total = 0
        for e, c in self.terms.items():
            v = c
            for x, k in zip(values, e):
                if k:
                    v = v * (Fraction(x) ** k if k < 0 else x ** k)
            total += v
        return _norm_coeff(total)

    def substitute(self, images: Sequence["LaurentPoly"]):
        """Ring homomorphism sending t_i to ``images[i-1]``.

        Images of variables that occur with negative exponent must be units.
        """
        first = images[0]
        result = first._new({})
        for e, c in self.terms.items():
            term = first._new({(0,) * first.n: c})
            for img, k in zip(images, e):
                if k:
                    term = term * (img ** k)
            result = result + term
        return result

    def min_exponents(self) -> tuple:
        if not self.terms:
            return (0,) * self.n
        return tuple(min(e[i] for e in self.terms) for i in range(self.n))

    def total_degrees(self) -> tuple[int, int]:
        degs = [sum(e) for e in self.terms]
        return (min(degs), max(degs)) if degs else (0, 0)

    def extend(self, n_new: int, offset: int = 0):
        """Reinterpret in a ring with ``n_new`` variables, old variable i becoming i+offset."""
        pad_left, pad_right = offset, n_new - self.n - offset
        return type(self)(n_new, {(0,) * pad_left + e + (0,) * pad_right: c for e, c in self.terms.items()})

    def permute_variables(self, perm: Sequence[int]):
        """Rename t_i to t_{perm[i-1]} (1-based)."""
        out = {}
        for e, c in self.terms.items():
            new = [0] * self.n
            for i, k in enumerate(e):
                new[perm[i] - 1] = k
            out[tuple(new)] = c
        return self._new(out)

    # -- printing -----------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda ec: (-sum(ec[0]), tuple(-x for x in ec[0])))

    def __str__(self):
        return render(self, self.var_name)

    def __repr__(self):
        return f"{type(self).__name__}({self.n}, '{self}')"


class Poly(LaurentPoly):
    """Polynomial in x_1..x_n, optionally truncated above total degree ``trunc``.

    A truncated ``Poly`` stands for a power series known modulo m^(trunc+1).
    """

    __slots__ = ("trunc",)
    var_name = "x"

    def __init__(self, n: int, terms: dict | None = None, trunc: int | None = None):
        super().__init__(n, terms)
        if any(x < 0 for e in self.terms for x in e):
            raise ValueError("Poly exponents must be nonnegative")
        self.trunc = trunc
        if trunc is not None:
            self.terms = {e: c for e, c in self.terms.items() if sum(e) <= trunc}

    def _copy_extra(self, obj):
        obj.trunc = self.trunc

    @classmethod
    def zero(cls, n: int, trunc: int | None = None):
        return cls(n, None, trunc)

    @classmethod
    def one(cls, n: int, trunc: int | None = None):
        return cls(n, {(0,) * n: 1}, trunc)

    @classmethod
    def constant(cls, n: int, c, trunc: int | None = None):
        return cls(n, {(0,) * n: c}, trunc)

    def _result(self, terms, other):
        trunc = self.trunc
        if isinstance(other, Poly) and other.trunc is not None:
            trunc = other.trunc if trunc is None else min(trunc, other.trunc)
        if trunc is not None:
            terms = {e: c for e, c in terms.items() if sum(e) <= trunc}
        obj = self._new({e: _norm_coeff(c) for e, c in terms.items()})
        obj.trunc = trunc
        return obj

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        trunc = self.trunc
        if isinstance(other, Poly) and other.trunc is not None:
            trunc = other.trunc if trunc is None else min(trunc, other.trunc)
        if not self.terms or not other.terms:
            return self._result({}, other)
        terms: dict = {}
        get = terms.get
        items2 = [(e, c, sum(e)) for e, c in other.terms.items()]
        for e1, c1 in self.terms.items():
            d1 = sum(e1)
            for e2, c2, d2 in items2:
                if trunc is not None and d1 + d2 > trunc:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = get(e, 0) + c1 * c2
        return self._result(_clean(terms), other)

    __rmul__ = __mul__

    def truncate(self, D: int):
        obj = self._new({e: c for e, c in self.terms.items() if sum(e) <= D})
        obj.trunc = D if self.trunc is None else min(D, self.trunc)
        return obj

    def lowest_degree(self) -> int | None:
        return min((sum(e) for e in self.terms), default=None)

    def homogeneous_part(self, d: int):
        return self._new({e: c for e, c in self.terms.items() if sum(e) == d})

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.n == other.n and self.terms == other.terms
        return super().__eq__(other)

    __hash__ = LaurentPoly.__hash__


# -- rendering and parsing -----------------------------------------------

def _render_coeff(c) -> str:
    return str(c)


def render(p: LaurentPoly, var: str = "t") -> str:
    """Canonical text: terms by descending total degree, then lex; explicit signs."""
    if not p.terms:
        return "0"
    pieces = []
    for e, c in p.sorted_terms():
        factors = []
        for i, k in enumerate(e, start=1):
            if k == 1:
                factors.append(f"{var}{i}")
            elif k != 0:
                factors.append(f"{var}{i}^{k}")
        mono = "*".join(factors)
        sign = "-" if c < 0 else "+"
        a = -c if c < 0 else c
        if not mono:
            body = _render_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_render_coeff(a)}*{mono}"
        pieces.append((sign, body))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


_FACTOR_RE = re.compile(r"^([a-zA-Z])(\d+)(?:\^(-?\d+))?$")


def _split_terms(text: str) -> list[tuple[int, str]]:
    out = []
    i, sign, buf = 0, 1, ""
    text = text.strip()
    while i < len(text):
        ch = text[i]
        if ch in "+-" and (not buf.strip() or buf.rstrip()[-1] != "^"):
            if buf.strip():
                out.append((sign, buf.strip()))
                buf = ""
            sign = 1 if ch == "+" else -1
        else:
            buf += ch
        i += 1
    if buf.strip():
        out.append((sign, buf.strip()))
    return out


def parse_poly(text: str, n: int, cls=LaurentPoly, **kwargs) -> LaurentPoly:
    """Parse the canonical rendering (``2*t1^-1*t2 - t3 + 1``) back into a polynomial."""
    text = text.strip()
    if text == "0":
        return cls(n, None, **kwargs)
    terms: dict = {}
    for sign, body in _split_terms(text):
        coeff = Fraction(1)
        exps = [0] * n
        for factor in body.replace(" ", "").split("*"):
            m = _FACTOR_RE.match(factor)
            if m:
                i = int(m.group(2))
                if not 1 <= i <= n:
                    raise ValueError(f"variable index {i} out of range in {text!r}")
                exps[i - 1] += int(m.group(3) or 1)
            else:
                try:
                    coeff *= Fraction(factor)
                except ValueError:
                    raise ValueError(f"cannot parse factor {factor!r} in {text!r}") from None
        e = tuple(exps)
        terms[e] = terms.get(e, 0) + sign * coeff
    return cls(n, {e: _norm_coeff(c) for e, c in terms.items() if c != 0}, **kwargs)


# -- matrices -------------------------------------------------------------

class RingMatrix:
    """Dense matrix of ring elements acting on row vectors from the right.

    The matrix of a composite ``B o A`` is ``A @ B``.  ``rows``/``cols`` are
    optional basis labels.
    """

    __slots__ = ("entries", "row_labels", "col_labels", "n", "kind")

    def __init__(self, entries: list[list[LaurentPoly]], n: int, row_labels=None, col_labels=None, kind=LaurentPoly):
        self.entries = entries
        self.n = n
        self.kind = kind
        nrows = len(entries)
        ncols = len(entries[0]) if entries else (len(col_labels) if col_labels is not None else 0)
        if any(len(r) != ncols for r in entries):
            raise ValueError("ragged matrix")
        self.row_labels = list(row_labels) if row_labels is not None else list(range(nrows))
        self.col_labels = list(col_labels) if col_labels is not None else list(range(ncols))
        if len(self.row_labels) != nrows or len(self.col_labels) != ncols:
            raise ValueError("label count does not match matrix shape")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_labels), len(self.col_labels)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, n: int, kind=LaurentPoly, row_labels=None, col_labels=None):
        z = kind.zero(n)
        return cls([[z] * ncols for _ in range(nrows)], n, row_labels, col_labels, kind)

    @classmethod
    def identity(cls, size: int, n: int, kind=LaurentPoly, labels=None):
        z, o = kind.zero(n), kind.one(n)
        rows = [[o if i == j else z for j in range(size)] for i in range(size)]
        return cls(rows, n, labels, labels, kind)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i):
        return self.entries[i]

    def __matmul__(self, other: "RingMatrix") -> "RingMatrix":
        a, b = self.shape
        b2, c = other.shape
        if b != b2:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        zero = other.kind.zero(self.n) if other.kind is not LaurentPoly else self.kind.zero(self.n)
        cols_nz = [[(k, other.entries[k][j]) for k in range(b) if other.entries[k][j]] for j in range(c)]
        out = []
        for i in range(a):
            row = self.entries[i]
            nz = {k for k in range(b) if row[k]}
            new_row = []
            for j in range(c):
                acc = zero
                for k, v in cols_nz[j]:
                    if k in nz:
                        acc = acc + row[k] * v
                new_row.append(acc)
            out.append(new_row)
        return RingMatrix(out, self.n, self.row_labels, other.col_labels, self.kind)

    def __add__(self, other):
        self._check_same(other)
        return RingMatrix([[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
                          self.n, self.row_labels, self.col_labels, self.kind)

    def __sub__(self, other):
        self._check_same(other)
        return RingMatrix([[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
                          self.n, self.row_labels, self.col_labels, self.kind)

    def __neg__(self):
        return self.map(lambda x: -x)

    def _check_same(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __eq__(self, other):
        if not isinstance(other, RingMatrix):
            return NotImplemented
        return self.shape == other.shape and all(
            x == y for r1, r2 in zip(self.entries, other.entries) for x, y in zip(r1, r2))

    def map(self, f, kind=None, n=None):
        rows = [[f(x) for x in r] for r in self.entries]
        n = self.n if n is None else n
        return RingMatrix(rows, n, self.row_labels, self.col_labels, kind or self.kind)

    def transpose(self):
        a, b = self.shape
        return RingMatrix([[self.entries[i][j] for i in range(a)] for j in range(b)], self.n,
                          self.col_labels, self.row_labels, self.kind)

    def select(self, rows=None, cols=None):
        ri = range(self.shape[0]) if rows is None else rows
        ci = range(self.shape[1]) if cols is None else cols
        return RingMatrix([[self.entries[i][j] for j in ci] for i in ri], self.n,
                          [self.row_labels[i] for i in ri], [self.col_labels[j] for j in ci], self.kind)

    def stack(self, other):
        if self.shape[1] != other.shape[1]:
            raise ValueError("column count mismatch")
        return RingMatrix(self.entries + other.entries, self.n, self.row_labels + other.row_labels,
                          self.col_labels, self.kind)

    def evaluate_at_one(self) -> list[list]:
        return [[x.evaluate_at_one() for x in r] for r in self.entries]

    def is_identity(self) -> bool:
        a, b = self.shape
        return a == b and all(self.entries[i][j] == (1 if i == j else 0) for i in range(a) for j in range(b))

    def __repr__(self):
        return f"RingMatrix({self.shape[0]}x{self.shape[1]}, n={self.n})"

    def __str__(self):
        return "\n".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.entries)


def matrix_from_rows(rows: Iterable[Iterable], n: int, kind=LaurentPoly, **labels) -> RingMatrix:
    """Build a matrix, coercing int entries into the ring."""
    out = []
    for r in rows:
        out.append([x if isinstance(x, LaurentPoly) else kind.constant(n, x) if x else kind.zero(n) for x in r])
    return RingMatrix(out, n, kind=kind, **labels)


# -- operations ----------------------------------------------------------

def clear_units(m: RingMatrix) -> RingMatrix:
    """Multiply every row by the least monomial making all its entries polynomial."""
    out = []
    for row in m.entries:
        lows = [min((e[i] for x in row for e in x.terms), default=0) for i in range(m.n)]
        shift = tuple(max(0, -k) for k in lows)
        out.append([x.shift(shift) if any(shift) else x for x in row])
    return RingMatrix(out, m.n, m.row_labels, m.col_labels, m.kind)


@lru_cache(maxsize=None)
def _one_minus_x_power(n: int, i: int, k: int, trunc: int | None) -> Poly:
    base = Poly(n, {(0,) * n: 1, tuple(1 if j == i else 0 for j in range(n)): -1}, trunc)
    return base ** k if k else Poly.one(n, trunc)


@lru_cache(maxsize=None)
def _geometric_power(n: int, i: int, k: int, trunc: int) -> Poly:
    """(1 - x_i)^(-k) truncated: coefficients are binomial(j+k-1, k-1)."""
    from math import comb
    terms = {tuple(j if l == i else 0 for l in range(n)): comb(j + k - 1, k - 1) for j in range(trunc + 1)}
    return Poly(n, terms, trunc)


def _substitute_term(e: tuple, c, n: int, trunc: int | None) -> Poly:
    term = Poly.constant(n, c, trunc)
    for i, k in enumerate(e):
        if k > 0:
            term = term * _one_minus_x_power(n, i, k, trunc)
        elif k < 0:
            if trunc is None:
                raise ValueError("negative exponent: clear units before the Magnus substitution")
            term = term * _geometric_power(n, i, -k, trunc)
    return term


def magnus_poly(p: LaurentPoly, trunc: int | None = None) -> Poly:
    """t_i -> 1 - x_i.  Without ``trunc`` the input must be an honest polynomial."""
    if trunc is None and p.has_negative_exponents():
        raise ValueError(f"entry {p} has negative exponents; call clear_units first")
    out: dict = {}
    for e, c in p.terms.items():
        for e2, c2 in _substitute_term(e, c, p.n, trunc).terms.items():
            out[e2] = out.get(e2, 0) + c2
    return Poly(p.n, _clean(out), trunc)


def magnus_substitute(m: RingMatrix, trunc: int | None = None) -> RingMatrix:
    """Apply the Magnus embedding entrywise (exact expansion, optional truncation)."""
    return m.map(lambda x: magnus_poly(x, trunc), kind=Poly)


def laurent_to_series(p: LaurentPoly, trunc: int) -> Poly:
    """Image of a Laurent polynomial in the power series ring modulo m^(trunc+1)."""
    return magnus_poly(p, trunc)


def truncated_inverse(m: RingMatrix, trunc: int) -> RingMatrix:
    """Inverse modulo m^(trunc+1) of a square matrix congruent to the identity mod m."""
    a, b = m.shape
    if a != b:
        raise ValueError("matrix must be square")
    n = m.n
    for i in range(a):
        for j in range(b):
            c = m.entries[i][j].constant_term() if m.entries[i][j] else 0
            if c != (1 if i == j else 0):
                raise ValueError("not unipotent at origin: constant term is not the identity")
    ident = RingMatrix.identity(a, n, Poly, m.row_labels)
    ident = ident.map(lambda x: Poly(n, x.terms, trunc), kind=Poly)
    nil = (ident - m.map(lambda x: Poly(n, x.terms, trunc) if not isinstance(x, Poly) else x.truncate(trunc), kind=Poly))
    result, power = ident, ident
    for _ in range(trunc):
        power = power @ nil
        if all(not x for r in power.entries for x in r):
            break
        result = result + power
    return RingMatrix(result.entries, n, m.col_labels, m.row_labels, Poly)


def exponent_vectors(n: int, degree: int) -> list[tuple]:
    """All exponent vectors of total degree ``degree`` (deterministic order)."""
    if n == 0:
        return [()] if degree == 0 else []
    out = []
    for first in range(degree, -1, -1):
        for rest in exponent_vectors(n - 1, degree - first):
            out.append((first,) + rest)
    return out


def unit_pivot_inverse(m: RingMatrix) -> RingMatrix:
    """Exact inverse over the group ring by Gauss-Jordan elimination.

    Only units (signed monomials) are used as pivots, so no localization
    ever happens; if some column has no unit available the matrix is
    reported as not invertible by this method.
    """
    size, cols = m.shape
    if size != cols:
        raise ValueError("matrix must be square")
    n = m.n
    zero, one = m.kind.zero(n), m.kind.one(n)
    a = [list(r) for r in m.entries]
    b = [[one if i == j else zero for j in range(size)] for i in range(size)]
    for col in range(size):
        piv = None
        if a[col][col].is_unit():
            piv = col
        else:
            for r in range(col + 1, size):
                if a[r][col].is_unit():
                    piv = r
                    break
        if piv is None:
            raise ValueError(f"no unit pivot in column {m.col_labels[col]}")
        a[col], a[piv] = a[piv], a[col]
        b[col], b[piv] = b[piv], b[col]
        inv = a[col][col].inverse_unit()
        a[col] = [x * inv if x else x for x in a[col]]
        b[col] = [x * inv if x else x for x in b[col]]
        for r in range(size):
            f = a[r][col]
            if r == col or not f:
                continue
            a[r] = [x - f * y if y else x for x, y in zip(a[r], a[col])]
            b[r] = [x - f * y if y else x for x, y in zip(b[r], b[col])]
    return RingMatrix(b, n, m.col_labels, m.row_labels, m.kind)
