"""Pure braids, basis-conjugating automorphisms and the Gassner representation.

Convention: matrices act on row vectors from the right, so a braid word
``b1 b2 ... bm`` is sent to ``Theta(b1) @ Theta(b2) @ ... @ Theta(bm)``.
Concretely, row i of Theta(alpha) is the abelianized Fox gradient of the
image of t_i, and the automorphism of a word applies its letters left to
right (the image of t_i under ``b1 b2`` is ``b2`` applied to ``b1(t_i)``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations

from .exactring import LaurentPoly, RingMatrix
from .freefox import FreeWord, abelianized_gradient
from .koszul import label, nabla_V, t_prod, wedge_basis


@dataclass(frozen=True)
class BraidWord:
    """Word in the pure braid generators A_{i,j}^{+-1}, i<j."""

    n: int
    letters: tuple = ()

    def __post_init__(self):
        norm = []
        for (i, j), e in self.letters:
            if i > j:
                i, j = j, i
            if not (1 <= i < j <= self.n) or e not in (1, -1):
                raise ValueError(f"bad braid letter A[{i},{j}]^{e} on {self.n} strands")
            norm.append(((i, j), e))
        object.__setattr__(self, "letters", tuple(norm))

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        return BraidWord(self.n, self.letters + other.letters)

    def inverse(self) -> "BraidWord":
        return BraidWord(self.n, tuple((p, -e) for p, e in reversed(self.letters)))

    def is_identity(self) -> bool:
        return not self.letters

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join(f"A[{i},{j}]" + ("" if e == 1 else "^-1") for (i, j), e in self.letters)


@dataclass(frozen=True)
class ConjugatedTwist:
    """The braid monodromy generator A_V^delta = delta^-1 A_V delta."""

    V: tuple
    delta: BraidWord

    def __post_init__(self):
        V = tuple(sorted(set(self.V)))
        if len(V) < 2:
            raise ValueError(f"twist needs |V| >= 2, got {self.V}")
        if len(V) != len(self.V):
            raise ValueError(f"repeated index in {self.V}")
        object.__setattr__(self, "V", V)

    @property
    def n(self) -> int:
        return self.delta.n

    def __str__(self):
        head = "T{" + ",".join(map(str, self.V)) + "}"
        return head if self.delta.is_identity() else f"{head} ^ ({self.delta})"


@dataclass(frozen=True)
class ConjTuple:
    """z = (z_1..z_n) defining gamma_z(t_i) = z_i t_i z_i^-1."""

    words: tuple = field(default_factory=tuple)

    @property
    def n(self) -> int:
        return len(self.words)

    @classmethod
    def trivial(cls, n: int) -> "ConjTuple":
        return cls(tuple(FreeWord.identity(n) for _ in range(n)))

    def images(self) -> list[FreeWord]:
        n = self.n
        return [z * FreeWord.gen(n, i) * z.inverse() for i, z in enumerate(self.words, start=1)]

    @classmethod
    def from_images(cls, images) -> "ConjTuple":
        """Recover z from the images of the generators.

        Raises ValueError if some image is not a conjugate of its own
        generator, i.e. the automorphism is not basis-conjugating.
        """
        n = len(images)
        zs = []
        for i, img in enumerate(images, start=1):
            letters = img.letters
            k = 0
            while 2 * k + 1 < len(letters) and letters[k] == (letters[-1 - k][0], -letters[-1 - k][1]):
                k += 1
            if len(letters) != 2 * k + 1 or letters[k] != (i, 1):
                raise ValueError(f"image of t{i} ({img}) is not a conjugate of t{i}: "
                                 "only basis-conjugating automorphisms are supported")
            zs.append(FreeWord(n, letters[:k]))
        return cls(tuple(zs))


# -- words ----------------------------------------------------------------

def twist_word(V, n: int | None = None) -> BraidWord:
    """Full twist A_V = A_{i1 i2} (A_{i1 i3} A_{i2 i3}) ... on the strands of V."""
    V = sorted(V)
    if len(V) < 2:
        raise ValueError(f"twist needs |V| >= 2, got {V}")
    n = max(V) if n is None else n
    letters = []
    for b in range(1, len(V)):
        for a in range(b):
            letters.append(((V[a], V[b]), 1))
    return BraidWord(n, tuple(letters))


def twist_tuple(V, n: int) -> ConjTuple:
    """Conjugating tuple w with A_V = gamma_w."""
    V = sorted(V)
    if len(V) < 2:
        raise ValueError(f"twist needs |V| >= 2, got {V}")
    tV = FreeWord.product_of(n, V)
    words = []
    for i in range(1, n + 1):
        if i in V:
            words.append(tV)
        elif V[0] < i < V[-1]:
            below = FreeWord.product_of(n, [v for v in V if v < i])
            above = FreeWord.product_of(n, [v for v in V if v > i])
            words.append(below.commutator(above))
        else:
            words.append(FreeWord.identity(n))
    return ConjTuple(tuple(words))


# -- automorphisms of the free group ----------------------------------------

def substitute_word(w: FreeWord, images) -> FreeWord:
    out = FreeWord.identity(w.n)
    for g, e in w.letters:
        img = images[g - 1]
        out = out * (img if e == 1 else img.inverse())
    return out


@lru_cache(maxsize=None)
def generator_images(i: int, j: int, e: int, n: int) -> tuple:
    """Images of t_1..t_n under A_{i,j}^e."""
    z = twist_tuple((i, j), n)
    if e == 1:
        return tuple(z.images())
    tij = FreeWord.product_of(n, (i, j))
    c = FreeWord.gen(n, i).commutator(FreeWord.gen(n, j))
    d = tij.inverse() * c * tij
    out = []
    for k in range(1, n + 1):
        tk = FreeWord.gen(n, k)
        if k in (i, j):
            out.append(tij.inverse() * tk * tij)
        elif i < k < j:
            out.append(d.inverse() * tk * d)
        else:
            out.append(tk)
    return tuple(out)


def braid_images(b: BraidWord) -> list[FreeWord]:
    """Images of the generators under the automorphism of ``b`` (letters applied left to right)."""
    n = b.n
    images = [FreeWord.gen(n, k) for k in range(1, n + 1)]
    for (i, j), e in b.letters:
        g = generator_images(i, j, e, n)
        images = [substitute_word(w, g) for w in images]
    return images


# -- Gassner matrices -----------------------------------------------------------

def jacobian_of_images(images) -> RingMatrix:
    """Row i is the abelianized Fox gradient of the image of t_i."""
    n = len(images)
    return RingMatrix([abelianized_gradient(w) for w in images], n,
                      [label((i,)) for i in range(1, n + 1)], [label((i,)) for i in range(1, n + 1)])


def gassner_conj(z: ConjTuple) -> RingMatrix:
    """Theta(gamma_z): row i is (1 - t_i) grad(z_i) + z_i e_i."""
    n = z.n
    rows = []
    for i, zi in enumerate(z.words, start=1):
        g = abelianized_gradient(zi)
        fac = 1 - LaurentPoly.var(n, i)
        row = [fac * c if c else c for c in g]
        row[i - 1] = row[i - 1] + zi.abelianize()
        rows.append(row)
    labels = [label((i,)) for i in range(1, n + 1)]
    return RingMatrix(rows, n, labels, labels)


@lru_cache(maxsize=None)
def _generator_matrix(i: int, j: int, e: int, n: int) -> RingMatrix:
    if e == 1:
        return gassner_conj(twist_tuple((i, j), n))
    return jacobian_of_images(generator_images(i, j, e, n))


def gassner_word(b: BraidWord) -> RingMatrix:
    """Theta(b) as the ordered product of generator matrices."""
    m = RingMatrix.identity(b.n, b.n, labels=[label((i,)) for i in range(1, b.n + 1)])
    for (i, j), e in b.letters:
        m = m @ _generator_matrix(i, j, e, b.n)
    return m


def gassner_twist(t: ConjugatedTwist) -> RingMatrix:
    """Theta(A_V^delta) = Theta(delta)^-1 Theta(A_V) Theta(delta)."""
    n = t.n
    base = gassner_conj(twist_tuple(t.V, n))
    if t.delta.is_identity():
        return base
    return gassner_word(t.delta.inverse()) @ base @ gassner_word(t.delta)


# -- exterior powers ------------------------------------------------------------

def _perm_sign(p) -> int:
    sign, seen = 1, set()
    for s in range(len(p)):
        if s in seen:
            continue
        j, length = s, 0
        while j not in seen:
            seen.add(j)
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@lru_cache(maxsize=None)
def _signed_perms(k: int) -> tuple:
    return tuple((p, _perm_sign(p)) for p in permutations(range(k)))


def minor(m: RingMatrix, rows, cols):
    k = len(rows)
    zero = m.kind.zero(m.n)
    if k == 0:
        return m.kind.one(m.n)
    sub = [[m.entries[r][c] for c in cols] for r in rows]
    total = zero
    for p, s in _signed_perms(k):
        term = None
        for a in range(k):
            x = sub[a][p[a]]
            if not x:
                term = None
                break
            term = x if term is None else term * x
        if term is not None:
            total = total + term if s > 0 else total - term
    return total


def exterior_power(m: RingMatrix, k: int) -> RingMatrix:
    """k-th exterior power in the lexicographic increasing-subset basis."""
    size = m.shape[0]
    if m.shape[0] != m.shape[1]:
        raise ValueError("exterior_power needs a square matrix")
    if not 0 <= k <= size:
        raise ValueError(f"k={k} out of range 0..{size}")
    basis = wedge_basis(size, k)
    rows = []
    for J in basis:
        rows.append([minor(m, [j - 1 for j in J], [i - 1 for i in I]) for I in basis])
    labels = [label(J) for J in basis]
    return RingMatrix(rows, m.n, labels, labels, m.kind)


# -- mu_V ----------------------------------------------------------------------

def mu_matrix(V, n: int) -> tuple[RingMatrix, RingMatrix]:
    """Theta(mu_V) and its inverse over Lambda.

    mu_V sends t_{min V} to t_V and fixes the other generators, so its
    Gassner matrix differs from the identity only in row min V, which is
    nabla_V.  The inverse replaces that row by e_{i1} - sum_{l in V'} t_{V^l} e_l.
    """
    V = sorted(V)
    if not V:
        raise ValueError("V must be nonempty")
    ident = RingMatrix.identity(n, n, labels=[label((i,)) for i in range(1, n + 1)])
    fwd = [list(r) for r in ident.entries]
    inv = [list(r) for r in ident.entries]
    i1 = V[0]
    for (i,), c in nabla_V(V, n).items():
        fwd[i1 - 1][i - 1] = c
        if i != i1:
            inv[i1 - 1][i - 1] = -c
    return (RingMatrix(fwd, n, ident.row_labels, ident.col_labels),
            RingMatrix(inv, n, ident.row_labels, ident.col_labels))


def mu_substitution(V, n: int) -> list[LaurentPoly]:
    """Ring automorphism of Lambda induced by mu_V: t_{min V} -> t_V."""
    V = sorted(V)
    images = [LaurentPoly.var(n, i) for i in range(1, n + 1)]
    images[V[0] - 1] = t_prod(n, V)
    return images


# -- the W^{r,s} table (independent oracle for Theta_2(A_{r,s})) ---------------

def w_table(r: int, s: int, i: int, j: int, n: int) -> dict:
    """W^{r,s}_{i,j}: Theta_2(A_{r,s})(e_i^e_j) = e_i^e_j + W (for i<j, r<s).

    Written out case by case as an independent check on ``exterior_power``.
    Returns a sparse vector {2-subset: LaurentPoly}.
    """
    t = {a: LaurentPoly.var(n, a) for a in {r, s, i, j}}
    out: dict = {}

    def add(c, a, b):
        if a == b or not c:
            return
        K = (a, b) if a < b else (b, a)
        c = c if a < b else -c
        v = out.get(K, LaurentPoly.zero(n)) + c
        if v:
            out[K] = v
        else:
            out.pop(K, None)

    tr, ts, ti, tj = t[r], t[s], t[i], t[j]
    if i < j == r < s:
        add(tr * (ts - 1), i, r)
        add(tr * (1 - tr), i, s)
    elif i < r < j < s:
        add((1 - tj) * (1 - ts), i, r)
        add((1 - tj) * (tr - 1), i, s)
    elif i < r < j == s:
        add(tr - 1, i, s)
        add(1 - ts, i, r)
    elif i == r < j == s:
        add(tr * ts - 1, r, s)
    elif r < i < j == s:
        add(tr - 1, i, s)
        add(ts - 1, r, i)
        add((ts - 1) * (ti - 1), r, s)
    elif r < i < s < j:
        add((1 - ti) * (1 - ts), r, j)
        add((1 - ti) * (tr - 1), s, j)
    elif r == i < s < j:
        add(tr * (ts - 1), r, j)
        add(tr * (1 - tr), s, j)
    elif r < i == s < j:
        add(tr - 1, s, j)
        add(1 - ts, r, j)
    elif r == i < j < s:
        add(tr * (ts - 1), r, j)
        add((tr - 1) * tr, j, s)
        add((tr - 1) * (1 - tj), r, s)
    elif r < i < j < s:
        add((tj - 1) * (1 - ts), r, i)
        add((tj - 1) * (1 - tr), i, s)
        add((1 - ti) * (1 - ts), r, j)
        add((1 - ti) * (1 - tr), j, s)
    return out


# -- text syntax ---------------------------------------------------------------

_BRAID_TOKEN = re.compile(r"\s*A\[\s*(\d+)\s*,\s*(\d+)\s*\](?:\^(-?\d+))?")
_TWIST_RE = re.compile(r"^\s*T\{([\d,\s]+)\}\s*(?:\^\s*\((.*)\))?\s*$")


def parse_braid_word(text: str, n: int) -> BraidWord:
    """Parse ``A[1,2] A[1,3]^-1``; ``1`` or an empty string is the identity."""
    text = text.strip()
    if text in ("", "1"):
        return BraidWord(n)
    pos, letters = 0, []
    while pos < len(text):
        m = _BRAID_TOKEN.match(text, pos)
        if m is None:
            if not text[pos:].strip():
                break
            raise ValueError(f"cannot parse braid word at {text[pos:]!r}")
        i, j, k = int(m.group(1)), int(m.group(2)), int(m.group(3) or 1)
        letters.extend([((i, j), 1 if k > 0 else -1)] * abs(k))
        pos = m.end()
    return BraidWord(n, tuple(letters))


def parse_twist(text: str, n: int) -> ConjugatedTwist:
    """Parse ``T{1,3,6}`` or ``T{1,3,6} ^ (A[3,4] A[3,6])``."""
    m = _TWIST_RE.match(text)
    if m is None:
        raise ValueError(f"cannot parse conjugated twist {text!r}")
    V = tuple(int(x) for x in m.group(1).split(",") if x.strip())
    if any(not 1 <= v <= n for v in V):
        raise ValueError(f"twist indices {V} out of range 1..{n}")
    return ConjugatedTwist(V, parse_braid_word(m.group(2) or "", n))


def parse_monodromy(text: str) -> tuple[int, list[ConjugatedTwist]]:
    """Monodromy file: first line is the number of strands, then one twist per line."""
    n, twists = None, []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            try:
                n = int(line)
            except ValueError:
                raise ValueError(f"line {lineno}: expected the number of strands") from None
            if n < 1:
                raise ValueError(f"line {lineno}: number of strands must be positive")
            continue
        try:
            twists.append(parse_twist(line, n))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if n is None:
        raise ValueError("empty monodromy file")
    return n, twists


def dumps_monodromy(n: int, twists) -> str:
    return f"{n}\n" + "".join(f"{t}\n" for t in twists)
