"""Free-group words and Fox free differential calculus.

Words live in the free group on t_1..t_n.  ``fox_gradient`` returns the
honest (non-abelian) gradient as formal integer combinations of words; the
abelianized gradient, which is all downstream code needs, is computed in a
single pass that carries the running prefix as a monomial exponent vector.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .exactring import LaurentPoly


def _reduce(letters: Iterable[tuple[int, int]]) -> tuple:
    stack: list = []
    for g, e in letters:
        if stack and stack[-1][0] == g and stack[-1][1] == -e:
            stack.pop()
        else:
            stack.append((g, e))
    return tuple(stack)


@dataclass(frozen=True)
class FreeWord:
    """Freely reduced word; ``letters`` is a tuple of (generator, +-1)."""

    n: int
    letters: tuple = ()

    def __post_init__(self):
        for g, e in self.letters:
            if not 1 <= g <= self.n or e not in (1, -1):
                raise ValueError(f"bad letter {(g, e)} for rank {self.n}")
        object.__setattr__(self, "letters", _reduce(self.letters))

    @classmethod
    def identity(cls, n: int) -> "FreeWord":
        return cls(n, ())

    @classmethod
    def gen(cls, n: int, i: int, e: int = 1) -> "FreeWord":
        return cls(n, ((i, e),))

    @classmethod
    def product_of(cls, n: int, gens: Iterable[int]) -> "FreeWord":
        """t_{i1} t_{i2} ... in the given order (t_V for an ordered V)."""
        return cls(n, tuple((i, 1) for i in gens))

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord(self.n, self.letters + other.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(self.n, tuple((g, -e) for g, e in reversed(self.letters)))

    def __pow__(self, k: int) -> "FreeWord":
        base = self if k >= 0 else self.inverse()
        return FreeWord(self.n, base.letters * abs(k))

    def commutator(self, other: "FreeWord") -> "FreeWord":
        """[a, b] = a b a^-1 b^-1."""
        return self * other * self.inverse() * other.inverse()

    def is_identity(self) -> bool:
        return not self.letters

    def __len__(self):
        return len(self.letters)

    def exponent_sum(self) -> tuple:
        e = [0] * self.n
        for g, s in self.letters:
            e[g - 1] += s
        return tuple(e)

    def abelianize(self) -> LaurentPoly:
        return LaurentPoly.monomial(self.n, self.exponent_sum())

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join(f"t{g}" if e == 1 else f"t{g}^-1" for g, e in self.letters)


# -- group ring of the free group (for the unabelianized gradient) ----------

def _gr_add(acc: dict, word: FreeWord, c: int):
    v = acc.get(word, 0) + c
    if v:
        acc[word] = v
    else:
        acc.pop(word, None)


def fox_gradient(w: FreeWord) -> list[dict]:
    """Fox gradient: component i is {word: coefficient} representing dw/dt_i."""
    comps: list[dict] = [dict() for _ in range(w.n)]
    prefix = FreeWord.identity(w.n)
    for g, e in w.letters:
        if e == 1:
            _gr_add(comps[g - 1], prefix, 1)
            prefix = prefix * FreeWord.gen(w.n, g)
        else:
            prefix = prefix * FreeWord.gen(w.n, g, -1)
            _gr_add(comps[g - 1], prefix, -1)
    return comps


def group_ring_times_generator_minus_one(elt: dict, i: int, n: int) -> dict:
    """elt * (t_i - 1) in the free group ring."""
    out: dict = {}
    for word, c in elt.items():
        _gr_add(out, word * FreeWord.gen(n, i), c)
        _gr_add(out, word, -c)
    return out


def abelianize_group_ring(elt: dict, n: int) -> LaurentPoly:
    return LaurentPoly(n, _sum_terms((w.exponent_sum(), c) for w, c in elt.items()))


def _sum_terms(pairs) -> dict:
    out: dict = {}
    for e, c in pairs:
        out[e] = out.get(e, 0) + c
    return out


def abelianized_gradient(w: FreeWord) -> list[LaurentPoly]:
    """The abelianized Fox gradient as n Laurent polynomials (coefficients of e_i)."""
    acc: list[dict] = [dict() for _ in range(w.n)]
    prefix = [0] * w.n
    for g, e in w.letters:
        if e == 1:
            key = tuple(prefix)
            acc[g - 1][key] = acc[g - 1].get(key, 0) + 1
            prefix[g - 1] += 1
        else:
            prefix[g - 1] -= 1
            key = tuple(prefix)
            acc[g - 1][key] = acc[g - 1].get(key, 0) - 1
    return [LaurentPoly(w.n, a) for a in acc]


# -- parsing -----------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(\[|\]|,|t(\d+)(?:\^(-?\d+))?|1(?![0-9]))")


def parse_word(text: str, n: int) -> FreeWord:
    """Parse ``t1 t2 t1^-1``; ``[a,b]`` denotes the commutator a b a^-1 b^-1.

    Brackets nest, and ``1`` stands for the identity.
    """
    pos = 0
    text = text.strip()

    def parse_seq(stop: set) -> FreeWord:
        nonlocal pos
        word = FreeWord.identity(n)
        while True:
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                if pos >= len(text) or not text[pos:].strip():
                    return word
                raise ValueError(f"cannot parse word at {text[pos:]!r}")
            tok = m.group(1)
            if tok in stop:
                return word
            pos = m.end()
            if tok == "[":
                a = parse_seq({","})
                _expect(",")
                b = parse_seq({"]"})
                _expect("]")
                word = word * a.commutator(b)
            elif tok == "1":
                continue
            elif tok in ",]":
                raise ValueError(f"unexpected {tok!r} in {text!r}")
            else:
                g = int(m.group(2))
                k = int(m.group(3) or 1)
                word = word * FreeWord.gen(n, g) ** k

    def _expect(ch: str):
        nonlocal pos
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.group(1) != ch:
            raise ValueError(f"expected {ch!r} in {text!r}")
        pos = m.end()

    word = parse_seq(set())
    if text[pos:].strip():
        raise ValueError(f"trailing input {text[pos:]!r}")
    return word
