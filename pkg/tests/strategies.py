"""Hypothesis strategies for ring elements, words and braids."""

from hypothesis import strategies as st

from alexarr.braidrep import BraidWord, ConjTuple
from alexarr.exactring import LaurentPoly, Poly
from alexarr.freefox import FreeWord


def laurent(n: int, max_terms: int = 4, lo: int = -2, hi: int = 2):
    exps = st.tuples(*[st.integers(lo, hi)] * n)
    return st.dictionaries(exps, st.integers(-4, 4), max_size=max_terms).map(lambda d: LaurentPoly(n, d))


def polys(n: int, max_terms: int = 4, max_exp: int = 2):
    exps = st.tuples(*[st.integers(0, max_exp)] * n)
    return st.dictionaries(exps, st.integers(-4, 4), max_size=max_terms).map(lambda d: Poly(n, d))


def free_words(n: int, max_len: int = 30):
    letter = st.tuples(st.integers(1, n), st.sampled_from((1, -1)))
    return st.lists(letter, max_size=max_len).map(lambda ls: FreeWord(n, tuple(ls)))


def braid_words(n: int, max_len: int = 4):
    pair = st.tuples(st.integers(1, n), st.integers(1, n)).filter(lambda p: p[0] < p[1])
    letter = st.tuples(pair, st.sampled_from((1, -1)))
    return st.lists(letter, max_size=max_len).map(lambda ls: BraidWord(n, tuple(ls)))


def conj_tuples(n: int, max_len: int = 6):
    return st.lists(free_words(n, max_len), min_size=n, max_size=n).map(lambda ws: ConjTuple(tuple(ws)))
