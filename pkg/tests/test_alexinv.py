from itertools import combinations
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alexarr.alexinv import (Presentation, alexander_matrix, complement_generators, free_group_presentation,
                             phi_conj, phi_V, presentation_completed_reduced, presentation_cone,
                             presentation_general, presentation_product, presentation_pure_link,
                             presentation_real)
from alexarr.braidrep import (BraidWord, ConjugatedTwist, exterior_power, gassner_conj, gassner_twist, gassner_word,
                              twist_tuple, twist_word)
from alexarr.chenranks import chen_ranks, theta_free
from alexarr.exactring import RingMatrix
from alexarr.koszul import differential
from strategies import braid_words, conj_tuples
import _shared


def ident(n):
    return RingMatrix.identity(n, n)


def zero_at_one(m: RingMatrix) -> bool:
    return all(not v for row in m.evaluate_at_one() for v in row)


# -- Phi maps ------------------------------------------------------------------------------

@settings(max_examples=500, deadline=None)
@given(conj_tuples(3))
def test_phi_of_conjugating_tuple_lifts_id_minus_theta(z):
    assert phi_conj(z) @ differential(3, 2) == ident(3) - gassner_conj(z)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_full_phi_V_lifts_id_minus_twist(n):
    d2 = differential(n, 2)
    for size in range(2, n + 1):
        for V in combinations(range(1, n + 1), size):
            lhs = phi_V(V, n, full=True) @ d2
            assert lhs == ident(n) - gassner_word(twist_word(V, n)), V


@pytest.mark.parametrize("V,n", [((1, 2), 3), ((1, 3), 3), ((1, 2, 3), 3), ((2, 4), 4), ((1, 3, 4), 5)])
def test_two_lifts_of_a_twist_differ_by_a_cycle(V, n):
    # both lift id - Theta(A_V); they agree modulo ker d_2 = im d_3
    diff = phi_conj(twist_tuple(V, n)) - phi_V(V, n, full=True)
    assert all(not x for r in (diff @ differential(n, 2)).entries for x in r)


@settings(max_examples=500, deadline=None)
@given(st.sets(st.integers(1, 4), min_size=2), braid_words(4, 3))
def test_conjugated_phi_rows(V, delta):
    # Phi_V Theta_2(delta) d_2 = rows V' of (id - Theta(A_V)) Theta(delta)
    n = 4
    V = tuple(sorted(V))
    th = gassner_word(delta)
    lhs = phi_V(V, n) @ exterior_power(th, 2) @ differential(n, 2)
    full = (ident(n) - gassner_word(twist_word(V, n))) @ th
    assert lhs.entries == [full.entries[i - 1] for i in V[1:]]


def test_phi_V_needs_two_elements():
    with pytest.raises(ValueError):
        phi_V((2,), 3)


# -- arrangement presentations --------------------------------------------------------------

def test_free_group_presentation_shape():
    assert free_group_presentation(4).shape() == (4, 6)
    assert free_group_presentation(2).shape() == (0, 1)


def test_diamond_shapes():
    gen = _shared.presentation("diamond", "general")
    real = _shared.presentation("diamond", "real")
    assert gen.shape() == (29, 15)
    assert real.shape() == (20, 6)


def test_real_presentation_vanishes_at_one():
    for name in ("sixlines", "braid_a4", "diamond"):
        p = _shared.presentation(name, "real")
        assert p.num_relations == comb(p.n, 3)
        assert zero_at_one(p.matrix)


def test_general_presentation_d3_rows_vanish_at_one():
    p = _shared.presentation("diamond", "general")
    rows = [i for i, lab in enumerate(p.relation_labels) if lab.startswith("d3")]
    assert len(rows) == comb(p.n, 3)
    assert zero_at_one(p.matrix.select(rows=rows))


def test_complement_generators_count():
    # |L_0| = C(n,2) - sum (|V| - 1)
    sets = [(1, 2, 3), (3, 4, 5), (1, 4)]
    assert len(complement_generators(sets, 5)) == comb(5, 2) - 2 - 2 - 1


def test_pencil_real_presentation_is_free():
    # three concurrent lines: the complement group is F_2 x Z
    n = 3
    p = presentation_real([ConjugatedTwist((1, 2, 3), BraidWord(n))], n)
    assert p.num_generators == 1
    theta = chen_ranks(p, 7).theta
    assert [theta[k] for k in range(2, 8)] == [theta_free(2, k) for k in range(2, 8)]


def test_real_presentation_rejects_doubly_covered_pairs():
    n = 4
    tws = [ConjugatedTwist((1, 2, 3), BraidWord(n)), ConjugatedTwist((1, 2), BraidWord(n))]
    with pytest.raises(ValueError, match="covered twice"):
        presentation_real(tws, n)


def test_reduced_presentation_needs_partition():
    n = 4
    with pytest.raises(ValueError, match="never covered"):
        presentation_completed_reduced([ConjugatedTwist((1, 2, 3), BraidWord(n))], n, 3)


def test_reduced_presentation_shape():
    p = _shared.presentation("sixlines", "reduced", 4)
    rm = _shared.monodromy("sixlines", "generic")
    assert p.ring == "P4" and p.truncation == 4
    assert p.shape() == (comb(rm.n, 3), len(complement_generators([t.V for t in rm.twists], rm.n)))


def test_pure_link_matches_general_for_untwisted():
    n = 4
    sets = [(1, 2, 3), (1, 4), (2, 4), (3, 4)]
    pl = presentation_pure_link([twist_tuple(V, n) for V in sets])
    gen = presentation_general([ConjugatedTwist(V, BraidWord(n)) for V in sets], n)
    assert chen_ranks(pl, 6).theta == chen_ranks(gen, 6).theta


def test_pure_link_needs_input():
    with pytest.raises(ValueError):
        presentation_pure_link([])


# -- products and cones ---------------------------------------------------------------------

def test_product_shape_and_variables():
    p = presentation_product(free_group_presentation(2), free_group_presentation(3))
    assert p.n == 5
    # (0 + 1*3) + (1 + 3*2) relations over 1 + 3 generators
    assert p.shape() == (10, 4)


def test_cone_adds_a_variable_and_keeps_theta():
    p = _shared.presentation("sixlines", "real")
    c = presentation_cone(p)
    assert c.n == p.n + 1
    assert c.num_relations == p.num_relations + p.num_generators
    assert chen_ranks(c, 6).theta == chen_ranks(p, 6).theta


def test_cone_rejects_truncated_input():
    with pytest.raises(ValueError):
        presentation_cone(_shared.presentation("sixlines", "reduced", 3))


# -- Alexander matrix ---------------------------------------------------------------------

def test_alexander_matrix_shape_and_value_at_one():
    rm = _shared.monodromy("sixlines")
    p = alexander_matrix(rm.twists, rm.n)
    s = len(rm.twists)
    assert p.shape() == (s * rm.n, rm.n)
    assert zero_at_one(p.matrix)


def test_alexander_matrix_block_is_id_minus_theta():
    n = 3
    tw = ConjugatedTwist((1, 3), BraidWord(n, (((1, 2), 1),)))
    p = alexander_matrix([tw], n)
    assert p.matrix.entries == (ident(n) - gassner_twist(tw)).entries


# -- text format ---------------------------------------------------------------------------

@pytest.mark.parametrize("name,kind", [("sixlines", "real"), ("sixlines", "general"), ("sixlines", "reduced")])
def test_dumps_loads_round_trip(name, kind):
    p = _shared.presentation(name, kind, 3)
    q = Presentation.loads(p.dumps())
    assert q.matrix.entries == p.matrix.entries
    assert q.ring == p.ring
    assert q.generator_labels == p.generator_labels
    assert q.relation_labels == p.relation_labels


def test_expected_values_round_trip():
    p = Presentation(free_group_presentation(3).matrix, expected=((2, 3), (3, 8)))
    text = p.dumps()
    assert "expect 2=3 3=8" in text
    assert Presentation.loads(text).expected == ((2, 3), (3, 8))


def test_loads_reports_line_numbers():
    bad = "presentation\nring Lambda\nvariables 2\ngenerators e{1,2}\nrelation r :: t1 ; t2\n"
    with pytest.raises(ValueError, match="line 5"):
        Presentation.loads(bad)
    with pytest.raises(ValueError, match="missing"):
        Presentation.loads("presentation\n")
