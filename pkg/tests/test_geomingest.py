from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from alexarr.alexinv import presentation_general, presentation_real
from alexarr.braidrep import gassner_twist, parse_braid_word
from alexarr.chenranks import chen_ranks
from alexarr.geomingest import (AffineLineArrangement, CentralArrangement3, Frame, cone, decone, delta_from_above,
                                frame_problems, generic_chart, generic_frame, lattice2, parse_arrangement,
                                real_monodromy, wiring_diagram)
from alexarr.localcc import Lattice2
import _shared

PAPER_FRAME = ((-1, F(1, 10)), (F(1, 10), 1))


def proportional(p, q):
    return all(p[i] * q[j] == p[j] * q[i] for i in range(3) for j in range(3))


# -- lattices from geometry ------------------------------------------------------------------------

def test_six_line_lattice():
    expected = [(1, 2, 6), (1, 3, 5), (2, 3, 4), (1, 4), (2, 5), (4, 5), (3, 6), (4, 6), (5, 6)]
    assert set(lattice2(_shared.arrangement("sixlines")).vertex_sets) == set(expected)


def test_braid_lattice():
    expected = [(1, 2, 4), (1, 3, 5), (2, 3, 6), (3, 4), (2, 5), (4, 5, 6), (1, 6)]
    assert set(lattice2(_shared.arrangement("braid_a4")).vertex_sets) == set(expected)


def test_diamond_lattice():
    expected = [(3, 4, 5), (1, 2, 5), (1, 4), (1, 3, 6), (2, 4, 6), (1, 7), (2, 3, 7), (4, 7), (5, 6, 7)]
    assert set(lattice2(_shared.arrangement("diamond")).vertex_sets) == set(expected)


def test_two_generic_lines():
    a = AffineLineArrangement(((1, -1, 0), (1, 1, 0)))
    assert lattice2(a).vertex_sets == ((1, 2),)
    w = wiring_diagram(a)
    assert len(w.events) == 1 and w.events[0].J == ()


@pytest.mark.parametrize("name", _shared.ARRANGEMENTS)
def test_lattice_is_a_pair_partition(name):
    lattice2(_shared.arrangement(name)).check_partition()


def test_coincident_hyperplanes_rejected():
    with pytest.raises(ValueError, match="coincide"):
        CentralArrangement3(((1, 0, 0), (2, 0, 0)))
    with pytest.raises(ValueError, match="coincide"):
        AffineLineArrangement(((1, 1, 1), (2, 2, 2)))
    with pytest.raises(ValueError, match="zero normal"):
        AffineLineArrangement(((0, 0, 1),))


# -- deconing and coning ----------------------------------------------------------------------------

def test_decone_of_braid_arrangement():
    # z = 1 in xyz(x-y)(x-z)(y-z): x = 0, y = 0, x = y, x = 1, y = 1
    a = decone(_shared.arrangement("braid_a4"), 3)
    expected = [(1, 0, 0), (0, 1, 0), (1, -1, 0), (1, 0, 1), (0, 1, 1)]
    assert a.n == 5
    assert all(proportional(p, q) for p, q in zip(a.lines, expected))


def test_decone_of_diamond_has_six_lines():
    assert decone(_shared.arrangement("diamond"), 7).n == 6


def test_decone_rejects_missing_plane():
    with pytest.raises((ValueError, IndexError)):
        decone(_shared.arrangement("sixlines"), 9)


@pytest.mark.parametrize("name", _shared.ARRANGEMENTS)
def test_cone_of_decone_recovers_lattice(name):
    c = _shared.arrangement(name)
    plane = c.n
    coned = cone(decone(c, plane))
    assert set(lattice2(coned).vertex_sets) == set(lattice2(c).vertex_sets)


@pytest.mark.parametrize("name", ["sixlines", "braid_a4", "diamond"])
def test_generic_chart_keeps_the_lattice(name):
    c = _shared.arrangement(name)
    a = generic_chart(c)
    assert a.n == c.n
    assert set(lattice2(a).vertex_sets) == set(lattice2(c).vertex_sets)


# -- frames --------------------------------------------------------------------------------------

def test_generic_input_keeps_identity_frame():
    a = AffineLineArrangement(((1, -1, 0), (1, 1, 0), (0, 1, 1)))
    assert not frame_problems(a)
    _, fr = generic_frame(a)
    assert fr.matrix == ((1, 0), (0, 1))


def test_degenerate_projection_is_sheared():
    # vertices (0,0) and (0,1) share x = 0
    a = AffineLineArrangement(((1, -1, 0), (1, 1, 0), (1, -1, -1), (1, 1, 1)))
    assert frame_problems(a)
    with pytest.raises(ValueError, match="non-generic"):
        wiring_diagram(a)
    b, fr = generic_frame(a)
    assert fr.matrix != ((1, 0), (0, 1))
    assert not frame_problems(b)
    assert len(set(fr.projections)) == len(fr.projections)


def test_vertical_lines_are_reported():
    a = AffineLineArrangement(((1, 0, 0), (0, 1, 0)))
    assert any("vertical" in p for p in frame_problems(a))
    with pytest.raises(ValueError, match="not generic"):
        generic_frame(a, matrix=((1, 0), (0, 1)))


def test_diamond_in_the_literature_frame():
    rm = real_monodromy(_shared.arrangement("diamond"), 7, matrix=PAPER_FRAME)
    assert rm.wiring.strand_to_line == (1, 2, 3, 4, 5, 6)
    assert [tw.V for tw in rm.twists] == [(3, 4, 5), (1, 2, 5), (1, 4), (1, 3, 6), (2, 4, 6)]
    deltas = {tw.V: str(tw.delta) for tw in rm.twists}
    assert deltas[(3, 4, 5)] == deltas[(1, 3, 6)] == "1"
    assert deltas[(1, 4)] == "A[3,4]"
    assert deltas[(2, 4, 6)] == "A[3,4] A[3,6]"
    # the product formula conjugates A_{125} by A_{35} A_{45}: a different braid
    assert deltas[(1, 2, 5)] == "A[3,5] A[4,5]"


def test_conjugated_A125_differs_from_plain_A125():
    listed = {tw.V: tw for tw in _shared.diamond_monodromy_listed()[1]}
    rm = real_monodromy(_shared.arrangement("diamond"), 7, matrix=PAPER_FRAME)
    computed = {tw.V: tw for tw in rm.twists}
    assert gassner_twist(listed[(1, 2, 5)]) != gassner_twist(computed[(1, 2, 5)])
    for V in [(3, 4, 5), (1, 4), (1, 3, 6), (2, 4, 6)]:
        assert gassner_twist(listed[V]) == gassner_twist(computed[V])


def test_frame_independence_of_chen_ranks():
    arr = _shared.arrangement("diamond")
    p1 = _shared.presentation("diamond", "real")
    rm = real_monodromy(arr, 7, matrix=PAPER_FRAME)
    p2 = presentation_real(rm.twists, rm.n)
    assert chen_ranks(p1, 8).theta == chen_ranks(p2, 8).theta


@settings(max_examples=25, deadline=None)
@given(st.fractions(-3, 3, max_denominator=4), st.fractions(-3, 3, max_denominator=4))
def test_random_frames_agree_on_six_lines(q, r):
    arr = _shared.arrangement("sixlines")
    a = decone(arr, 3)
    m = ((1, q), (r, 1))
    assume(1 - q * r != 0 and not frame_problems(_apply(a, m)))
    rm = real_monodromy(arr, 3, matrix=m)
    theta = chen_ranks(presentation_real(rm.twists, rm.n), 7).theta
    assert theta == _shared.ranks("sixlines")


def _apply(a, m):
    return Frame(tuple(tuple(F(x) for x in row) for row in m)).apply(a)


# -- wiring diagrams --------------------------------------------------------------------------------

@pytest.mark.parametrize("name", _shared.ARRANGEMENTS)
def test_wiring_vertex_sets_match_the_lattice(name):
    rm = _shared.monodromy(name)
    assert sorted(rm.wiring.line_vertex_sets()) == sorted(lattice2(rm.affine).vertex_sets)


@pytest.mark.parametrize("name", _shared.ARRANGEMENTS)
def test_wiring_events_are_ordered_and_consistent(name):
    rm = _shared.monodromy(name)
    xs = [p[0] for p in rm.wiring.points]
    assert xs == sorted(xs) and len(set(xs)) == len(xs)
    for ev in rm.wiring.events:
        lo, hi = ev.V[0], ev.V[-1]
        assert set(ev.J) == {s for s in ev.U if lo < s < hi and s not in ev.V}


@pytest.mark.parametrize("name", _shared.ARRANGEMENTS)
def test_relation_count_is_b2(name):
    rm = _shared.monodromy(name)
    p = presentation_general(rm.twists, rm.n)
    b2 = sum(len(tw.V) - 1 for tw in rm.twists)
    assert b2 == lattice2(rm.affine).b2
    assert sum(1 for lab in p.relation_labels if lab.startswith("phi")) == b2


def test_delta_from_above():
    assert delta_from_above((2, 4, 6), (3,), 6) == parse_braid_word("A[3,4] A[3,6]", 6)
    assert delta_from_above((1, 2), (), 3).is_identity()


def test_single_vertex_has_trivial_delta():
    a = AffineLineArrangement(((1, -1, 0), (1, 1, 0), (0, 1, 0)))
    rm = real_monodromy(a)
    assert len(rm.twists) == 1 and rm.twists[0].delta.is_identity()


# -- text format ------------------------------------------------------------------------------------

def test_parse_arrangement():
    c = parse_arrangement("central\n1 0 0\n0 1 0\n0 0 1\n")
    assert isinstance(c, CentralArrangement3) and c.n == 3
    a = parse_arrangement("# two lines\n1 0 0\n1/2 1 3\n")
    assert isinstance(a, AffineLineArrangement) and a.lines[1] == (F(1, 2), 1, 3)
    with pytest.raises(ValueError, match="line 2"):
        parse_arrangement("1 0 0\n1 0\n")
    with pytest.raises(ValueError, match="line 1"):
        parse_arrangement("1 x 0\n")
    with pytest.raises(ValueError, match="no hyperplanes"):
        parse_arrangement("# empty\n")


def test_affine_arrangement_with_parallel_lines():
    # x = 0, x = 1 parallel; y = 0 meets both
    a = AffineLineArrangement(((1, 0, 0), (1, 0, 1), (0, 1, 0)))
    lat = lattice2(a)
    assert set(lat.vertex_sets) == {(1, 3), (2, 3)}
    assert isinstance(lat, Lattice2)
