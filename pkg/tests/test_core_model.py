from __future__ import annotations

from fractions import Fraction

import pytest

from tropgal.catalog import cycle_curve, theta_curve
from tropgal.curve import Point, make_curve, validate_model
from tropgal.errors import (
    Disconnected,
    EmptyGraph,
    InfinityOnNonLeafEdge,
    MissingInfiniteEnd,
    NonpositiveLength,
    OffsetOutOfRange,
)
from tropgal.isometry import find_degree_one_morphism, isometric, model_automorphisms
from tropgal.lengths import INF, as_length, format_length, parse_length, total_length
from tropgal.morphism import check_harmonic
from tropgal.refine import canonical_model, loopless_refinement, refine_at, subdivide


# -- lengths -------------------------------------------------------------------


def test_lengths_are_exact():
    assert parse_length("3/6") == Fraction(1, 2)
    assert parse_length("inf") is INF
    assert format_length(Fraction(4, 2)) == "2"
    assert format_length(INF) == "inf"
    assert total_length([Fraction(1), INF]) is INF
    assert total_length([Fraction(1, 3), Fraction(2, 3)]) == 1


@pytest.mark.parametrize("bad", ["0.5", "1e3", "abc", "1/0", ""])
def test_parse_length_rejects_inexact(bad):
    with pytest.raises(ValueError):
        parse_length(bad)


def test_floats_are_refused():
    with pytest.raises(TypeError):
        as_length(0.5)


def test_infinity_arithmetic():
    assert INF + Fraction(3) is INF
    assert 3 * INF is INF
    assert INF > Fraction(10 ** 9)


# -- validate_model ------------------------------------------------------------


def test_theta_is_valid_and_loopless():
    c = theta_curve()
    assert len(c.vertices) == 2 and len(c.edges) == 3
    assert c.loopless


def test_infinite_loop_rejected():
    with pytest.raises(InfinityOnNonLeafEdge):
        make_curve("x", [("e", "v", "v", "inf")])


def test_disconnected_rejected():
    with pytest.raises(Disconnected):
        make_curve("x", [("e", "a", "b", 1), ("f", "c", "d", 1)])


def test_empty_rejected():
    with pytest.raises(EmptyGraph):
        validate_model({"name": "x", "edges": []})


def test_nonpositive_length_rejected():
    with pytest.raises(NonpositiveLength):
        make_curve("x", [("e", "a", "b", 0)])
    with pytest.raises(NonpositiveLength):
        make_curve("x", [("e", "a", "b", -1)])


def test_infinite_edge_between_non_leaves_rejected():
    with pytest.raises(InfinityOnNonLeafEdge):
        make_curve("x", [("e", "a", "b", "inf"), ("f", "b", "c", 1), ("g", "c", "a", 1)])


def test_infinite_end_inferred_from_the_leaf():
    c = make_curve("x", [("e", "a", "b", 1), ("f", "a", "z", "inf")])
    assert c.edge("f").infinite_end == "b"
    assert c.points_at_infinity == {"z"}


def test_single_infinite_edge_needs_explicit_end():
    with pytest.raises(MissingInfiniteEnd):
        make_curve("x", [("e", "a", "b", "inf")])
    c = make_curve("x", [("e", "a", "b", "inf", "a")])
    assert c.points_at_infinity == {"a"}


def test_single_vertex_curve():
    c = validate_model({"name": "pt", "vertices": ["p"], "edges": []})
    assert c.vertices == ("p",) and c.total_length == 0


def test_loop_degree_counts_twice():
    c = make_curve("x", [("e", "v", "v", 2)])
    assert c.degree("v") == 2 and not c.loopless


# -- subdivide / loopless_refinement -----------------------------------------


def test_subdivide_bisects():
    c = make_curve("i", [("e", "a", "b", 2)])
    fine, r = subdivide(c, "e", 1)
    assert sorted(e.length for e in fine.edges) == [1, 1]
    r.check()


def test_subdivide_infinite_leaf():
    c = make_curve("x", [("e", "a", "b", 1), ("f", "a", "z", "inf")])
    fine, r = subdivide(c, "f", 5)
    lengths = sorted((e.length for e in fine.edges), key=lambda x: (x is INF, x))
    assert lengths == [1, 5, INF]
    assert fine.points_at_infinity == {"z"}


def test_subdivide_infinite_edge_with_infinity_at_a():
    c = make_curve("x", [("f", "z", "a", "inf"), ("e", "a", "b", 1)])
    assert c.edge("f").infinite_end == "a"
    fine, r = subdivide(c, "f", 5)
    finite = [e for e in fine.edges if e.id.startswith("f") and not e.is_infinite]
    assert [e.length for e in finite] == [5]
    assert "a" in (finite[0].a, finite[0].b)


def test_subdivide_loop_gives_loopless_isometric_model():
    c = make_curve("o", [("e", "v", "v", 2)])
    fine, _ = subdivide(c, "e", 1)
    assert fine.loopless and len(fine.vertices) == 2 and len(fine.edges) == 2
    assert isometric(fine, c)


@pytest.mark.parametrize("offset", [0, 2, 3, -1])
def test_subdivide_out_of_range(offset):
    c = make_curve("i", [("e", "a", "b", 2)])
    with pytest.raises(OffsetOutOfRange):
        subdivide(c, "e", offset)


def test_loopless_refinement_of_loopless_is_identity():
    c = theta_curve()
    fine, r = loopless_refinement(c)
    assert fine == c and r.is_identity


def test_loopless_refinement_of_loop():
    fine, _ = loopless_refinement(make_curve("o", [("e", "v", "v", 2)]))
    assert len(fine.vertices) == 2 and sorted(e.length for e in fine.edges) == [1, 1]


def test_loopless_refinement_of_figure_eight():
    c = make_curve("8", [("e", "v", "v", 2), ("f", "v", "v", 4)])
    fine, r = loopless_refinement(c)
    assert fine.loopless
    assert len(fine.vertices) == 3 and len(fine.edges) == 4
    assert sorted(e.length for e in fine.edges) == [1, 1, 2, 2]
    r.check()


# -- canonical_model -------------------------------------------------------------


def test_canonical_path():
    c = make_curve("p", [("e1", "a", "b", 1), ("e2", "b", "c", 1), ("e3", "c", "d", 2)])
    canon, r = canonical_model(c)
    assert len(canon.edges) == 1 and canon.edges[0].length == 4
    r.check()


def test_canonical_circle_keeps_smallest_vertex():
    canon, _ = canonical_model(cycle_curve(12))
    assert canon.vertices == ("v0",)
    assert len(canon.edges) == 1 and canon.edges[0].length == 12
    assert canon.edges[0].is_loop


def test_canonical_theta_unchanged():
    c = theta_curve()
    canon, r = canonical_model(c)
    assert canon == c and r.is_identity


def test_canonical_keeps_points_at_infinity():
    c = make_curve("x", [("e", "a", "b", 1), ("f", "b", "z", "inf"), ("g", "a", "y", "inf")])
    canon, _ = canonical_model(c)
    assert canon.points_at_infinity == c.points_at_infinity


# -- degree-one morphisms --------------------------------------------------------


def test_theta_self_isometries():
    c = theta_curve()
    m = find_degree_one_morphism(c, c)
    assert m is not None and check_harmonic(m).global_degree == 1
    # 3! edge permutations times the optional vertex swap
    assert len(model_automorphisms(c)) == 12


def test_intervals_with_different_subdivisions_are_isometric():
    a = make_curve("a", [("e", "x", "y", 2)])
    b, _ = refine_at(a, [Point.on("e", Fraction(1, 3)), Point.on("e", Fraction(3, 2))])
    m = find_degree_one_morphism(a, b)
    assert m is not None


def test_intervals_of_different_length_are_not_isometric():
    a = make_curve("a", [("e", "x", "y", 2)])
    b = make_curve("b", [("e", "x", "y", 1)])
    assert find_degree_one_morphism(a, b) is None
