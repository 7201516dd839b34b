from __future__ import annotations

from fractions import Fraction

import pytest

from oracles import fiber_degree_sums, local_sums
from tropgal.catalog import cycle, star5, theta_curve, theta_sigma3
from tropgal.curve import Point, make_curve
from tropgal.errors import (
    DegreeInconsistentAt,
    EndpointMismatch,
    IncompatibleMiddleCurve,
    InfiniteEdgeTargetFinite,
    LengthScaleViolation,
    MorphismError,
    NotHarmonicAt,
)
from tropgal.morphism import (
    CONTINUOUS_ONLY,
    FINITE_HARMONIC,
    NOT_WELL_DEFINED,
    MorphismRep,
    check_finite_morphism,
    check_harmonic,
    compose,
    compose_direct,
    degree,
    factor_through,
    identity_morphism,
    invert,
    pull,
    push,
    same_map,
)
from tropgal.quotient import quotient
from tropgal.refine import refine_at


def theta_to_interval():
    src = theta_curve()
    tgt = make_curve("I", [("f", "a", "b", 2)])
    return MorphismRep(src, tgt, {"u": "a", "w": "b"},
                       {e: ("f", False) for e in ("e1", "e2", "e3")},
                       {e: 2 for e in ("e1", "e2", "e3")}, "pi")


# -- check_finite_morphism ----------------------------------------------------


def test_theta_onto_interval_is_finite():
    v = check_finite_morphism(theta_to_interval())
    assert v.ok and all(err is None for err in v.edges.values())


def test_identity_is_finite():
    assert check_finite_morphism(identity_morphism(theta_curve())).ok


def test_length_scale_violation():
    src = make_curve("s", [("e", "a", "b", 1)])
    tgt = make_curve("t", [("f", "x", "y", 3)])
    m = MorphismRep(src, tgt, {"a": "x", "b": "y"}, {"e": ("f", False)}, {"e": 2})
    with pytest.raises(LengthScaleViolation):
        check_finite_morphism(m)
    v = check_finite_morphism(m, strict=False)
    assert not v.ok and v.edges["e"] is not None


def test_endpoint_mismatch():
    src = make_curve("s", [("e", "a", "b", 1)])
    tgt = make_curve("t", [("f", "x", "y", 1)])
    m = MorphismRep(src, tgt, {"a": "x", "b": "y"}, {"e": ("f", True)}, {"e": 1})
    with pytest.raises(EndpointMismatch):
        check_finite_morphism(m)


def test_infinite_edge_onto_finite_edge():
    src = make_curve("s", [("e", "a", "b", 1), ("l", "a", "z", "inf")])
    tgt = make_curve("t", [("f", "x", "y", 1), ("g", "x", "w", 1)])
    m = MorphismRep(src, tgt, {"a": "x", "b": "y", "z": "w"},
                    {"e": ("f", False), "l": ("g", False)}, {"e": 1, "l": 1})
    with pytest.raises(InfiniteEdgeTargetFinite):
        check_finite_morphism(m)


# -- check_harmonic ---------------------------------------------------------------


def test_star5_projection_is_harmonic_of_degree_6():
    ex = star5()
    q = quotient(ex.curve, ex.group)
    cert = check_harmonic(q.projection)
    assert cert.global_degree == 6
    assert cert.vertex_degrees["c"] == 6
    assert sorted(local_sums(q.projection, "c").values()) == [6, 6]
    # over [e1] the sums are 3 + 3, over [e3] they are 2 + 2 + 2
    degs = q.projection.edge_degrees
    assert sorted(degs[e] for e in ("e1", "e2")) == [3, 3]
    assert sorted(degs[e] for e in ("e3", "e4", "e5")) == [2, 2, 2]


def test_identity_degrees():
    cert = check_harmonic(identity_morphism(theta_curve()))
    assert cert.global_degree == 1 and set(cert.vertex_degrees.values()) == {1}


def test_theta_projection_vertex_degrees():
    cert = check_harmonic(theta_to_interval())
    assert cert.vertex_degrees == {"u": 6, "w": 6} and cert.global_degree == 6


def test_not_harmonic_at_a_vertex():
    # at b the degree sum over f is 2 but over g only 1
    src = make_curve("s", [("e1", "a", "b", 1), ("e2", "b", "c", 1), ("e3", "b", "d", 2)])
    tgt = make_curve("t", [("f", "x", "y", 1), ("g", "x", "z", 2)])
    m = MorphismRep(src, tgt, {"a": "y", "b": "x", "c": "y", "d": "z"},
                    {"e1": ("f", True), "e2": ("f", False), "e3": ("g", False)},
                    {"e1": 1, "e2": 1, "e3": 1})
    with pytest.raises(NotHarmonicAt):
        check_harmonic(m)


def test_fold_with_unbalanced_ends_is_not_harmonic():
    src = make_curve("s", [("e1", "a", "b", 1), ("e2", "b", "c", 1), ("e3", "c", "d", 1)])
    tgt = make_curve("t", [("f", "x", "y", 1), ("g", "y", "z", 1)])
    m = MorphismRep(src, tgt, {"a": "x", "b": "y", "c": "z", "d": "y"},
                    {"e1": ("f", False), "e2": ("g", False), "e3": ("g", True)},
                    {"e1": 1, "e2": 1, "e3": 1})
    assert check_finite_morphism(m).ok
    with pytest.raises((DegreeInconsistentAt, NotHarmonicAt)):
        check_harmonic(m)


def test_fiber_degree_sums_match_global_degree(actions):
    for name, curve, group in actions:
        q = quotient(curve, group)
        d = check_harmonic(q.projection).global_degree
        sums = fiber_degree_sums(q.projection)
        assert set(sums.values()) == {d}, name
        assert set(sums) == {e.id for e in q.quotient_curve.edges}


# -- push / pull ---------------------------------------------------------------------


def test_push_and_pull_are_inverse_on_fibers():
    m = theta_to_interval()
    q = Point.on("f", Fraction(1, 2))
    pre = pull(m, q)
    assert len(pre) == 3
    assert all(push(m, p) == q for p in pre)
    assert all(p.offset == Fraction(1, 4) for p in pre)


# -- composition -------------------------------------------------------------------


def test_compose_identity_is_neutral():
    m = theta_to_interval()
    assert compose(identity_morphism(m.target), m) == m
    assert compose(m, identity_morphism(m.source)) == m


def test_compose_theta_through_sigma():
    ex = theta_sigma3()
    full = quotient(ex.curve, ex.group).projection
    part = quotient(ex.curve, ex.action("sigma")).projection
    fr = factor_through(full, part)
    assert fr.is_finite_harmonic and fr.degree == 2
    comp = compose(fr.theta(), fr.pi)
    assert degree(comp) == 6 == degree(fr.theta()) * degree(part)
    assert same_map(comp, fr.psi)


def test_compose_cycle_covers_multiply_degrees():
    ex = cycle(12)
    to_c4 = quotient(ex.curve, ex.group.subgroup([ex.group.elements[4]]).as_group())
    to_c2 = quotient(ex.curve, ex.group.subgroup([ex.group.elements[2]]).as_group())
    assert to_c4.quotient_curve.total_length == 4 and to_c2.quotient_curve.total_length == 2
    fr = factor_through(to_c2.projection, to_c4.projection)
    assert fr.is_finite_harmonic and fr.degree == 2
    assert degree(compose(fr.theta(), fr.pi)) == 6


def test_compose_refuses_non_isometric_middle():
    a = make_curve("a", [("e", "x", "y", 1)])
    b = make_curve("b", [("e", "x", "y", 2)])
    with pytest.raises(IncompatibleMiddleCurve):
        compose(identity_morphism(b), identity_morphism(a))


def test_compose_across_subdivided_middle():
    m = theta_to_interval()
    fine, r = refine_at(m.target, [Point.on("f", Fraction(1, 2))])
    outer = identity_morphism(fine)
    comp = compose(outer, m)
    assert degree(comp) == 6
    assert check_finite_morphism(comp).ok


def test_invert_degree_one():
    c = theta_curve()
    m = identity_morphism(c)
    assert compose_direct(invert(m), m) == m
    with pytest.raises(MorphismError):
        invert(theta_to_interval())


# -- factor_through -----------------------------------------------------------------


def test_factor_theta_sigma_is_continuous_only():
    ex = theta_sigma3()
    full = quotient(ex.curve, ex.group).projection
    part = quotient(ex.curve, ex.action("sigma")).projection
    fr = factor_through(part, full)
    assert fr.classification == CONTINUOUS_ONLY
    assert set(fr.non_integral_scales.values()) == {Fraction(1, 2)}
    assert fr.degrees == (6, 3)


def test_factor_cycle_rotations():
    ex = cycle(12)
    z12 = quotient(ex.curve, ex.group).projection
    z4 = quotient(ex.curve, ex.group.subgroup([ex.group.elements[3]]).as_group()).projection
    fr = factor_through(z12, z4)
    assert fr.classification == FINITE_HARMONIC and fr.degree == 3


def test_factor_not_well_defined():
    # the identity does not factor through a nontrivial quotient
    ex = cycle(6)
    q = quotient(ex.curve, ex.group).projection
    fr = factor_through(identity_morphism(q.source), q)
    assert fr.classification == NOT_WELL_DEFINED
    assert fr.witness is not None


def test_factor_reproduces_psi(actions):
    for name, curve, group in actions[:5]:
        q = quotient(curve, group).projection
        fr = factor_through(q, identity_morphism(curve))
        assert fr.is_finite_harmonic, name
        assert same_map(compose_direct(fr.theta(), fr.pi), fr.psi), name
