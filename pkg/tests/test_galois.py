from __future__ import annotations

import pytest

from tropgal.catalog import cycle, dihedral, star5, star6, theta_sigma3
from tropgal.curve import make_curve
from tropgal.errors import NotGaloisCovering, NotInvariant, PhiNotNormal, PsiNotInvariant
from tropgal.galois import (
    classify_covering,
    deck_group,
    equivalent,
    galois_correspondence,
    induced_action,
    intermediate_analysis,
    invariance_group,
    is_galois_action,
    leq_a,
    prenormal_check,
    represent_differently,
    sample_point_check,
    ump_check,
)
from tropgal.group import is_normal, make_automorphism
from tropgal.morphism import CONTINUOUS_ONLY, FINITE_HARMONIC, MorphismRep, identity_morphism
from tropgal.quotient import common_model, quotient


def proj(curve, group):
    return quotient(curve, group).projection


def rot_sub(ex, k):
    """Rotation subgroup of order ``k`` in a cycle example."""
    n = len(ex.curve.edges)
    g = next(x for x in ex.group.elements if x.vmap["v0"] == f"v{n // k}")
    return ex.group.subgroup([g]).as_group()


# -- is_galois_action -----------------------------------------------------------------


def test_theta_action_not_galois():
    ex = theta_sigma3()
    ok, u = is_galois_action(ex.curve, ex.group)
    assert not ok
    assert is_galois_action(ex.curve, ex.group).failing_edge == "e1"


def test_cycle12_action_galois_with_empty_exceptional_set():
    ex = cycle(12)
    ok, u = is_galois_action(ex.curve, ex.group)
    assert ok and u == ()


def test_star6_h_not_galois():
    ex = star6()
    ok, _ = is_galois_action(ex.curve, ex.action("beta"))
    assert not ok


def test_sampling_agrees_with_edge_test(actions):
    for name, _, group in actions:
        agree, total = sample_point_check(group, per_edge=3, seed=7)
        assert agree == total > 0, name


# -- classify_covering -----------------------------------------------------------------


def test_theta_classification():
    ex = theta_sigma3()
    c = classify_covering(proj(ex.curve, ex.group), ex.group)
    assert c.is_pre_galois and not c.is_galois and not c.is_normal
    assert c.failing_witness[0] == "edge-stabilizer"
    assert c.degree == 6


def test_cycle12_classification():
    ex = cycle(12)
    c = classify_covering(proj(ex.curve, ex.group), ex.group)
    assert c.is_pre_galois and c.is_galois and c.is_normal
    assert c.exceptional_set == ()


def test_star5_classification():
    ex = star5()
    c = classify_covering(proj(ex.curve, ex.group), ex.group)
    assert c.is_pre_galois and not c.is_galois


def test_projection_always_pre_galois(actions):
    for name, curve, group in actions:
        c = classify_covering(proj(curve, group), group)
        assert c.is_pre_galois, name
        if c.is_galois:
            assert c.is_normal and c.degree == group.order


def test_classify_rejects_non_invariant_map():
    ex = theta_sigma3()
    with pytest.raises(NotInvariant):
        classify_covering(identity_morphism(ex.curve), ex.group)


def test_galois_but_through_a_smaller_group_is_normal_only():
    # pi_{Z12} is Z4-invariant, the Z4 action is free, and theta has degree 3
    ex = cycle(12)
    c = classify_covering(proj(ex.curve, ex.group), rot_sub(ex, 4))
    assert c.is_normal and not c.is_pre_galois and not c.is_galois


# -- invariance group and relations ------------------------------------------------------


def test_invariance_group_of_pi_sigma_is_all_of_s3():
    ex = theta_sigma3()
    g = invariance_group(proj(ex.curve, ex.action("sigma")), ex.group)
    assert g.order == 6


def test_invariance_group_of_galois_covering_is_whole():
    ex = cycle(12)
    assert invariance_group(proj(ex.curve, ex.group), ex.group).order == 12


def test_invariance_group_of_z4_quotient():
    ex = cycle(12)
    z4 = rot_sub(ex, 4)
    g = invariance_group(proj(ex.curve, z4), ex.group)
    assert g.order == 4
    assert {x.key for x in g.elements} == {x.key for x in z4.elements}


def test_equivalence():
    ex = cycle(12)
    p = proj(ex.curve, rot_sub(ex, 4))
    assert equivalent(p, represent_differently(p))
    assert not equivalent(proj(ex.curve, rot_sub(ex, 6)), p)
    t = theta_sigma3()
    assert not equivalent(proj(t.curve, t.action("sigma")), proj(t.curve, t.group))


def test_leq_a():
    ex = cycle(12)
    p12, p4 = proj(ex.curve, ex.group), proj(ex.curve, rot_sub(ex, 4))
    assert leq_a(p12, p4)
    assert leq_a(p4, p4)
    assert not leq_a(p4, p12)


# -- correspondence -------------------------------------------------------------------------


def test_correspondence_c12():
    ex = cycle(12)
    rep = galois_correspondence(proj(ex.curve, ex.group), ex.group)
    assert len(rep.entries) == 6
    assert len(rep.order_checks) == 36
    assert rep.all_pass
    trivial = rep.entries[0]
    assert trivial.order == 1 and trivial.recovered == (0,)
    p1 = trivial.quotient.projection
    assert equivalent(p1, identity_morphism(p1.source))


def test_correspondence_d4():
    ex = dihedral(4)
    rep = galois_correspondence(proj(ex.curve, ex.group), ex.group)
    assert len(rep.entries) == 10 and rep.all_pass


def test_correspondence_refuses_non_galois():
    ex = theta_sigma3()
    with pytest.raises(NotGaloisCovering) as info:
        galois_correspondence(proj(ex.curve, ex.group), ex.group)
    assert info.value.witness[0] == "edge-stabilizer"


def test_correspondence_parallel_matches_serial():
    ex = dihedral(4)
    phi = proj(ex.curve, ex.group)
    a = galois_correspondence(phi, ex.group, jobs=1)
    b = galois_correspondence(phi, ex.group, jobs=2)
    assert [(e.index, e.subgroup, e.theta_degree, e.phi_psi, e.psi_phi) for e in a.entries] == \
        [(e.index, e.subgroup, e.theta_degree, e.phi_psi, e.psi_phi) for e in b.entries]
    assert [c.ok for c in a.order_checks] == [c.ok for c in b.order_checks]


# -- intermediate analysis -----------------------------------------------------------------


def test_intermediate_z3_in_z12():
    ex = cycle(12)
    phi = proj(ex.curve, ex.group)
    v = intermediate_analysis(phi, ex.group, proj(ex.curve, rot_sub(ex, 3)))
    assert v.normal_in_g and v.theta_is_galois and v.iso_to_quotient_group
    assert v.induced_action.order == 4
    assert max(v.induced_action.abstract.order_profile()) == 4  # cyclic
    assert v.theta.pi.target.total_length == 4


def test_intermediate_psi_equal_phi():
    ex = cycle(12)
    phi = proj(ex.curve, ex.group)
    v = intermediate_analysis(phi, ex.group, phi)
    assert v.normal_in_g and v.subgroup.order == 12
    assert v.induced_action.order == 1
    assert v.theta.degree == 1


def test_intermediate_non_normal_reflection_in_d6():
    ex = dihedral(6)
    phi = proj(ex.curve, ex.group)
    ref = ex.group.subgroup([ex.elements["ref"]])
    assert not is_normal(ref)
    v = intermediate_analysis(phi, ex.group, proj(ex.curve, ref.as_group()))
    assert not v.normal_in_g and not v.theta_is_galois


def test_deck_group_of_identity_is_trivial():
    ex = cycle(6)
    assert deck_group(identity_morphism(ex.curve)).order == 1


def test_induced_action_of_normal_subgroup():
    ex = cycle(12)
    moved, (p2,), _ = common_model(ex.group, [proj(ex.curve, rot_sub(ex, 2))])
    h = induced_action(p2, moved)
    assert h.order == 6


# -- universal mapping property ---------------------------------------------------------------


def test_ump_theta():
    ex = theta_sigma3()
    fr = ump_check(proj(ex.curve, ex.group), ex.group, proj(ex.curve, ex.action("sigma")))
    assert fr.classification == CONTINUOUS_ONLY
    assert fr.degrees == (6, 3)


def test_ump_star6():
    ex = star6()
    h = ex.action("beta")
    fr = ump_check(proj(ex.curve, h), h, proj(ex.curve, ex.action("gamma")))
    assert fr.classification == CONTINUOUS_ONLY and fr.degrees == (4, 6)


def test_ump_star5():
    ex = star5()
    fr = ump_check(proj(ex.curve, ex.group), ex.group, proj(ex.curve, ex.action("gamma")))
    assert fr.classification == CONTINUOUS_ONLY and fr.degrees == (6, 5)


def test_ump_cycle():
    ex = cycle(12)
    z4 = rot_sub(ex, 4)
    fr = ump_check(proj(ex.curve, z4), z4, proj(ex.curve, ex.group))
    assert fr.classification == FINITE_HARMONIC and fr.degree == 3


def test_ump_requires_invariant_psi():
    ex = cycle(12)
    with pytest.raises(PsiNotInvariant):
        ump_check(proj(ex.curve, ex.group), ex.group, proj(ex.curve, rot_sub(ex, 4)))


# -- prenormal property -------------------------------------------------------------------------


def test_prenormal_identity_psi_witness_is_f():
    ex = cycle(12, "rotation:2")
    phi = proj(ex.curve, ex.group)
    for f in ex.group.elements:
        rep = prenormal_check(phi, ex.group, identity_morphism(ex.curve), f)
        assert rep.all_found
        assert all(f.name in row.witnesses for row in rep.rows)


def test_prenormal_relabelled_double_cover():
    ex = cycle(12, "rotation:2")
    phi = proj(ex.curve, ex.group)
    w = make_curve("W", [(f"d{i}", f"w{i}", f"w{(i + 1) % 12}", 1) for i in range(12)])
    psi = MorphismRep(w, ex.curve, {f"w{i}": f"v{(i + 3) % 12}" for i in range(12)},
                      {f"d{i}": (f"e{(i + 3) % 12}", False) for i in range(12)},
                      {f"d{i}": 1 for i in range(12)}, "psi")
    f = make_automorphism(w, {f"w{i}": f"w{(i + 6) % 12}" for i in range(12)},
                          {f"d{i}": f"d{(i + 6) % 12}" for i in range(12)})
    rep = prenormal_check(phi, ex.group, psi, f)
    nontrivial = next(g.name for g in ex.group.elements if not g.is_identity)
    assert len(rep.rows) == 12
    assert all(row.witnesses == (nontrivial,) for row in rep.rows)


def test_prenormal_theta_requires_normal_covering():
    ex = theta_sigma3()
    phi = proj(ex.curve, ex.group)
    psi = identity_morphism(ex.curve)
    with pytest.raises(PhiNotNormal):
        prenormal_check(phi, ex.group, psi, ex.elements["swap12"])
    rep = prenormal_check(phi, ex.group, psi, ex.elements["swap12"], require_normal=False)
    assert rep.all_found
    assert {row.edge for row in rep.rows} == {"e1", "e2", "e3"}
