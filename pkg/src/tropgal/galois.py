"""Galois actions and coverings, the correspondence, and related checks.

Everything here works on one common model per action (see
:func:`tropgal.quotient.common_model`): the action is equivariant there,
quotients by every subgroup are loopless, and all maps under study start
from it.  Equalities of maps are then equalities of model data.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .curve import Curve, Edge, Point
from .errors import (
    CompositionMismatch,
    GroupTooLarge,
    InducedActionIllDefined,
    MorphismError,
    ModelError,
    NotFiniteHarmonic,
    NotGaloisCovering,
    NotInvariant,
    PhiNotNormal,
    PsiNotInAPrime,
    PsiNotInvariant,
    TheoremViolation,
)
from .group import (
    ActionGroup,
    Automorphism,
    Subgroup,
    group_isomorphic,
    identity_automorphism,
    is_normal,
    make_automorphism,
    quotient_group,
    subgroups,
)
from .isometry import identify, model_isomorphisms
from .morphism import (
    FactorResult,
    MorphismRep,
    check_harmonic,
    compose_direct,
    factor_through,
    lift_point,
    lower_point,
    pullback_target,
    push,
    transport,
)
from .quotient import QuotientResult, common_model, quotient_prepared
from .refine import refine_at

DECK_BOUND = 512


# -- Galois actions -----------------------------------------------------------


@dataclass(frozen=True)
class GaloisActionReport:
    is_galois: bool
    exceptional_set: tuple  # quotient vertices whose fiber is not free
    failing_edge: str | None
    failing_stabilizer: tuple = ()
    quotient: QuotientResult | None = None

    def __iter__(self):
        return iter((self.is_galois, self.exceptional_set))


def _galois_on_prepared(group: ActionGroup, q: QuotientResult) -> GaloisActionReport:
    failing, stab = None, ()
    for row in q.orbit_table:
        if row.kind == "edge" and row.stabilizer_order > 1 and failing is None:
            failing = row.representative
            stab = tuple(g.name for g in group.elements
                         if g.emap[failing] == (failing, False) and not g.is_identity)
    u = tuple(row.representative for row in q.orbit_table
              if row.kind == "vertex" and row.stabilizer_order > 1)
    return GaloisActionReport(failing is None, u, failing, stab, q)


def is_galois_action(curve: Curve, group: ActionGroup) -> GaloisActionReport:
    """Whether every edge stabilizer is trivial on an equivariant model.

    The exceptional set consists of the images of vertices with nontrivial
    stabilizer; outside it every fiber of the projection has ``|G|`` points.
    """
    moved, _, _ = common_model(group)
    return _galois_on_prepared(moved, quotient_prepared(moved))


def sample_point_check(group: ActionGroup, per_edge: int = 3, seed: int = 0) -> tuple[int, int]:
    """Cross-check edge stabilizers against stabilizers of random points.

    On a prepared model, picks ``per_edge`` random interior points on each
    edge and compares the brute-force point stabilizer with the edge
    stabilizer, and the orbit size with ``|G| / |G_e|``.  Returns
    ``(agreeing, sampled)``.
    """
    moved, _, _ = common_model(group)
    rng = random.Random(seed)
    agree = total = 0
    for e in moved.curve.edges:
        stab_e = {i for i, g in enumerate(moved.elements) if g.emap[e.id] == (e.id, False)}
        span = Fraction(1000) if e.is_infinite else e.length
        for _ in range(per_edge):
            u = span * Fraction(rng.randint(1, 9999), 10000)
            p = Point.on(e.id, u)
            stab_p = {i for i, g in enumerate(moved.elements) if g.apply_point(p) == p}
            orbit_p = {g.apply_point(p) for g in moved.elements}
            total += 1
            if stab_p == stab_e and len(orbit_p) * len(stab_p) == moved.order:
                agree += 1
    return agree, total


# -- classifying coverings -----------------------------------------------------


@dataclass(frozen=True)
class CoveringClassification:
    is_finite_harmonic: bool
    degree: int
    is_pre_galois: bool
    is_normal: bool
    is_galois: bool
    exceptional_set: tuple
    failing_witness: object = None
    theta: FactorResult | None = None
    action: GaloisActionReport | None = None


def _require_harmonic(m: MorphismRep, what: str = "covering") -> int:
    try:
        return check_harmonic(m).global_degree
    except (MorphismError, ModelError) as exc:
        raise NotFiniteHarmonic(f"{what} {m.name} is not finite harmonic: {exc}") from exc


def _invariance_failure(m: MorphismRep, group: ActionGroup):
    for g in group.elements:
        if compose_direct(m, g.as_morphism()) != m:
            return g
    return None


def classify_covering(phi: MorphismRep, group: ActionGroup) -> CoveringClassification:
    """PreGalois / normal / Galois verdicts for ``phi`` under ``group``."""
    deg = _require_harmonic(phi)
    moved, (phi1,), _ = common_model(group, [phi])
    bad = _invariance_failure(phi1, moved)
    if bad is not None:
        raise NotInvariant(bad.name)
    return _classify_prepared(phi1, moved, deg)


def _classify_prepared(phi: MorphismRep, group: ActionGroup, deg: int) -> CoveringClassification:
    q = quotient_prepared(group)
    action = _galois_on_prepared(group, q)
    theta = factor_through(phi, q.projection)
    pre = theta.is_finite_harmonic and theta.degree == 1
    normal = action.is_galois and theta.is_finite_harmonic
    galois = action.is_galois and pre
    witness = None
    if not action.is_galois:
        witness = ("edge-stabilizer", action.failing_edge, action.failing_stabilizer)
    elif not pre:
        witness = ("theta", theta.classification, theta.degree)
    if galois and deg != group.order:
        raise TheoremViolation(f"Galois covering of degree {deg} != |G| = {group.order}")
    return CoveringClassification(True, deg, pre, normal, galois, action.exceptional_set,
                                  witness, theta, action)


def invariance_group(psi: MorphismRep, group: ActionGroup) -> Subgroup:
    """``G(psi)``: the elements ``g`` with ``psi . g = psi``."""
    moved, (psi1,), _ = common_model(group, [psi])
    idx = frozenset(i for i, g in enumerate(moved.elements)
                    if compose_direct(psi1, g.as_morphism()) == psi1)
    if group.abstract.closure(idx) != idx:
        raise TheoremViolation("invariance set is not closed under composition")
    return Subgroup(group, idx)


def equivalent(psi1: MorphismRep, psi2: MorphismRep) -> bool:
    """``psi1 ~ psi2``: ``psi1 = t . psi2`` for a degree-one harmonic ``t``."""
    fr = factor_through(psi1, psi2)
    return fr.is_finite_harmonic and fr.degree == 1


def leq_a(psi1: MorphismRep, psi2: MorphismRep) -> bool:
    """``psi1 <=_A psi2``: ``psi1`` factors through ``psi2`` harmonically."""
    return factor_through(psi1, psi2).is_finite_harmonic


leq_A = leq_a


def represent_differently(m: MorphismRep, tag: str = "'") -> MorphismRep:
    """The same map with renamed target ids and one target edge subdivided."""
    t = m.target
    vren = {v: v + tag for v in t.vertices}
    eren = {e.id: e.id + tag for e in t.edges}
    target = Curve(t.name + tag, tuple(vren.values()),
                   tuple(Edge(eren[e.id], vren[e.a], vren[e.b], e.length, e.infinite_end)
                         for e in t.edges))
    moved = MorphismRep(m.source, target, {v: vren[w] for v, w in m.vertex_map.items()},
                        {e: (eren[f], flip) for e, (f, flip) in m.edge_map.items()},
                        dict(m.edge_degrees), m.name + tag, m.declared_degree)
    if not target.edges:
        return moved
    first = target.edges[0]
    mid = Fraction(1) if first.is_infinite else first.length / 2
    _, rt = refine_at(target, [Point.on(first.id, mid)])
    out, _ = pullback_target(moved, rt)
    return out


# -- the correspondence -----------------------------------------------------------


@dataclass(frozen=True)
class CorrespondenceEntry:
    index: int
    subgroup: tuple  # element indices
    label: str
    order: int
    quotient: QuotientResult
    action_is_galois: bool
    theta: FactorResult
    theta_degree: int | None
    recovered: tuple  # indices of G(pi_{G'})
    phi_psi: bool  # G(pi_{G'}) == G'
    psi_phi: bool  # psi ~ pi_{G(psi)} for a re-presented psi


@dataclass(frozen=True)
class OrderCheck:
    first: int
    second: int
    subset: bool  # G1 is contained in G2
    reversed_leq: bool  # pi_{G2} factors through pi_{G1}

    @property
    def ok(self) -> bool:
        return self.subset == self.reversed_leq


@dataclass(frozen=True)
class CorrespondenceReport:
    phi: MorphismRep
    group: ActionGroup
    entries: tuple
    order_checks: tuple

    @property
    def roundtrip_phi_psi(self) -> bool:
        return all(e.phi_psi for e in self.entries)

    @property
    def roundtrip_psi_phi(self) -> bool:
        return all(e.psi_phi for e in self.entries)

    @property
    def order_reversal(self) -> bool:
        return all(c.ok for c in self.order_checks)

    @property
    def thetas_ok(self) -> bool:
        n = self.group.order
        return all(e.theta.is_finite_harmonic and e.theta_degree * e.order == n
                   for e in self.entries)

    @property
    def all_pass(self) -> bool:
        return (self.roundtrip_phi_psi and self.roundtrip_psi_phi and self.order_reversal
                and self.thetas_ok and all(e.action_is_galois for e in self.entries))


def _subgroup_task(args):
    phi, group, index, indices = args
    sub = Subgroup(group, frozenset(indices))
    sub_group = sub.as_group()
    q = quotient_prepared(sub_group)
    action = _galois_on_prepared(sub_group, q)
    recovered = invariance_group(q.projection, group)
    theta = factor_through(phi, q.projection)
    alt = represent_differently(q.projection)
    alt_group = invariance_group(alt, group)
    alt_q = quotient_prepared(alt_group.as_group())
    psi_phi = alt_group.indices == sub.indices and equivalent(alt, alt_q.projection)
    return CorrespondenceEntry(
        index, sub.sorted_indices, sub.label, sub.order, q, action.is_galois, theta,
        theta.degree, recovered.sorted_indices, recovered.indices == sub.indices, psi_phi,
    )


def _order_task(args):
    i, j, p1, p2, subset = args
    return OrderCheck(i, j, subset, leq_a(p2, p1))


def _run(fn, tasks, jobs):
    if jobs and jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def galois_correspondence(phi: MorphismRep, group: ActionGroup, jobs: int = 1) -> CorrespondenceReport:
    """Verify the subgroup / intermediate covering correspondence.

    Entries are listed in the order of :func:`tropgal.group.subgroups` and
    are identical whether or not the sweep runs in parallel.
    """
    deg = _require_harmonic(phi)
    moved, (phi1,), _ = common_model(group, [phi])
    bad = _invariance_failure(phi1, moved)
    if bad is not None:
        raise NotInvariant(bad.name)
    cls = _classify_prepared(phi1, moved, deg)
    if not cls.is_galois:
        raise NotGaloisCovering(f"{phi.name} is not {group.name}-Galois", cls.failing_witness)
    subs = subgroups(moved)
    entries = _run(_subgroup_task,
                   [(phi1, moved, k, s.sorted_indices) for k, s in enumerate(subs)], jobs)
    for e in entries:
        if not e.action_is_galois:
            raise TheoremViolation(f"subgroup {e.label} does not act Galois")
    projections = [e.quotient.projection for e in entries]
    tasks = [(i, j, projections[i], projections[j], subs[i].issubset(subs[j]))
             for i in range(len(subs)) for j in range(len(subs))]
    checks = _run(_order_task, tasks, jobs)
    return CorrespondenceReport(phi1, moved, tuple(entries), tuple(checks))


# -- intermediate coverings -------------------------------------------------------


@dataclass(frozen=True)
class IntermediateVerdict:
    subgroup: Subgroup
    normal_in_g: bool
    induced_action: ActionGroup | None
    theta_is_galois: bool
    iso_to_quotient_group: bool
    theta: FactorResult | None = None
    deck_order: int = 0

    @property
    def consistent(self) -> bool:
        return self.normal_in_g == self.theta_is_galois


def deck_group(theta: MorphismRep, bound: int = DECK_BOUND) -> ActionGroup:
    """All model automorphisms ``h`` of ``theta.source`` with ``theta . h = theta``."""
    src = theta.source
    vm = theta.vertex_map
    elements = [identity_automorphism(src)]
    for vmap, emap in model_isomorphisms(src, src, lambda v, w: vm[v] == vm[w]):
        h = Automorphism(src, vmap, emap)
        if h.is_identity:
            continue
        if compose_direct(theta, h.as_morphism()) == theta:
            elements.append(h)
            if len(elements) > bound:
                raise GroupTooLarge(f"deck group exceeds {bound} elements")
    return ActionGroup(src, tuple(elements), tuple(elements[1:]), "Deck")


def _theta_galois_by_deck(theta: MorphismRep) -> bool:
    deg = check_harmonic(theta).global_degree
    deck = deck_group(theta)
    if deck.order < deg or deck.order % deg:
        return False
    for sub in subgroups(deck, bound=DECK_BOUND):
        if sub.order != deg:
            continue
        sg = sub.as_group()
        try:
            if classify_covering(theta, sg).is_galois:
                return True
        except NotInvariant:
            continue
    return False


def induced_action(psi: MorphismRep, group: ActionGroup) -> ActionGroup:
    """The action ``[g](psi(x)) = psi(g(x))`` on the target of ``psi``.

    ``psi`` must start at ``group.curve``.  Raises
    :class:`InducedActionIllDefined` when the formula depends on the choice
    of ``x``.  Element ``k`` of the result is ``[g]`` for the ``k``-th
    distinct image, in the order of ``group.elements``.
    """
    target = psi.target
    images = []
    for g in group.elements:
        vmap: dict = {}
        for v in psi.source.vertices:
            w, w2 = psi.vertex_map[v], psi.vertex_map[g.vmap[v]]
            if vmap.setdefault(w, w2) != w2:
                raise InducedActionIllDefined(f"[{g.name}] is ambiguous at vertex {w}")
        emap: dict = {}
        for e in psi.source.edges:
            f1, flip1 = psi.edge_map[e.id]
            ge, flip2 = g.emap[e.id]
            f3, flip3 = psi.edge_map[ge]
            img = (f3, flip1 ^ flip2 ^ flip3)
            if emap.setdefault(f1, img) != img:
                raise InducedActionIllDefined(f"[{g.name}] is ambiguous on edge {f1}")
        images.append(make_automorphism(target, vmap, emap))
    distinct = []
    for h in images:
        if h not in distinct:
            distinct.append(h)
    if not distinct[0].is_identity:
        raise TheoremViolation("identity does not induce the identity")
    return ActionGroup(target, tuple(distinct), tuple(distinct[1:]), "H")


def intermediate_analysis(phi: MorphismRep, group: ActionGroup, psi: MorphismRep,
                          strict: bool = True) -> IntermediateVerdict:
    """Normality of ``G(psi)`` versus Galois-ness of ``theta`` with ``phi = theta . psi``."""
    deg = _require_harmonic(phi)
    _require_harmonic(psi, "intermediate map")
    moved, (phi1, psi1), _ = common_model(group, [phi, psi])
    cls = _classify_prepared(phi1, moved, deg)
    if not cls.is_galois:
        raise NotGaloisCovering(f"{phi.name} is not {group.name}-Galois", cls.failing_witness)
    idx = frozenset(i for i, g in enumerate(moved.elements)
                    if compose_direct(psi1, g.as_morphism()) == psi1)
    sub = Subgroup(moved, idx)
    q = quotient_prepared(sub.as_group())
    if not equivalent(psi1, q.projection):
        raise PsiNotInAPrime(f"{psi.name} is not equivalent to the quotient by G(psi)")
    normal = is_normal(sub)
    fr = factor_through(phi1, psi1)
    if not fr.is_finite_harmonic:
        raise TheoremViolation("phi does not factor harmonically through psi")
    theta = fr.theta()
    galois = _theta_galois_by_deck(theta)
    action = None
    iso = False
    if normal:
        action = induced_action(fr.pi, moved)
        iso = group_isomorphic(action.abstract, quotient_group(sub))
        if not _classify_prepared_or_false(theta, action):
            raise TheoremViolation("theta is not Galois for the induced action")
    else:
        try:
            action = induced_action(fr.pi, moved)
        except InducedActionIllDefined:
            action = None
    verdict = IntermediateVerdict(Subgroup(group, idx), normal, action, galois, iso, fr,
                                  deck_group(theta).order)
    if strict and (not verdict.consistent or (normal and not iso)):
        raise TheoremViolation(
            f"normal={normal} but theta Galois={galois}, isomorphic={iso}")
    return verdict


def _classify_prepared_or_false(theta: MorphismRep, action: ActionGroup) -> bool:
    try:
        return classify_covering(theta, action).is_galois
    except NotInvariant:
        return False


# -- universal mapping property ------------------------------------------------


def ump_check(phi: MorphismRep, group: ActionGroup, psi: MorphismRep) -> FactorResult:
    """Factor a ``G``-invariant ``psi`` through ``phi``.

    For a Galois ``phi`` the factor map must be finite harmonic; for a
    merely preGalois one it may fail, and the result is returned so the
    failure can be reported.
    """
    deg = _require_harmonic(phi)
    moved, (phi1, psi1), _ = common_model(group, [phi, psi])
    bad = _invariance_failure(psi1, moved)
    if bad is not None:
        raise PsiNotInvariant(bad.name)
    fr = factor_through(psi1, phi1)
    if fr.set_map is None:
        raise TheoremViolation("an invariant map does not factor through the covering")
    rebuilt = compose_direct(_unchecked(fr), fr.pi)
    if rebuilt.vertex_map != fr.psi.vertex_map or any(
            rebuilt.edge_map[e] != fr.psi.edge_map[e] for e in rebuilt.edge_map):
        raise TheoremViolation("theta . phi does not reproduce psi")
    bad = _invariance_failure(phi1, moved)
    if bad is None and _classify_prepared(phi1, moved, deg).is_galois and not fr.is_finite_harmonic:
        raise TheoremViolation("Galois covering without the universal mapping property")
    return fr


def _unchecked(fr: FactorResult) -> MorphismRep:
    """Theta as a model map; non-integral scales are kept only symbolically."""
    t = fr.set_map
    return MorphismRep(t.source, t.target, t.vertex_map, t.edge_map,
                       {e: 1 for e in t.edge_map}, "theta")


# -- prenormal property -------------------------------------------------------------


@dataclass(frozen=True)
class PrenormalRow:
    edge: str
    witnesses: tuple  # labels of every h with (psi.f)|e = (h.psi)|e


@dataclass(frozen=True)
class PrenormalReport:
    rows: tuple
    group: ActionGroup
    psi: MorphismRep
    f: Automorphism

    @property
    def all_found(self) -> bool:
        return all(r.witnesses for r in self.rows)

    @property
    def failures(self) -> list:
        return [r.edge for r in self.rows if not r.witnesses]


def prenormal_check(phi: MorphismRep, group: ActionGroup, psi: MorphismRep, f: Automorphism,
                    require_normal: bool = True, strict: bool = True) -> PrenormalReport:
    """Edge-wise witnesses ``h`` with ``(psi . f)|e = (h . psi)|e``.

    ``psi`` maps a curve into ``group.curve`` and ``f`` is an automorphism
    of ``psi.source`` with ``phi . psi . f = phi . psi``.  The model of the
    source is the pullback through ``psi`` of a model on which the action
    is equivariant and ``phi`` maps edges onto edges.
    """
    if f.curve != psi.source:
        raise CompositionMismatch("f must act on the source model of psi")
    if require_normal:
        cls = classify_covering(phi, group)
        if not cls.is_normal:
            raise PhiNotNormal(f"{phi.name} is not {group.name}-normal")
    _require_harmonic(phi)
    pts: set = set()
    for _ in range(64):
        moved, (phi1,), r = common_model(group, [phi], pts)
        ident = identify(psi.target, moved.curve)
        if ident is None:
            raise CompositionMismatch("psi does not map into the acted-on curve")
        if not ident.b_onto.is_identity:
            pts.update(lower_point(r, p) for p in ident.b_onto.new_points())
            continue
        psi1, rs = pullback_target(psi, ident.a_onto)
        base = set(rs.new_points())
        closure = set(base)
        frontier = set(base)
        while frontier:
            nxt = {f.apply_point(p) for p in frontier} - closure
            closure |= nxt
            frontier = nxt
        if closure == base:
            break
        for p in closure - base:
            q = push(psi, p)
            q = lift_point(ident.a_onto, q)
            if not q.is_vertex:
                pts.add(lower_point(r, q))
    else:
        raise TheoremViolation("prenormal refinement does not stabilize")
    f1m = transport(f.as_morphism(), rs, rs)
    f1 = Automorphism(rs.target, f1m.vertex_map, f1m.edge_map)
    left = compose_direct(phi1, compose_direct(psi1, f1.as_morphism()))
    right = compose_direct(phi1, psi1)
    if left != right:
        raise CompositionMismatch("phi . psi . f differs from phi . psi")
    psi_f = compose_direct(psi1, f1.as_morphism())
    hs = [(g, compose_direct(g.as_morphism(), psi1)) for g in moved.elements]
    rows = []
    for e in rs.target.edges:
        want = (psi_f.edge_map[e.id], psi_f.edge_degrees[e.id])
        found = tuple(g.name for g, hm in hs
                      if (hm.edge_map[e.id], hm.edge_degrees[e.id]) == want)
        rows.append(PrenormalRow(e.id, found))
    report = PrenormalReport(tuple(rows), moved, psi1, f1)
    if strict and require_normal and not report.all_found:
        raise TheoremViolation(f"no prenormal witness on edges {report.failures}")
    return report

