"""Quotients of curves by finite isometric actions."""

from __future__ import annotations

from dataclasses import dataclass

from .curve import Curve, Edge, Point, id_key
from .errors import IncompatibleMiddleCurve, MixedCurves, TheoremViolation
from .group import ActionGroup, orbit, refine_group_at, stabilizer
from .lengths import INF
from .morphism import MorphismRep, align_on, check_harmonic, lower_point
from .refine import RefinementMap


@dataclass(frozen=True)
class OrbitRow:
    kind: str  # "vertex" or "edge"
    representative: str
    members: tuple
    stabilizer_order: int
    length: object = None  # quotient edge length, edges only

    @property
    def orbit_size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class QuotientResult:
    quotient_curve: Curve
    projection: MorphismRep
    orbit_table: tuple
    group: ActionGroup  # the action on the refined source model
    refinement: RefinementMap  # input model -> projection.source

    @property
    def degree(self) -> int:
        return self.group.order


def separating_points(group: ActionGroup) -> set:
    """Midpoints of edges whose two ends lie in one vertex orbit.

    Subdividing there makes the action equivariant (no edge is reversed)
    and the quotient loopless.  The set is invariant under the group.
    """
    curve = group.curve
    orbit_of = {}
    for v in curve.vertices:
        if v not in orbit_of:
            for w in orbit(group, v):
                orbit_of[w] = v
    pts = set()
    for e in curve.edges:
        if orbit_of[e.a] == orbit_of[e.b]:
            pts.add(Point.on(e.id, e.length / 2))
    return pts


def prepare(group: ActionGroup):
    """Equivariant, quotient-loopless model for the action and all its subgroups.

    Returns ``(group', refinement)``.  A single model serves every subgroup:
    a smaller group has smaller vertex orbits and reverses fewer edges.
    """
    return refine_group_at(group, separating_points(group))


def common_model(group: ActionGroup, morphisms=(), points=()):
    """Refine the acted-on model until the action and the given maps live
    on one model.

    Every morphism's source must present the same curve as ``group.curve``.
    Returns ``(group', morphisms', refinement)`` where ``group'`` acts on
    ``refinement.target`` and every returned morphism starts there.  The
    model is also prepared for quotients (see :func:`prepare`).
    """
    from .isometry import identify

    base = group.curve
    pts = {p for p in points if not p.is_vertex} | separating_points(group)
    for _ in range(64):
        moved, r = refine_group_at(group, pts)
        model = moved.curve
        grew = False
        pairs = []
        for m in morphisms:
            if m.source == model:
                pairs.append((m, RefinementMap.identity(model)))
            elif m.source == base:
                pairs.append((m, r))
            else:
                ident = identify(m.source, model)
                if ident is None:
                    raise IncompatibleMiddleCurve(f"{m.name} does not start at {base.name}")
                if not ident.b_onto.is_identity:
                    pts.update(lower_point(r, p) for p in ident.b_onto.new_points())
                    grew = True
                    break
                pairs.append((m, ident.a_onto))
        if grew:
            continue
        if not pairs:
            return moved, [], r
        out, extra = align_on(model, pairs)
        if extra.is_identity:
            return moved, out, r
        pts.update(lower_point(r, p) for p in extra.new_points())
    raise TheoremViolation("refinement of the action model does not stabilize")


def quotient(curve: Curve, group: ActionGroup, name: str | None = None) -> QuotientResult:
    """Quotient curve and projection, on an equivariant refinement."""
    if curve != group.curve:
        raise MixedCurves("group acts on a different model")
    moved, r = prepare(group)
    return quotient_prepared(moved, r, name)


def quotient_prepared(group: ActionGroup, r: RefinementMap | None = None,
                      name: str | None = None) -> QuotientResult:
    """Quotient for an action already on a prepared model."""
    curve = group.curve
    if r is None:
        r = RefinementMap.identity(curve)
    rep_v: dict[str, str] = {}
    rows = []
    for v in curve.vertices:
        if v in rep_v:
            continue
        members = sorted(orbit(group, v), key=id_key)
        for w in members:
            rep_v[w] = members[0]
        rows.append(OrbitRow("vertex", members[0], tuple(members),
                             stabilizer(group, v).order))
    rep_e: dict[str, str] = {}
    q_edges = []
    for e in curve.edges:
        if e.id in rep_e:
            continue
        members = sorted(orbit(group, e.id), key=id_key)
        rep = curve.edge(members[0])
        stab = stabilizer(group, rep.id).order
        a, b = rep_v[rep.a], rep_v[rep.b]
        if a == b:
            raise TheoremViolation(f"edge orbit of {rep.id} closes a loop on a prepared model")
        length = INF if rep.is_infinite else stab * rep.length
        q_edges.append(Edge(rep.id, a, b, length, rep.infinite_end))
        for f in members:
            rep_e[f] = rep.id
        rows.append(OrbitRow("edge", rep.id, tuple(members), stab, length))
    qname = name or f"{curve.name}/{group.name}"
    q = Curve(qname, tuple(sorted(set(rep_v.values()), key=id_key)), tuple(q_edges))
    emap, degs = {}, {}
    for e in curve.edges:
        target = q.edge(rep_e[e.id])
        emap[e.id] = (target.id, rep_v[e.a] != target.a)
        degs[e.id] = stabilizer(group, e.id).order
    proj = MorphismRep(curve, q, dict(rep_v), emap, degs, f"pi_{group.name}",
                       group.order if not curve.edges else None)
    cert = check_harmonic(proj)
    if cert.global_degree != group.order:
        raise TheoremViolation(
            f"projection has degree {cert.global_degree}, expected |G| = {group.order}")
    return QuotientResult(q, proj, tuple(rows), group, r)
