"""Finite (harmonic) morphisms between curve models.

A :class:`MorphismRep` stores a morphism on explicit models: a vertex map,
an edge map with an orientation flag, and the dilation factor on every edge.
Maps between different models of the same curves are brought onto common
refinements by :func:`transport`, :func:`pullback_source`,
:func:`pullback_target` and :func:`align_on`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .curve import Curve, Edge, Point, id_key
from .errors import (
    DegreeInconsistentAt,
    EndpointMismatch,
    FibersDoNotRefine,
    IncompatibleMiddleCurve,
    InfiniteEdgeTargetFinite,
    LengthScaleViolation,
    ModelError,
    MorphismError,
    NotHarmonicAt,
    RefinementConflict,
    UnknownItem,
)
from .lengths import INF, format_length
from .refine import RefinementMap, refine_at

ALIGN_ROUNDS = 32


@dataclass(frozen=True, eq=False)
class MorphismRep:
    source: Curve
    target: Curve
    vertex_map: Mapping[str, str]
    edge_map: Mapping[str, tuple[str, bool]]  # edge -> (image edge, flip)
    edge_degrees: Mapping[str, int]
    name: str = ""
    declared_degree: int | None = None  # only meaningful between singletons

    def __eq__(self, other):
        if not isinstance(other, MorphismRep):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and dict(self.vertex_map) == dict(other.vertex_map)
            and dict(self.edge_map) == dict(other.edge_map)
            and dict(self.edge_degrees) == dict(other.edge_degrees)
        )

    def __hash__(self):
        return hash((self.source, self.target, tuple(sorted(self.vertex_map.items()))))

    def __repr__(self):
        return f"MorphismRep({self.name or '?'}: {self.source.name} -> {self.target.name})"

    def image(self, edge: str) -> str:
        return self.edge_map[edge][0]

    def flipped(self, edge: str) -> bool:
        return self.edge_map[edge][1]

    def dilation(self, edge: str) -> int:
        return self.edge_degrees[edge]

    def edge_fiber(self, target_edge: str) -> list[str]:
        return [e for e, (t, _) in self.edge_map.items() if t == target_edge]

    def vertex_fiber(self, target_vertex: str) -> list[str]:
        return [v for v, w in self.vertex_map.items() if w == target_vertex]

    def renamed(self, name: str) -> "MorphismRep":
        return MorphismRep(self.source, self.target, self.vertex_map, self.edge_map,
                           self.edge_degrees, name, self.declared_degree)


def identity_morphism(curve: Curve, name: str = "id") -> MorphismRep:
    return MorphismRep(
        curve,
        curve,
        {v: v for v in curve.vertices},
        {e.id: (e.id, False) for e in curve.edges},
        {e.id: 1 for e in curve.edges},
        name,
        1 if not curve.edges else None,
    )


def map_offset(src: Edge, dst: Edge, flip: bool, degree: int, u):
    """Coordinate on ``dst`` of the point at coordinate ``u`` on ``src``."""
    if u is INF:
        return INF
    side = src.ref_side if not flip else src.other_side(src.ref_side)
    if side == dst.ref_side:
        return degree * u
    return dst.length - degree * u


def unmap_offset(src: Edge, dst: Edge, flip: bool, degree: int, u):
    if u is INF:
        return INF
    side = src.ref_side if not flip else src.other_side(src.ref_side)
    if side == dst.ref_side:
        return Fraction(u) / degree
    return (dst.length - u) / degree


def push(m: MorphismRep, p: Point) -> Point:
    if p.is_vertex:
        return Point.at(m.vertex_map[p.vertex])
    e2, flip = m.edge_map[p.edge]
    src, dst = m.source.edge(p.edge), m.target.edge(e2)
    return m.target.point(e2, map_offset(src, dst, flip, m.edge_degrees[p.edge], p.offset))


def pull(m: MorphismRep, q: Point) -> list[Point]:
    if q.is_vertex:
        return [Point.at(v) for v in m.vertex_fiber(q.vertex)]
    out = []
    dst = m.target.edge(q.edge)
    for e in m.edge_fiber(q.edge):
        src = m.source.edge(e)
        u = unmap_offset(src, dst, m.flipped(e), m.edge_degrees[e], q.offset)
        out.append(m.source.point(e, u))
    return out


# -- verification ------------------------------------------------------------


@dataclass
class FiniteMorphismVerdict:
    ok: bool
    edges: dict  # edge -> None or error message
    errors: list = field(default_factory=list)

    def raise_first(self):
        if self.errors:
            raise self.errors[0]


def check_finite_morphism(m: MorphismRep, strict: bool = True) -> FiniteMorphismVerdict:
    """Check the three finite-morphism conditions on the stored models.

    Vertices go to vertices, edges onto edges, and every edge is dilated by
    its declared integer degree.  Infinite edges must go to infinite edges
    with the point at infinity landing on the point at infinity.
    """
    src, tgt = m.source, m.target
    if not (src.loopless and tgt.loopless):
        raise ModelError("finite morphisms are checked on loopless models")
    for v in src.vertices:
        w = m.vertex_map.get(v)
        if w is None or not tgt.has_vertex(w):
            raise UnknownItem(f"vertex {v} has no valid image")
    verdicts = {}
    errors = []
    for e in src.edges:
        try:
            _check_edge(m, e)
        except MorphismError as exc:
            verdicts[e.id] = str(exc)
            errors.append(exc)
        else:
            verdicts[e.id] = None
    verdict = FiniteMorphismVerdict(not errors, verdicts, errors)
    if strict:
        verdict.raise_first()
    return verdict


def _check_edge(m: MorphismRep, e: Edge) -> None:
    if e.id not in m.edge_map or e.id not in m.edge_degrees:
        raise MorphismError(f"edge {e.id} is not mapped", e.id)
    e2, flip = m.edge_map[e.id]
    if not m.target.has_edge(e2):
        raise MorphismError(f"edge {e.id} maps to unknown edge {e2}", e.id)
    d = m.edge_degrees[e.id]
    if not isinstance(d, int) or isinstance(d, bool) or d <= 0:
        raise MorphismError(f"edge {e.id} has non-positive degree {d!r}", e.id)
    f = m.target.edge(e2)
    ends = (f.b, f.a) if flip else (f.a, f.b)
    if (m.vertex_map[e.a], m.vertex_map[e.b]) != ends:
        raise EndpointMismatch(f"edge {e.id}: endpoints do not land on {e2}", e.id)
    if e.is_infinite:
        if not f.is_infinite:
            raise InfiniteEdgeTargetFinite(f"infinite edge {e.id} maps to finite {e2}", e.id)
        side = e.infinite_end if not flip else e.other_side(e.infinite_end)
        if side != f.infinite_end:
            raise InfiniteEdgeTargetFinite(
                f"edge {e.id}: point at infinity does not map to infinity", e.id)
        return
    if f.is_infinite:
        raise LengthScaleViolation(f"finite edge {e.id} maps onto infinite {e2}", e.id)
    if f.length != d * e.length:
        raise LengthScaleViolation(
            f"edge {e.id}: {d}*{format_length(e.length)} != {format_length(f.length)}", e.id)


@dataclass(frozen=True)
class HarmonicCertificate:
    vertex_degrees: dict
    global_degree: int


def check_harmonic(m: MorphismRep) -> HarmonicCertificate:
    """Compute local degrees and the global degree, verifying harmonicity."""
    check_finite_morphism(m)
    src, tgt = m.source, m.target
    if not src.edges:
        if tgt.edges or len(tgt.vertices) != 1 or len(src.vertices) != 1:
            raise MorphismError("a single point maps harmonically only onto a single point")
        if m.declared_degree is None:
            raise MorphismError("a map between single points needs a declared degree")
        v = src.vertices[0]
        return HarmonicCertificate({v: m.declared_degree}, m.declared_degree)
    local = {}
    for v in src.vertices:
        w = m.vertex_map[v]
        sums = {f.id: 0 for f, _ in tgt.incident(w)}
        for e, _side in src.incident(v):
            sums[m.edge_map[e.id][0]] += m.edge_degrees[e.id]
        values = set(sums.values())
        if len(values) != 1 or 0 in values:
            raise NotHarmonicAt(v, sums)
        local[v] = values.pop()
    fibers = {w: 0 for w in tgt.vertices}
    for v, d in local.items():
        fibers[m.vertex_map[v]] += d
    values = set(fibers.values())
    if len(values) != 1:
        raise DegreeInconsistentAt(fibers)
    return HarmonicCertificate(local, values.pop())


def is_finite_harmonic(m: MorphismRep) -> bool:
    try:
        check_harmonic(m)
    except (MorphismError, ModelError):
        return False
    return True


def degree(m: MorphismRep) -> int:
    return check_harmonic(m).global_degree


# -- moving maps across refinements -------------------------------------------


def lift_point(r: RefinementMap, p: Point) -> Point:
    """Express a point of ``r.source`` on the finer ``r.target``."""
    if p.is_vertex:
        return Point.at(r.vertex_images[p.vertex])
    u = p.offset
    for piece, seg in r.segments.items():
        if seg.coarse != p.edge or not (seg.low <= u <= seg.high):
            continue
        if u == seg.start:
            return Point.at(r.target.edge(piece).a)
        if u == seg.end:
            return Point.at(r.target.edge(piece).b)
        fe = r.target.edge(piece)
        ref = seg.start if fe.ref_side == "a" else seg.end
        return Point.on(piece, abs(u - ref))
    raise RefinementConflict(f"point {p} is not covered by the refinement")


def lower_point(r: RefinementMap, p: Point) -> Point:
    """Express a point of the finer ``r.target`` on ``r.source``."""
    if p.is_vertex:
        return r.positions[p.vertex]
    seg = r.segments[p.edge]
    fe = r.target.edge(p.edge)
    ref, other = (seg.start, seg.end) if fe.ref_side == "a" else (seg.end, seg.start)
    u = ref + p.offset if other > ref else ref - p.offset
    return r.source.point(seg.coarse, u)


def _segment_index(r: RefinementMap):
    index = {}
    for piece, seg in r.segments.items():
        index[(seg.coarse, seg.low, seg.high)] = (piece, seg)
    return index


def transport(m: MorphismRep, rs: RefinementMap, rt: RefinementMap, name=None) -> MorphismRep:
    """Restate ``m`` on refinements of its source and target.

    Every breakpoint of ``rs`` must map onto a breakpoint of ``rt``.
    """
    if rs.source != m.source or rt.source != m.target:
        raise RefinementConflict("refinements do not start at the morphism's models")
    if rs.is_identity and rt.is_identity:
        return m
    t_at = rt.vertex_at()
    t_index = _segment_index(rt)
    vmap = {}
    for w, p in rs.positions.items():
        q = push(m, p)
        if q not in t_at:
            raise RefinementConflict(f"image {q} of {w} is not a vertex of {rt.target.name}")
        vmap[w] = t_at[q]
    emap, degs = {}, {}
    for piece, seg in rs.segments.items():
        e = m.source.edge(seg.coarse)
        e2, flip = m.edge_map[e.id]
        f = m.target.edge(e2)
        d = m.edge_degrees[e.id]
        s2 = map_offset(e, f, flip, d, seg.start)
        t2 = map_offset(e, f, flip, d, seg.end)
        key = (e2, min(s2, t2), max(s2, t2))
        if key not in t_index:
            raise RefinementConflict(f"piece {piece} does not map onto a single edge")
        piece2, seg2 = t_index[key]
        emap[piece] = (piece2, seg2.start != s2)
        degs[piece] = d
    return MorphismRep(rs.target, rt.target, vmap, emap, degs,
                       name if name is not None else m.name, m.declared_degree)


def saturate(m: MorphismRep, points: Iterable[Point]) -> set[Point]:
    """All interior points with the same image as some point in ``points``."""
    out = set()
    for p in points:
        if p.is_vertex:
            continue
        for q in pull(m, push(m, p)):
            if not q.is_vertex:
                out.add(q)
    return out


def pullback_target(m: MorphismRep, rt: RefinementMap):
    """Refine the source so ``m`` lands on the refined target ``rt.target``.

    Returns ``(m', rs)`` with ``rs`` the induced source refinement.
    """
    pts = set()
    for q in rt.new_points():
        pts.update(p for p in pull(m, q) if not p.is_vertex)
    _, rs = refine_at(m.source, pts)
    return transport(m, rs, rt), rs


def pullback_source(m: MorphismRep, rs: RefinementMap):
    """Restate ``m`` on (a refinement of) ``rs.target``.

    Breakpoints of ``rs`` are saturated along the fibers of ``m``, which may
    force further subdivision.  Returns ``(m', extra)`` where ``extra`` refines
    ``rs.target`` onto the new source.
    """
    if rs.is_identity:
        return m, RefinementMap.identity(rs.target)
    base = set(rs.new_points())
    full = saturate(m, base) | base
    if full == base:
        extra = RefinementMap.identity(rs.target)
        total = rs
    else:
        lifted = [lift_point(rs, p) for p in sorted(full - base, key=_point_key)]
        _, extra = refine_at(rs.target, lifted)
        total = rs.then(extra)
    _, rt = refine_at(m.target, {push(m, p) for p in full})
    return transport(m, total, rt), extra


def _point_key(p: Point):
    return (id_key(p.vertex or p.edge), p.offset or 0)


def align_on(base: Curve, pairs: Sequence[tuple[MorphismRep, RefinementMap]],
             extra: Iterable[Point] = ()):
    """Restate several morphisms on one common refinement of ``base``.

    ``pairs`` holds ``(m, r)`` with ``r`` refining ``m.source`` onto ``base``.
    Returns ``(morphisms, refinement)`` where every returned morphism has
    source ``refinement.target`` and the union of all fibers through
    breakpoints is subdivided.
    """
    points = {p for p in extra if not p.is_vertex}
    for _ in range(ALIGN_ROUNDS):
        fine, rb = refine_at(base, points)
        out = []
        grew = False
        for m, r in pairs:
            moved, more = pullback_source(m, r.then(rb))
            if not more.is_identity:
                for p in more.new_points():
                    points.add(lower_point(rb, p))
                grew = True
            out.append(moved)
        if not grew:
            return out, rb
    raise RefinementConflict("fibers of the maps do not close up on a finite model")


def align(morphisms: Sequence[MorphismRep], extra: Iterable[Point] = ()):
    """Common refinement for morphisms that share their source model."""
    base = morphisms[0].source
    if any(m.source != base for m in morphisms):
        raise IncompatibleMiddleCurve("align() needs identical source models")
    ident = RefinementMap.identity(base)
    return align_on(base, [(m, ident) for m in morphisms], extra)


def align_sources(m1: MorphismRep, m2: MorphismRep):
    """Restate two maps from the same curve on one model.

    When the stored source models differ they are identified by a
    degree-one map found by :func:`tropgal.isometry.identify`.
    """
    if m1.source == m2.source:
        (a, b), _ = align([m1, m2])
        return a, b
    from .isometry import identify

    ident = identify(m1.source, m2.source)
    if ident is None:
        raise IncompatibleMiddleCurve("source curves are not isometric")
    (a, b), _ = align_on(ident.common, [(m1, ident.a_onto), (m2, ident.b_onto)])
    return a, b


# -- composition ---------------------------------------------------------------


def compose_direct(outer: MorphismRep, inner: MorphismRep, name: str = "") -> MorphismRep:
    if inner.target != outer.source:
        raise IncompatibleMiddleCurve("middle models differ")
    vmap = {v: outer.vertex_map[w] for v, w in inner.vertex_map.items()}
    emap, degs = {}, {}
    for e, (e1, f1) in inner.edge_map.items():
        e2, f2 = outer.edge_map[e1]
        emap[e] = (e2, f1 != f2)
        degs[e] = inner.edge_degrees[e] * outer.edge_degrees[e1]
    declared = None
    if inner.declared_degree is not None and outer.declared_degree is not None:
        declared = inner.declared_degree * outer.declared_degree
    return MorphismRep(inner.source, outer.target, vmap, emap, degs,
                       name or f"{outer.name}.{inner.name}", declared)


def compose(outer: MorphismRep, inner: MorphismRep, name: str = "") -> MorphismRep:
    """The composite ``outer . inner``.

    If the target model of ``inner`` differs from the source model of
    ``outer``, the two are identified by a degree-one map and both maps are
    restated on a common refinement first.
    """
    if inner.target == outer.source:
        return compose_direct(outer, inner, name)
    from .isometry import identify

    ident = identify(inner.target, outer.source)
    if ident is None:
        raise IncompatibleMiddleCurve(
            f"{inner.target.name} and {outer.source.name} are not isometric")
    inner1, _ = pullback_target(inner, ident.a_onto)
    outer1, extra = pullback_source(outer, ident.b_onto)
    inner2, _ = pullback_target(inner1, extra)
    return compose_direct(outer1, inner2, name)


def invert(m: MorphismRep) -> MorphismRep:
    """Inverse of a bijective degree-one model map."""
    if any(d != 1 for d in m.edge_degrees.values()):
        raise MorphismError("only degree-one maps can be inverted")
    vinv = {w: v for v, w in m.vertex_map.items()}
    einv = {e2: (e, flip) for e, (e2, flip) in m.edge_map.items()}
    if len(vinv) != len(m.target.vertices) or len(einv) != len(m.target.edges):
        raise MorphismError("map is not bijective on the models")
    return MorphismRep(m.target, m.source, vinv, einv, {e: 1 for e in einv},
                       f"{m.name}^-1", m.declared_degree)


def same_map(m1: MorphismRep, m2: MorphismRep) -> bool:
    """Whether two model maps present the same continuous map.

    Both maps must share their source and target models; two model maps on
    the same models agree as maps exactly when their data agree.
    """
    if m1.source != m2.source or m1.target != m2.target:
        raise IncompatibleMiddleCurve("same_map() compares maps on identical models")
    return (dict(m1.vertex_map) == dict(m2.vertex_map)
            and dict(m1.edge_map) == dict(m2.edge_map)
            and dict(m1.edge_degrees) == dict(m2.edge_degrees))


# -- factoring -----------------------------------------------------------------

NOT_WELL_DEFINED = "NotWellDefined"
CONTINUOUS_ONLY = "ContinuousOnly"
FINITE_MORPHISM = "FiniteMorphism"
FINITE_HARMONIC = "FiniteHarmonic"


@dataclass(frozen=True)
class ThetaMap:
    """Set-level map on models: vertices, edges and rational edge scales."""

    source: Curve
    target: Curve
    vertex_map: dict
    edge_map: dict  # edge -> (edge, flip)
    scales: dict  # edge -> Fraction

    def as_morphism(self, name: str = "theta") -> MorphismRep:
        if any(s.denominator != 1 for s in self.scales.values()):
            raise MorphismError("scale factors are not integers")
        return MorphismRep(self.source, self.target, dict(self.vertex_map), dict(self.edge_map),
                           {e: int(s) for e, s in self.scales.items()}, name)


@dataclass(frozen=True)
class FactorResult:
    classification: str
    set_map: ThetaMap | None
    certificate: HarmonicCertificate | None = None
    psi: MorphismRep | None = None  # the factored map, on the aligned models
    pi: MorphismRep | None = None  # the map factored through, aligned
    witness: object = None
    degrees: tuple | None = None  # (deg pi, deg psi) when both are harmonic

    @property
    def is_finite_harmonic(self) -> bool:
        return self.classification == FINITE_HARMONIC

    @property
    def degree(self) -> int | None:
        return self.certificate.global_degree if self.certificate else None

    @property
    def non_integral_scales(self) -> dict:
        if self.set_map is None:
            return {}
        return {e: s for e, s in self.set_map.scales.items() if s.denominator != 1}

    def theta(self) -> MorphismRep:
        return self.set_map.as_morphism()


def _global_degree(m: MorphismRep):
    try:
        return check_harmonic(m).global_degree
    except (MorphismError, ModelError):
        return None


def factor_through(psi: MorphismRep, pi: MorphismRep, strict: bool = False) -> FactorResult:
    """Construct ``theta`` with ``psi = theta . pi`` and classify it.

    Both maps are first restated on a common source model.  The scale of
    ``theta`` on an edge of ``pi.target`` is ``deg_e(psi) / deg_e(pi)`` for
    any edge ``e`` over it.  The result is ``NotWellDefined`` when the fibers
    of ``pi`` do not refine those of ``psi``.
    """
    psi, pi = align_sources(psi, pi)
    degrees = (_global_degree(pi), _global_degree(psi))
    vmap: dict = {}
    for v in pi.source.vertices:
        w, x = pi.vertex_map[v], psi.vertex_map[v]
        if vmap.setdefault(w, x) != x:
            witness = (v, next(u for u in pi.vertex_fiber(w) if psi.vertex_map[u] == vmap[w]))
            if strict:
                raise FibersDoNotRefine(witness)
            return FactorResult(NOT_WELL_DEFINED, None, psi=psi, pi=pi, witness=witness,
                                degrees=degrees)
    emap: dict = {}
    scales: dict = {}
    owner: dict = {}
    for e in pi.source.edges:
        e1, f1 = pi.edge_map[e.id]
        e2, f2 = psi.edge_map[e.id]
        image = (e2, f1 != f2)
        scale = Fraction(psi.edge_degrees[e.id], pi.edge_degrees[e.id])
        if e1 in emap and (emap[e1] != image or scales[e1] != scale):
            witness = (e.id, owner[e1])
            if strict:
                raise FibersDoNotRefine(witness)
            return FactorResult(NOT_WELL_DEFINED, None, psi=psi, pi=pi, witness=witness,
                                degrees=degrees)
        emap[e1], scales[e1], owner[e1] = image, scale, e.id
    theta = ThetaMap(pi.target, psi.target, vmap, emap, scales)
    if any(s.denominator != 1 for s in scales.values()):
        return FactorResult(CONTINUOUS_ONLY, theta, psi=psi, pi=pi, degrees=degrees)
    m = theta.as_morphism()
    if pi.target.edges == () and psi.target.edges == ():
        pass
    try:
        check_finite_morphism(m)
    except (MorphismError, ModelError) as exc:
        return FactorResult(CONTINUOUS_ONLY, theta, psi=psi, pi=pi, witness=str(exc),
                            degrees=degrees)
    try:
        cert = check_harmonic(m)
    except (MorphismError, ModelError) as exc:
        return FactorResult(FINITE_MORPHISM, theta, psi=psi, pi=pi, witness=str(exc),
                            degrees=degrees)
    return FactorResult(FINITE_HARMONIC, theta, cert, psi=psi, pi=pi, degrees=degrees)
