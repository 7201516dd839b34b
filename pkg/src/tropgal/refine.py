"""Model changes that leave the underlying tropical curve untouched.

A :class:`RefinementMap` always points from a coarse model to a finer one:
every coarse vertex is a fine vertex and every coarse edge is an ordered
path of fine edges.  Positions on a coarse edge are measured from its
reference end (see :attr:`Edge.ref_side`); the point at infinity sits at
coordinate ``INF``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable

from .curve import Curve, Edge, Point, id_key
from .errors import OffsetOutOfRange, RefinementConflict
from .lengths import INF, format_length, total_length


@dataclass(frozen=True)
class Segment:
    """Where a fine edge sits on a coarse edge.

    ``start`` and ``end`` are the coordinates of the fine edge's ``a`` and
    ``b`` endpoints along ``coarse``.
    """

    coarse: str
    start: object
    end: object

    @property
    def low(self):
        return min(self.start, self.end)

    @property
    def high(self):
        return max(self.start, self.end)

    @property
    def forward(self) -> bool:
        return self.start < self.end


@dataclass(frozen=True, eq=False)
class RefinementMap:
    source: Curve
    target: Curve
    vertex_images: dict
    edge_paths: dict  # coarse edge -> tuple of (fine edge, reversed)

    @classmethod
    def identity(cls, curve: Curve) -> "RefinementMap":
        return cls(
            curve,
            curve,
            {v: v for v in curve.vertices},
            {e.id: ((e.id, False),) for e in curve.edges},
        )

    @property
    def is_identity(self) -> bool:
        return self.source == self.target and all(
            len(p) == 1 and p[0] == (e, False) for e, p in self.edge_paths.items()
        ) and all(k == v for k, v in self.vertex_images.items())

    def then(self, other: "RefinementMap") -> "RefinementMap":
        """Composite refinement ``self.source -> other.target``."""
        if self.target != other.source:
            raise RefinementConflict("refinements are not composable")
        vimg = {v: other.vertex_images[w] for v, w in self.vertex_images.items()}
        paths = {}
        for e, path in self.edge_paths.items():
            out = []
            for piece, rev in path:
                sub = other.edge_paths[piece]
                if rev:
                    sub = tuple((p, not r) for p, r in reversed(sub))
                out.extend(sub)
            paths[e] = tuple(out)
        return RefinementMap(self.source, other.target, vimg, paths)

    @cached_property
    def segments(self) -> dict[str, Segment]:
        """Fine edge -> its segment on the coarse model."""
        out: dict[str, Segment] = {}
        for c in self.source.edges:
            path = self.edge_paths[c.id]
            lengths = [self.target.edge(p).length for p, _ in path]
            if c.ref_side == "a":
                coords = [Fraction(0)]
                for ln in lengths:
                    coords.append(coords[-1] + ln)
            else:
                back = [Fraction(0)]
                for ln in reversed(lengths):
                    back.append(back[-1] + ln)
                coords = list(reversed(back))
            for i, (piece, rev) in enumerate(path):
                lo, hi = coords[i], coords[i + 1]
                out[piece] = Segment(c.id, hi, lo) if rev else Segment(c.id, lo, hi)
        return out

    @cached_property
    def positions(self) -> dict[str, Point]:
        """Fine vertex -> the point of the coarse model it sits at."""
        pos = {w: Point.at(v) for v, w in self.vertex_images.items()}
        for piece, seg in self.segments.items():
            fe = self.target.edge(piece)
            for side, coord in (("a", seg.start), ("b", seg.end)):
                v = fe.end(side)
                if v in pos:
                    continue
                pos[v] = self.source.point(seg.coarse, coord)
        return pos

    def new_points(self) -> list[Point]:
        return sorted(
            (p for p in self.positions.values() if not p.is_vertex),
            key=lambda p: (id_key(p.edge), p.offset),
        )

    def vertex_at(self) -> dict[Point, str]:
        return {p: v for v, p in self.positions.items()}

    def check(self) -> None:
        """Assert every coarse edge is exactly covered by its path."""
        for c in self.source.edges:
            path = self.edge_paths[c.id]
            got = total_length(self.target.edge(p).length for p, _ in path)
            if got != c.length:
                raise RefinementConflict(f"path of {c.id} has length {got}, want {c.length}")
            cur = self.vertex_images[c.a]
            for piece, rev in path:
                fe = self.target.edge(piece)
                start, stop = (fe.b, fe.a) if rev else (fe.a, fe.b)
                if start != cur:
                    raise RefinementConflict(f"path of {c.id} is broken at {piece}")
                cur = stop
            if cur != self.vertex_images[c.b]:
                raise RefinementConflict(f"path of {c.id} ends at the wrong vertex")


def refine_at(curve: Curve, points: Iterable[Point], name: str | None = None):
    """Subdivide ``curve`` at every interior point in ``points``.

    Returns ``(fine, refinement)``.  Vertex points are ignored.  New vertices
    are named ``<edge>~<offset>`` and pieces ``<edge>:<k>``, numbered from the
    ``a`` end.
    """
    cuts: dict[str, set] = defaultdict(set)
    for p in points:
        if p.is_vertex:
            continue
        curve.check_point(p)
        cuts[p.edge].add(p.offset)
    if not cuts:
        return curve, RefinementMap.identity(curve)

    taken: set[str] = set()
    vertices = list(curve.vertices)
    edges: list[Edge] = []
    paths = {}
    for e in curve.edges:
        if e.id not in cuts:
            edges.append(e)
            paths[e.id] = ((e.id, False),)
            continue
        offs = sorted(cuts[e.id])
        # coordinates of the breakpoints listed from the a end
        if e.ref_side == "a":
            chain = offs
        else:
            chain = list(reversed(offs))
        names = []
        for off in chain:
            v = curve.fresh_id(f"{e.id}~{format_length(off)}", taken)
            taken.add(v)
            names.append(v)
        vertices.extend(names)
        stops = [e.a] + names + [e.b]
        if e.ref_side == "a":
            coords = [Fraction(0)] + chain + [e.length]
        else:
            coords = [INF] + chain + [Fraction(0)]
        path = []
        for k in range(len(stops) - 1):
            ident = curve.fresh_id(f"{e.id}:{k + 1}", taken)
            taken.add(ident)
            if e.ref_side == "a":
                length = coords[k + 1] - coords[k] if coords[k + 1] is not INF else INF
            else:
                length = INF if coords[k] is INF else coords[k] - coords[k + 1]
            inf_end = None
            if length is INF:
                inf_end = "a" if stops[k] == e.end(e.infinite_end) and k == 0 else "b"
            edges.append(Edge(ident, stops[k], stops[k + 1], length, inf_end))
            path.append((ident, False))
        paths[e.id] = tuple(path)
    fine = Curve(name or curve.name, tuple(vertices), tuple(edges))
    r = RefinementMap(curve, fine, {v: v for v in curve.vertices}, paths)
    return fine, r


def subdivide(curve: Curve, edge: str, offset):
    """Split ``edge`` at ``offset`` (measured from its reference end)."""
    e = curve.edge(edge)
    offset = Fraction(offset)
    if offset <= 0 or (not e.is_infinite and offset >= e.length):
        raise OffsetOutOfRange(
            f"offset {format_length(offset)} not strictly inside {edge} "
            f"(length {format_length(e.length)})"
        )
    return refine_at(curve, [Point.on(edge, offset)])


def loopless_refinement(curve: Curve):
    """Subdivide every loop at its midpoint."""
    mids = [Point.on(e.id, e.length / 2) for e in curve.edges if e.is_loop]
    return refine_at(curve, mids)


def midpoint_refinement(curve: Curve, edge_ids: Iterable[str]):
    mids = [Point.on(e, curve.edge(e).length / 2) for e in edge_ids]
    return refine_at(curve, mids)


def canonical_model(curve: Curve, keep: Iterable[str] = ()):
    """Suppress valence-2 vertices that are neither kept nor at infinity.

    Returns ``(canonical, refinement)`` where ``refinement`` maps the
    canonical model onto ``curve``.  A circle keeps its smallest vertex.
    """
    keep = frozenset(keep)
    at_inf = curve.points_at_infinity

    def suppressible(v):
        return curve.degree(v) == 2 and v not in at_inf and v not in keep

    retained = [v for v in curve.vertices if not suppressible(v)]
    if not retained:
        retained = [min(curve.vertices, key=id_key)]
    retained_set = set(retained)

    used: set[str] = set()
    new_edges: list[Edge] = []
    paths = {}
    for r in retained:
        for e, side in curve.incident(r):
            if e.id in used:
                continue
            chain = []  # (edge, forward)
            cur_edge, cur_side = e, side
            while True:
                used.add(cur_edge.id)
                forward = cur_side == "a"
                chain.append((cur_edge, forward))
                w = cur_edge.end(cur_edge.other_side(cur_side))
                if w in retained_set:
                    end = w
                    break
                nxt = [(f, s) for f, s in curve.incident(w) if f.id not in used]
                if not nxt:
                    # closed a circle through suppressed vertices
                    end = w
                    break
                cur_edge, cur_side = nxt[0]
            start = r
            lead = min((c[0] for c in chain), key=lambda x: id_key(x.id))
            lead_forward = next(f for c, f in chain if c.id == lead.id)
            if not lead_forward:
                chain = [(c, not f) for c, f in reversed(chain)]
                start, end = end, start
            length = total_length(c.length for c, _ in chain)
            inf_end = None
            if length is INF:
                first, ffw = chain[0]
                last, lfw = chain[-1]
                if first.is_infinite and first.end(first.infinite_end) == start:
                    inf_end = "a"
                else:
                    inf_end = "b"
            if start in at_inf and end in at_inf:
                # a line with both ends at infinity keeps one interior vertex
                inner = {c.end(s) for c, _ in chain for s in ("a", "b")} - at_inf
                return canonical_model(curve, keep | {min(inner, key=id_key)})
            new_edges.append(Edge(lead.id, start, end, length, inf_end))
            paths[lead.id] = tuple((c.id, not f) for c, f in chain)
    canon = Curve(curve.name, tuple(retained), tuple(new_edges))
    r = RefinementMap(canon, curve, {v: v for v in retained}, paths)
    return canon, r


def relative_refinement(coarse_to_x: RefinementMap, coarse_to_y: RefinementMap) -> RefinementMap:
    """Given refinements ``C -> X`` and ``C -> Y`` with Y at least as fine
    as X, return the refinement ``X -> Y``."""
    if coarse_to_x.source != coarse_to_y.source:
        raise RefinementConflict("refinements start from different models")
    x, y = coarse_to_x.target, coarse_to_y.target
    y_at = coarse_to_y.vertex_at()
    vimg = {}
    for v, p in coarse_to_x.positions.items():
        if p not in y_at:
            raise RefinementConflict(f"{y.name} has no vertex at {p}")
        vimg[v] = y_at[p]
    by_coarse: dict[str, list[tuple[str, Segment]]] = defaultdict(list)
    for piece, seg in coarse_to_y.segments.items():
        by_coarse[seg.coarse].append((piece, seg))
    paths = {}
    for xe in x.edges:
        seg = coarse_to_x.segments[xe.id]
        inside = [
            (piece, s) for piece, s in by_coarse[seg.coarse]
            if seg.low <= s.low and s.high <= seg.high
        ]
        inside.sort(key=lambda ps: ps[1].low, reverse=not seg.forward)
        paths[xe.id] = tuple((piece, s.forward != seg.forward) for piece, s in inside)
    r = RefinementMap(x, y, vimg, paths)
    r.check()
    return r
