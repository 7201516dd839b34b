"""Isomorphisms of models and identification of isometric curves.

Two models present the same tropical curve when their canonical models
(valence-two vertices suppressed) are isomorphic as metric graphs.  The
search below is a plain backtracking over vertices, pruned by local
signatures; it is meant for the small models this package works with.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Iterator

from .curve import Curve, Point, id_key
from .lengths import INF
from .morphism import MorphismRep, map_offset, transport
from .refine import RefinementMap, canonical_model, refine_at, relative_refinement


def _len_key(length):
    return (1, 0) if length is INF else (0, length)


def _root(ident: str) -> str:
    return ident.split(":")[0].split("~")[0]


def _signature(curve: Curve, v: str):
    inc = sorted((_len_key(e.length), e.is_loop) for e, _ in curve.incident(v))
    return (curve.degree(v), tuple(inc), v in curve.points_at_infinity)


def _between(curve: Curve):
    out = defaultdict(list)
    for e in curve.edges:
        key = (e.a, e.b) if id_key(e.a) <= id_key(e.b) else (e.b, e.a)
        out[key].append(e)
    return out


def _pair(x, y):
    return (x, y) if id_key(x) <= id_key(y) else (y, x)


def _preference(ident: str, candidates):
    """Same id first, then same root id, then natural order."""
    root = _root(ident)
    return sorted(candidates, key=lambda c: (c != ident, _root(c) != root, id_key(c)))


def model_isomorphisms(
    a: Curve,
    b: Curve,
    vertex_ok: Callable[[str, str], bool] | None = None,
) -> Iterator[tuple[dict, dict]]:
    """Yield every isomorphism ``a -> b`` of metric graph models.

    Each result is ``(vertex_map, edge_map)`` where ``edge_map`` sends an
    edge to ``(edge, flip)``.  Identity-like matches come first.
    """
    if len(a.vertices) != len(b.vertices) or len(a.edges) != len(b.edges):
        return
    sig_a = {v: _signature(a, v) for v in a.vertices}
    sig_b = {v: _signature(b, v) for v in b.vertices}
    if sorted(sig_a.values()) != sorted(sig_b.values()):
        return
    by_sig = defaultdict(list)
    for v, s in sig_b.items():
        by_sig[s].append(v)
    between_a, between_b = _between(a), _between(b)

    def lengths(between, x, y):
        return sorted(_len_key(e.length) for e in between.get(_pair(x, y), ()))

    # visit vertices rarest-signature first, then along edges
    counts = defaultdict(int)
    for s in sig_a.values():
        counts[s] += 1
    order: list[str] = []
    seen: set[str] = set()
    for start in sorted(a.vertices, key=lambda v: (counts[sig_a[v]], id_key(v))):
        if start in seen:
            continue
        queue = [start]
        seen.add(start)
        while queue:
            v = queue.pop(0)
            order.append(v)
            for e, side in a.incident(v):
                w = e.end(e.other_side(side))
                if w not in seen:
                    seen.add(w)
                    queue.append(w)

    vmap: dict[str, str] = {}
    used: set[str] = set()

    def extend(i: int):
        if i == len(order):
            yield from _edge_matchings(a, b, vmap, between_a, between_b)
            return
        v = order[i]
        for w in _preference(v, by_sig[sig_a[v]]):
            if w in used or (vertex_ok is not None and not vertex_ok(v, w)):
                continue
            if lengths(between_a, v, v) != lengths(between_b, w, w):
                continue
            if any(lengths(between_a, v, u) != lengths(between_b, w, vmap[u]) for u in vmap):
                continue
            vmap[v] = w
            used.add(w)
            yield from extend(i + 1)
            del vmap[v]
            used.discard(w)

    yield from extend(0)


def _edge_matchings(a, b, vmap, between_a, between_b):
    groups = []
    for (x, y), edges in between_a.items():
        targets = between_b[_pair(vmap[x], vmap[y])]
        by_len = defaultdict(list)
        for f in targets:
            by_len[_len_key(f.length)].append(f)
        for key, block in _blocks(edges):
            groups.append((block, by_len[key]))
    options = []
    for block, targets in groups:
        choices = []
        for perm in _ordered_perms(block, targets):
            per_edge = []
            for e, f in zip(block, perm):
                if e.is_loop:
                    per_edge.append([(e.id, (f.id, False)), (e.id, (f.id, True))])
                else:
                    per_edge.append([(e.id, (f.id, vmap[e.a] != f.a))])
            choices.extend(itertools.product(*per_edge))
        options.append(choices)
    for combo in itertools.product(*options):
        emap = {}
        for part in combo:
            emap.update(dict(part))
        yield dict(vmap), emap


def _blocks(edges):
    by_len = defaultdict(list)
    for e in edges:
        by_len[_len_key(e.length)].append(e)
    return sorted(by_len.items())


def _ordered_perms(block, targets):
    ids = [f.id for f in targets]
    first = []
    remaining = list(targets)
    for e in block:
        pick = _preference(e.id, [f.id for f in remaining])[0]
        f = next(t for t in remaining if t.id == pick)
        first.append(f)
        remaining.remove(f)
    yield tuple(first)
    for perm in itertools.permutations(targets):
        if [f.id for f in perm] != [f.id for f in first]:
            yield perm
    del ids


def as_morphism(a: Curve, b: Curve, vmap: dict, emap: dict, name: str = "iso") -> MorphismRep:
    return MorphismRep(a, b, vmap, emap, {e: 1 for e in emap}, name,
                       1 if not a.edges else None)


def model_automorphisms(curve: Curve, vertex_ok=None) -> list[MorphismRep]:
    return [as_morphism(curve, curve, v, e, "aut")
            for v, e in model_isomorphisms(curve, curve, vertex_ok)]


@dataclass(frozen=True)
class Identification:
    """Two models of one curve placed on a common refinement.

    ``a_onto`` and ``b_onto`` refine the two input models onto ``common``.
    ``iso`` is the degree-one map from a refinement of the first model onto
    ``common``.
    """

    common: Curve
    a_onto: RefinementMap
    b_onto: RefinementMap
    iso: MorphismRep


def _relabel_source(r: RefinementMap, new_source: Curve, vmap: dict, emap: dict) -> RefinementMap:
    """Move a refinement ``X -> Y`` along an isomorphism ``X -> X'``."""
    vimg = {vmap[v]: w for v, w in r.vertex_images.items()}
    paths = {}
    for e, path in r.edge_paths.items():
        f, flip = emap[e]
        paths[f] = tuple((p, not rev) for p, rev in reversed(path)) if flip else path
    return RefinementMap(new_source, r.target, vimg, paths)


def _move_point(cb: Curve, ca: Curve, vmap, emap, p: Point) -> Point:
    if p.is_vertex:
        return Point.at(vmap[p.vertex])
    f, flip = emap[p.edge]
    return cb.point(f, map_offset(ca.edge(p.edge), cb.edge(f), flip, 1, p.offset))


def identify(a: Curve, b: Curve, _swapped: bool = False) -> Identification | None:
    """Find a degree-one identification of two models, or ``None``."""
    shared = set(a.vertices) & set(b.vertices)
    attempts = [shared, set()] if shared else [set()]
    found = None
    for keep in attempts:
        ca, ra = canonical_model(a, keep)
        cb, rb = canonical_model(b, keep)
        found = next(model_isomorphisms(ca, cb), None)
        if found is not None:
            break
    if found is None:
        return None
    vmap, emap = found
    pts_b = set(rb.new_points())
    pts_a = {_move_point(cb, ca, vmap, emap, p) for p in ra.new_points()}
    if not pts_a <= pts_b and pts_b <= pts_a and not _swapped:
        flipped = identify(b, a, _swapped=True)
        if flipped is not None:
            return Identification(flipped.common, flipped.b_onto, flipped.a_onto,
                                  flipped.iso)
    if pts_a <= pts_b:
        common, rc = b, rb
    else:
        common, rc = refine_at(cb, pts_a | pts_b, name=b.name)
    a_moved = _relabel_source(ra, cb, vmap, emap)
    a_onto = relative_refinement(a_moved, rc)
    b_onto = relative_refinement(rb, rc)
    iso = _iso_onto(ca, cb, vmap, emap, rc)
    return Identification(common, a_onto, b_onto, iso)


def _iso_onto(ca: Curve, cb: Curve, vmap, emap, rc: RefinementMap) -> MorphismRep:
    inv_v = {w: v for v, w in vmap.items()}
    inv_e = {f: (e, flip) for e, (f, flip) in emap.items()}
    pulled = []
    for p in rc.new_points():
        e, flip = inv_e[p.edge]
        pulled.append(ca.point(e, map_offset(cb.edge(p.edge), ca.edge(e), flip, 1, p.offset)))
    fa, rfa = refine_at(ca, pulled)
    del inv_v
    return transport(as_morphism(ca, cb, vmap, emap), rfa, rc)


def find_degree_one_morphism(source: Curve, target: Curve) -> MorphismRep | None:
    """A degree-one map between refinements of the two models, if any."""
    ident = identify(source, target)
    return None if ident is None else ident.iso


def isometric(a: Curve, b: Curve) -> bool:
    return identify(a, b) is not None
