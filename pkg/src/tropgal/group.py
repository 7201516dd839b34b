"""Finite groups acting on a curve model by automorphisms."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .curve import Curve, Point, id_key
from .errors import (
    CapExceeded,
    EndpointMismatch,
    GroupTooLarge,
    InfinityNotPreserved,
    LengthNotPreserved,
    MixedCurves,
    NotBijective,
    RequiresEquivariantModel,
    TheoremViolation,
    UnknownItem,
)
from .morphism import MorphismRep, map_offset, transport
from .refine import RefinementMap, midpoint_refinement, refine_at

DEFAULT_CAP = 512
SUBGROUP_BOUND = 64


@dataclass(frozen=True, eq=False)
class Automorphism:
    curve: Curve
    vmap: Mapping[str, str]
    emap: Mapping[str, tuple[str, bool]]
    label: str = ""

    @cached_property
    def key(self):
        return (
            tuple(self.vmap[v] for v in self.curve.vertices),
            tuple(self.emap[e.id] for e in self.curve.edges),
        )

    def __eq__(self, other):
        if not isinstance(other, Automorphism):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"Automorphism({self.cycles()})"

    def __mul__(self, other: "Automorphism") -> "Automorphism":
        """``self * other`` applies ``other`` first."""
        vmap = {v: self.vmap[w] for v, w in other.vmap.items()}
        emap = {}
        for e, (f, flip) in other.emap.items():
            g, flip2 = self.emap[f]
            emap[e] = (g, flip != flip2)
        return Automorphism(self.curve, vmap, emap)

    def inverse(self) -> "Automorphism":
        vmap = {w: v for v, w in self.vmap.items()}
        emap = {f: (e, flip) for e, (f, flip) in self.emap.items()}
        return Automorphism(self.curve, vmap, emap)

    @property
    def name(self) -> str:
        """Label carried over from the model the element was defined on."""
        return self.label or self.cycles()

    @property
    def is_identity(self) -> bool:
        return all(v == w for v, w in self.vmap.items()) and all(
            e == f and not flip for e, (f, flip) in self.emap.items())

    def apply_point(self, p: Point) -> Point:
        if p.is_vertex:
            return Point.at(self.vmap[p.vertex])
        f, flip = self.emap[p.edge]
        c = self.curve
        return c.point(f, map_offset(c.edge(p.edge), c.edge(f), flip, 1, p.offset))

    def apply(self, item):
        if isinstance(item, Point):
            return self.apply_point(item)
        if item in self.vmap:
            return self.vmap[item]
        if item in self.emap:
            return self.emap[item][0]
        raise UnknownItem(f"{item!r} is neither a vertex nor an edge")

    def as_morphism(self) -> MorphismRep:
        return MorphismRep(self.curve, self.curve, dict(self.vmap), dict(self.emap),
                           {e: 1 for e in self.emap}, self.name,
                           1 if not self.curve.edges else None)

    def cycles(self) -> str:
        """Cycle notation on edges; a trailing ``*`` marks a reversed cycle."""
        seen = set()
        parts = []
        for e in self.curve.edges:
            if e.id in seen:
                continue
            cyc = [e.id]
            seen.add(e.id)
            cur, flip = self.emap[e.id]
            flips = flip
            while cur != e.id:
                cyc.append(cur)
                seen.add(cur)
                cur, flip = self.emap[cur]
                flips ^= flip
            if len(cyc) > 1 or flips:
                parts.append("(" + " ".join(cyc) + ")" + ("*" if flips else ""))
        if not parts:
            moved = [v for v in self.curve.vertices if self.vmap[v] != v]
            if moved:
                return "<" + " ".join(f"{v}>{self.vmap[v]}" for v in moved) + ">"
            return "()"
        return "".join(parts)


def identity_automorphism(curve: Curve) -> Automorphism:
    return Automorphism(curve, {v: v for v in curve.vertices},
                        {e.id: (e.id, False) for e in curve.edges}, "id")


def make_automorphism(curve: Curve, vertex_map: Mapping[str, str], edge_map: Mapping,
                      label: str = "") -> Automorphism:
    """Validate and build an automorphism.

    ``edge_map`` values are edge ids or ``(edge, flip)`` pairs.  The flip
    of a non-loop edge is inferred from the vertex map when not given;
    a loop without an explicit flip keeps its orientation.
    """
    vmap = {v: vertex_map.get(v, v) for v in curve.vertices}
    if set(vmap.values()) != set(curve.vertices) or any(
            not curve.has_vertex(w) for w in vmap.values()):
        raise NotBijective("vertex map is not a bijection of the vertex set")
    emap = {}
    for e in curve.edges:
        raw = edge_map.get(e.id, e.id)
        if isinstance(raw, tuple):
            f_id, flip = raw
        else:
            f_id, flip = raw, None
        if not curve.has_edge(f_id):
            raise NotBijective(f"edge {e.id} maps to unknown edge {f_id}")
        f = curve.edge(f_id)
        if flip is None:
            if e.is_loop:
                flip = False
            else:
                flip = vmap[e.a] == f.b and vmap[e.b] == f.a and f.a != f.b
        ends = (f.b, f.a) if flip else (f.a, f.b)
        if (vmap[e.a], vmap[e.b]) != ends:
            raise EndpointMismatch(f"edge {e.id}: endpoints do not go to those of {f_id}", e.id)
        if e.length != f.length:
            if e.is_infinite or f.is_infinite:
                raise InfinityNotPreserved(f"edge {e.id} and {f_id} differ in finiteness")
            raise LengthNotPreserved(f"edge {e.id} and its image {f_id} differ in length")
        if e.is_infinite:
            side = e.infinite_end if not flip else e.other_side(e.infinite_end)
            if side != f.infinite_end:
                raise InfinityNotPreserved(f"edge {e.id}: point at infinity is not preserved")
        emap[e.id] = (f_id, bool(flip))
    if len({f for f, _ in emap.values()}) != len(emap):
        raise NotBijective("edge map is not a bijection of the edge set")
    return Automorphism(curve, vmap, emap, label)


def edge_permutation(curve: Curve, cycles: Sequence[Sequence[str]], label: str = "") -> Automorphism:
    """Automorphism permuting edges along ``cycles``, endpoints following
    the edges in their stored orientation."""
    emap = {e.id: e.id for e in curve.edges}
    for cyc in cycles:
        for x, y in zip(cyc, list(cyc[1:]) + [cyc[0]]):
            emap[x] = y
    vmap: dict[str, str] = {}
    for e in curve.edges:
        f = curve.edge(emap[e.id])
        for v, w in ((e.a, f.a), (e.b, f.b)):
            if vmap.setdefault(v, w) != w:
                raise NotBijective(f"edge cycles do not induce a vertex map at {v}")
    return make_automorphism(curve, vmap, {e: (f, False) for e, f in emap.items()}, label)


@dataclass(eq=False)
class FiniteGroup:
    """Abstract finite group given by its multiplication table."""

    table: tuple
    labels: tuple = ()

    @property
    def order(self) -> int:
        return len(self.table)

    @cached_property
    def inverses(self) -> tuple:
        return tuple(row.index(0) for row in self.table)

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    def element_order(self, i: int) -> int:
        k, cur = 1, i
        while cur != 0:
            cur = self.table[cur][i]
            k += 1
        return k

    def closure(self, items: Iterable[int]) -> frozenset:
        got = {0} | set(items)
        frontier = list(got)
        while frontier:
            nxt = []
            for x in frontier:
                for y in list(got):
                    for z in (self.table[x][y], self.table[y][x]):
                        if z not in got:
                            got.add(z)
                            nxt.append(z)
            frontier = nxt
        return frozenset(got)

    def is_abelian(self) -> bool:
        n = self.order
        return all(self.table[i][j] == self.table[j][i] for i in range(n) for j in range(i))

    def order_profile(self) -> tuple:
        return tuple(sorted(self.element_order(i) for i in range(self.order)))


@dataclass(eq=False)
class ActionGroup:
    curve: Curve
    elements: tuple
    generators: tuple = ()
    name: str = "G"

    @cached_property
    def _index(self) -> dict:
        return {g.key: i for i, g in enumerate(self.elements)}

    @property
    def order(self) -> int:
        return len(self.elements)

    def index_of(self, g: Automorphism) -> int:
        return self._index[g.key]

    @cached_property
    def abstract(self) -> FiniteGroup:
        table = tuple(
            tuple(self._index[(g * h).key] for h in self.elements) for g in self.elements
        )
        return FiniteGroup(table, tuple(g.cycles() for g in self.elements))

    @property
    def identity(self) -> Automorphism:
        return self.elements[0]

    def whole(self) -> "Subgroup":
        return Subgroup(self, frozenset(range(self.order)), self.name)

    def trivial(self) -> "Subgroup":
        return Subgroup(self, frozenset({0}), "1")

    def subgroup(self, generators: Iterable[Automorphism], name: str = "") -> "Subgroup":
        idx = [self.index_of(g) for g in generators]
        return Subgroup(self, self.abstract.closure(idx), name)


def generate_group(curve: Curve, generators: Sequence[Automorphism], cap: int = DEFAULT_CAP,
                   name: str = "G") -> ActionGroup:
    """Close the generators under composition, breadth first, identity first."""
    for g in generators:
        if g.curve != curve:
            raise MixedCurves("generators act on different models")
    gens = []
    for g in generators:
        if g not in gens and not g.is_identity:
            gens.append(g)
    elements = [identity_automorphism(curve)]
    seen = {elements[0].key}
    i = 0
    while i < len(elements):
        x = elements[i]
        for g in gens:
            y = x * g
            if y.key not in seen:
                if len(elements) >= cap:
                    raise CapExceeded(f"group generated by {len(gens)} elements exceeds {cap}")
                seen.add(y.key)
                elements.append(y)
        i += 1
    return ActionGroup(curve, tuple(elements), tuple(gens), name)


@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: ActionGroup
    indices: frozenset
    name: str = ""

    def __eq__(self, other):
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.indices == other.indices

    def __hash__(self):
        return hash(self.indices)

    def __repr__(self):
        return f"Subgroup({self.label}, order={self.order})"

    @property
    def order(self) -> int:
        return len(self.indices)

    @property
    def sorted_indices(self) -> tuple:
        return tuple(sorted(self.indices))

    @property
    def elements(self) -> tuple:
        return tuple(self.parent.elements[i] for i in self.sorted_indices)

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.order == 1:
            return "1"
        if self.order == self.parent.order:
            return self.parent.name
        gens = minimal_generators(self)
        return "<" + ", ".join(self.parent.elements[i].name for i in gens) + ">"

    def contains(self, g) -> bool:
        i = g if isinstance(g, int) else self.parent.index_of(g)
        return i in self.indices

    def issubset(self, other: "Subgroup") -> bool:
        return self.indices <= other.indices

    def as_group(self) -> ActionGroup:
        return ActionGroup(self.parent.curve, self.elements,
                           tuple(self.parent.elements[i] for i in minimal_generators(self)),
                           self.label)


def minimal_generators(sub: Subgroup) -> tuple:
    """A short generating set, chosen greedily by element index."""
    grp = sub.parent.abstract
    gens: list[int] = []
    got = frozenset({0})
    for i in sorted(sub.indices, key=lambda k: (-grp.element_order(k), k)):
        if i not in got:
            gens.append(i)
            got = grp.closure(gens)
            if got == sub.indices:
                break
    return tuple(sorted(gens))


def subgroups(group: ActionGroup, bound: int = SUBGROUP_BOUND) -> list[Subgroup]:
    """Every subgroup, ordered by size and then by element indices."""
    if group.order > bound:
        raise GroupTooLarge(f"|G| = {group.order} exceeds the enumeration bound {bound}")
    grp = group.abstract
    cyclic = {grp.closure([i]) for i in range(group.order)}
    found = set(cyclic)
    frontier = set(cyclic)
    while frontier:
        nxt = set()
        for a in frontier:
            for c in cyclic:
                if c <= a:
                    continue
                j = grp.closure(a | c)
                if j not in found:
                    found.add(j)
                    nxt.add(j)
        frontier = nxt
    ordered = sorted(found, key=lambda s: (len(s), sorted(s)))
    return [Subgroup(group, s) for s in ordered]


def is_normal(sub: Subgroup) -> bool:
    grp = sub.parent.abstract
    inv = grp.inverses
    for g in range(grp.order):
        for h in sub.indices:
            if grp.mul(grp.mul(g, h), inv[g]) not in sub.indices:
                return False
    return True


def quotient_group(sub: Subgroup) -> FiniteGroup:
    """The group of cosets ``gH`` for a normal subgroup ``H``."""
    from .errors import NotNormal

    if not is_normal(sub):
        raise NotNormal(f"{sub.label} is not normal in {sub.parent.name}")
    grp = sub.parent.abstract
    coset_of: dict[int, int] = {}
    reps: list[int] = []
    for g in range(grp.order):
        if g in coset_of:
            continue
        k = len(reps)
        reps.append(g)
        for h in sub.indices:
            coset_of[grp.mul(g, h)] = k
    table = tuple(tuple(coset_of[grp.mul(a, b)] for b in reps) for a in reps)
    return FiniteGroup(table)


def group_isomorphic(g1: FiniteGroup, g2: FiniteGroup) -> bool:
    """Brute-force isomorphism test for small groups."""
    if g1.order != g2.order or g1.order_profile() != g2.order_profile():
        return False
    if g1.is_abelian() != g2.is_abelian():
        return False
    gens: list[int] = []
    got = frozenset({0})
    for i in range(g1.order):
        if i not in got:
            gens.append(i)
            got = g1.closure(gens)
    candidates = [
        [j for j in range(g2.order) if g2.element_order(j) == g1.element_order(i)] for i in gens
    ]
    for images in itertools.product(*candidates):
        phi = _extend_hom(g1, g2, gens, images)
        if phi is not None and len(set(phi.values())) == g1.order:
            return True
    return False


def _extend_hom(g1: FiniteGroup, g2: FiniteGroup, gens, images):
    phi = {0: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g, img in zip(gens, images):
                y = g1.mul(x, g)
                val = g2.mul(phi[x], img)
                if y in phi:
                    if phi[y] != val:
                        return None
                else:
                    phi[y] = val
                    nxt.append(y)
        frontier = nxt
    for a in range(g1.order):
        for b in range(g1.order):
            if phi[g1.mul(a, b)] != g2.mul(phi[a], phi[b]):
                return None
    return phi


# -- orbits and stabilizers ---------------------------------------------------


def _elements(group) -> tuple:
    return group.elements


def orbit(group, item) -> frozenset:
    return frozenset(g.apply(item) for g in _elements(group))


def stabilizer(group: ActionGroup, item) -> Subgroup:
    """Stabilizer of a vertex, edge or point.

    For an edge this is the pointwise stabilizer; an element reversing the
    edge means the model is not equivariant and raises
    :class:`RequiresEquivariantModel`.
    """
    idx = set()
    curve = group.curve
    for i, g in enumerate(group.elements):
        if isinstance(item, Point) or curve.has_vertex(item):
            if g.apply(item) == item:
                idx.add(i)
        else:
            f, flip = g.emap[item]
            if f == item:
                if flip:
                    raise RequiresEquivariantModel(f"{g.name} reverses edge {item}")
                idx.add(i)
    sub = Subgroup(group, frozenset(idx))
    if len(orbit(group, item)) * sub.order != group.order:
        raise TheoremViolation(f"orbit-stabilizer fails for {item}")
    return sub


def reversed_edges(group: ActionGroup) -> list[str]:
    out = []
    for e in group.curve.edges:
        if any(g.emap[e.id] == (e.id, True) for g in group.elements):
            out.append(e.id)
    return out


def transport_group(group: ActionGroup, r: RefinementMap, name: str | None = None) -> ActionGroup:
    """Restate the action on a G-invariant refinement, keeping element order."""
    if r.is_identity:
        return group
    moved = []
    for g in group.elements:
        m = transport(g.as_morphism(), r, r)
        moved.append(Automorphism(r.target, m.vertex_map, m.edge_map, g.name))
    gens = tuple(moved[group.index_of(g)] for g in group.generators)
    return ActionGroup(r.target, tuple(moved), gens, name or group.name)


def invariant_closure(group: ActionGroup, points: Iterable[Point]) -> set:
    out = set()
    for p in points:
        if p.is_vertex:
            continue
        for g in group.elements:
            out.add(g.apply_point(p))
    return out


def equivariant_refinement(curve: Curve, group: ActionGroup):
    """Subdivide every edge reversed by some element at its midpoint.

    Returns ``(curve', group', refinement)``.  On the result no element
    maps an edge to itself with reversed orientation.
    """
    if curve != group.curve:
        raise MixedCurves("group acts on a different model")
    rev = reversed_edges(group)
    fine, r = midpoint_refinement(curve, rev)
    return fine, transport_group(group, r), r


def refine_group_at(group: ActionGroup, points: Iterable[Point]):
    """Refine the model at the orbit of ``points`` and move the action."""
    fine, r = refine_at(group.curve, invariant_closure(group, points))
    return transport_group(group, r), r


def sorted_items(items) -> list:
    return sorted(items, key=lambda x: id_key(str(x)))
