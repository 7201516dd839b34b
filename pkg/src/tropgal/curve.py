"""Finite models of tropical curves.

A :class:`Curve` is a finite connected multigraph whose edges carry exact
lengths.  Infinite lengths live only on leaf edges, and the leaf end of such
an edge is the point at infinity, recorded by ``Edge.infinite_end``.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

from .errors import (
    Disconnected,
    EmptyGraph,
    InfinityOnNonLeafEdge,
    MissingInfiniteEnd,
    ModelError,
    NonpositiveLength,
    OffsetOutOfRange,
    UnknownItem,
)
from .lengths import INF, Length, as_length, format_length, total_length

_DIGITS = re.compile(r"(\d+)")


def id_key(ident: str):
    """Natural sort key, so that ``v2`` sorts before ``v10``."""
    parts = _DIGITS.split(ident)
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in parts if p != "")


@dataclass(frozen=True)
class Edge:
    id: str
    a: str
    b: str
    length: Length
    infinite_end: str | None = None  # "a" or "b" when length is INF

    @property
    def is_loop(self) -> bool:
        return self.a == self.b

    @property
    def is_infinite(self) -> bool:
        return self.length is INF

    @property
    def ref_side(self) -> str:
        """Endpoint from which interior offsets are measured.

        This is ``a`` except on infinite edges whose point at infinity is
        ``a``; offsets there are measured from the finite end ``b``.
        """
        return "b" if self.infinite_end == "a" else "a"

    def end(self, side: str) -> str:
        return self.a if side == "a" else self.b

    def other_side(self, side: str) -> str:
        return "b" if side == "a" else "a"


@dataclass(frozen=True)
class Point:
    """Either a vertex or an interior point ``offset`` along an edge."""

    vertex: str | None = None
    edge: str | None = None
    offset: Fraction | None = None

    @classmethod
    def at(cls, vertex: str) -> "Point":
        return cls(vertex=vertex)

    @classmethod
    def on(cls, edge: str, offset) -> "Point":
        return cls(edge=edge, offset=Fraction(offset))

    @property
    def is_vertex(self) -> bool:
        return self.vertex is not None

    def __str__(self):
        if self.is_vertex:
            return self.vertex
        return f"{self.edge}+{format_length(self.offset)}"


@dataclass(frozen=True, eq=False)
class Curve:
    """A model (graph plus length function) of a tropical curve.

    Vertices and edges are kept sorted by natural id order, so two curves
    with the same data compare equal regardless of construction order.  The
    ``name`` is a label only and does not take part in equality.
    """

    name: str
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices, key=id_key)))
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: id_key(e.id))))

    def __eq__(self, other):
        if not isinstance(other, Curve):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):
        return f"Curve({self.name!r}, |V|={len(self.vertices)}, |E|={len(self.edges)})"

    @cached_property
    def _edge_index(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def _vertex_set(self) -> frozenset[str]:
        return frozenset(self.vertices)

    @cached_property
    def _incidence(self) -> dict[str, list[tuple[Edge, str]]]:
        inc: dict[str, list[tuple[Edge, str]]] = {v: [] for v in self.vertices}
        for e in self.edges:
            inc[e.a].append((e, "a"))
            inc[e.b].append((e, "b"))
        return inc

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._edge_index[edge_id]
        except KeyError:
            raise UnknownItem(f"{self.name}: no edge {edge_id!r}") from None

    def has_edge(self, edge_id: str) -> bool:
        return edge_id in self._edge_index

    def has_vertex(self, vertex: str) -> bool:
        return vertex in self._vertex_set

    def incident(self, vertex: str) -> list[tuple[Edge, str]]:
        """(edge, side) pairs at ``vertex``; a loop appears twice."""
        return self._incidence[vertex]

    def degree(self, vertex: str) -> int:
        return len(self._incidence[vertex])

    @cached_property
    def loopless(self) -> bool:
        return not any(e.is_loop for e in self.edges)

    @cached_property
    def points_at_infinity(self) -> frozenset[str]:
        return frozenset(e.end(e.infinite_end) for e in self.edges if e.is_infinite)

    @property
    def total_length(self) -> Length:
        return total_length(e.length for e in self.edges)

    def point(self, edge_id: str, offset) -> Point:
        """Point at ``offset`` from the reference end of an edge.

        Offsets 0 and the full length are folded to the endpoint vertices.
        """
        e = self.edge(edge_id)
        offset = Fraction(offset)
        if offset == 0:
            return Point.at(e.end(e.ref_side))
        if not e.is_infinite and offset == e.length:
            return Point.at(e.end(e.other_side(e.ref_side)))
        if offset < 0 or (not e.is_infinite and offset > e.length):
            raise OffsetOutOfRange(f"offset {offset} outside edge {edge_id}")
        return Point.on(edge_id, offset)

    def check_point(self, p: Point) -> None:
        if p.is_vertex:
            if not self.has_vertex(p.vertex):
                raise UnknownItem(f"{self.name}: no vertex {p.vertex!r}")
            return
        e = self.edge(p.edge)
        if not (0 < p.offset and (e.is_infinite or p.offset < e.length)):
            raise OffsetOutOfRange(f"offset {p.offset} not interior to {p.edge}")

    def fresh_id(self, base: str, taken: set[str] | None = None) -> str:
        used = set(self.vertices) | set(self._edge_index) | (taken or set())
        ident = base
        while ident in used:
            ident += "'"
        return ident


def _connected(vertices: Iterable[str], edges: Iterable[Edge]) -> bool:
    vertices = list(vertices)
    adj = defaultdict(set)
    for e in edges:
        adj[e.a].add(e.b)
        adj[e.b].add(e.a)
    seen = {vertices[0]}
    stack = [vertices[0]]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(vertices)


def validate_model(raw) -> Curve:
    """Validate a raw description and return a :class:`Curve`.

    ``raw`` is either a :class:`Curve` or a mapping with keys ``name``,
    ``vertices`` (optional; endpoints are added) and ``edges``, a list of
    ``(id, a, b, length)`` or ``(id, a, b, length, infinite_end)`` tuples.
    The infinite end of an infinite edge may be omitted when exactly one
    endpoint is a leaf end.
    """
    if isinstance(raw, Curve):
        name = raw.name
        vertex_list = list(raw.vertices)
        edge_rows = [(e.id, e.a, e.b, e.length, e.infinite_end) for e in raw.edges]
    elif isinstance(raw, Mapping):
        name = raw.get("name", "curve")
        vertex_list = list(raw.get("vertices", ()))
        edge_rows = [tuple(r) + (None,) * (5 - len(r)) for r in raw.get("edges", ())]
    else:
        raise TypeError(f"cannot validate {type(raw).__name__}")

    seen_v: set[str] = set()
    for v in vertex_list:
        if v in seen_v:
            raise ModelError(f"duplicate vertex {v!r}")
        seen_v.add(v)
    explicit = bool(vertex_list)
    for row in edge_rows:
        for v in row[1:3]:
            if v not in seen_v:
                if explicit:
                    raise UnknownItem(f"edge {row[0]!r} uses undeclared vertex {v!r}")
                seen_v.add(v)
                vertex_list.append(v)
    if not vertex_list:
        raise EmptyGraph("a tropical curve needs at least one vertex")

    degree: dict[str, int] = defaultdict(int)
    for row in edge_rows:
        degree[row[1]] += 1
        degree[row[2]] += 1

    edges: list[Edge] = []
    seen_e: set[str] = set()
    for ident, a, b, length, inf_end in edge_rows:
        if ident in seen_e or ident in seen_v:
            raise ModelError(f"duplicate identifier {ident!r}")
        seen_e.add(ident)
        length = as_length(length)
        if length is INF:
            if a == b:
                raise InfinityOnNonLeafEdge(f"loop {ident!r} cannot have infinite length")
            leaves = [s for s, v in (("a", a), ("b", b)) if degree[v] == 1]
            if inf_end is None:
                if len(leaves) == 1:
                    inf_end = leaves[0]
                elif not leaves:
                    raise InfinityOnNonLeafEdge(f"edge {ident!r} is not a leaf edge")
                else:
                    raise MissingInfiniteEnd(
                        f"edge {ident!r}: both ends are leaves, infinite_end must be given"
                    )
            if inf_end not in ("a", "b"):
                raise ModelError(f"edge {ident!r}: infinite_end must be 'a' or 'b'")
            if inf_end not in leaves:
                raise InfinityOnNonLeafEdge(
                    f"edge {ident!r}: infinite end {inf_end} is not a leaf end"
                )
        else:
            if length <= 0:
                raise NonpositiveLength(f"edge {ident!r} has length {format_length(length)}")
            if inf_end is not None:
                raise ModelError(f"finite edge {ident!r} cannot have an infinite end")
        edges.append(Edge(ident, a, b, length, inf_end))

    if not _connected(vertex_list, edges):
        raise Disconnected(f"{name}: underlying graph is not connected")
    return Curve(name, tuple(vertex_list), tuple(edges))


def make_curve(name: str, edges, vertices=()) -> Curve:
    return validate_model({"name": name, "vertices": list(vertices), "edges": list(edges)})


def renamed(curve: Curve, name: str) -> Curve:
    return Curve(name, curve.vertices, curve.edges)
