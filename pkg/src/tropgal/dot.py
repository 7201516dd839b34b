"""Graphviz DOT output for curves, maps and subgroup lattices."""

from __future__ import annotations

from .curve import Curve
from .lengths import format_length
from .morphism import MorphismRep

PALETTE = ("red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan4",
           "gold3", "gray40")


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def curve_dot(curve: Curve, morphism: MorphismRep | None = None, name: str | None = None) -> str:
    """Multigraph DOT with edges labelled ``id:length``.

    With a morphism starting at ``curve``, edges over the same target edge
    share a colour.
    """
    colors = {}
    if morphism is not None:
        for k, t in enumerate(morphism.target.edges):
            colors[t.id] = PALETTE[k % len(PALETTE)]
    lines = [f"graph {_q(name or curve.name)} {{"]
    for v in curve.vertices:
        shape = "point" if v in curve.points_at_infinity else "circle"
        lines.append(f"  {_q(v)} [shape={shape}, label={_q(v)}];")
    for e in curve.edges:
        attrs = [f"label={_q(e.id + ':' + format_length(e.length))}"]
        if morphism is not None:
            attrs.append(f"color={colors[morphism.edge_map[e.id][0]]}")
        lines.append(f"  {_q(e.a)} -- {_q(e.b)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def lattice_dot(report) -> str:
    """Hasse diagrams of the subgroup lattice and of the intermediate
    coverings, side by side; the second is drawn upside down."""
    entries = report.entries
    sets = [frozenset(e.subgroup) for e in entries]
    covers = []
    for i, a in enumerate(sets):
        for j, b in enumerate(sets):
            if a < b and not any(a < c < b for c in sets):
                covers.append((i, j))
    lines = ["digraph correspondence {", "  rankdir=BT;"]
    lines.append('  subgraph cluster_groups { label="subgroups";')
    for e in entries:
        lines.append(f"    g{e.index} [label={_q(e.label + ' |' + str(e.order) + '|')}];")
    for i, j in covers:
        lines.append(f"    g{i} -> g{j};")
    lines.append("  }")
    lines.append('  subgraph cluster_covers { label="intermediate coverings";')
    for e in entries:
        q = e.quotient.quotient_curve
        text = f"{q.name} deg {e.order} len {format_length(q.total_length)}"
        lines.append(f"    c{e.index} [label={_q(text)}];")
    for i, j in covers:
        lines.append(f"    c{j} -> c{i};")
    lines.append("  }")
    for e in entries:
        lines.append(f"  g{e.index} -> c{e.index} [style=dashed, arrowhead=none, constraint=false];")
    lines.append("}")
    return "\n".join(lines) + "\n"
