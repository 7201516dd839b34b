"""Line-oriented text formats for curves, morphisms and actions.

A document is a sequence of blocks, each opened by a header line::

    curve theta
    v u
    v w
    e e1 u w 1
    e e4 w x inf infinite_end=b

    morphism pi theta I
    vm u a
    em e1 f 2 flip

    action S3 theta
    gen sigma
    em e1 e2
    em e2 e3
    em e3 e1

``#`` starts a comment.  Inside a ``gen`` block, vertices without a ``vm``
line follow the edge map (endpoint ``a`` to endpoint ``a`` unless the edge
is marked ``flip``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .curve import Curve, validate_model
from .errors import ModelError, NonpositiveLength, ParseError, TropgalError
from .group import ActionGroup, generate_group, make_automorphism
from .lengths import INF, format_length, parse_length
from .morphism import MorphismRep


@dataclass
class Document:
    curves: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)
    actions: dict = field(default_factory=dict)
    order: list = field(default_factory=list)  # (kind, name) in file order

    def merge(self, other: "Document") -> "Document":
        out = Document(dict(self.curves), dict(self.morphisms), dict(self.actions),
                       list(self.order))
        out.curves.update(other.curves)
        out.morphisms.update(other.morphisms)
        out.actions.update(other.actions)
        out.order.extend(other.order)
        return out

    def first(self, kind: str):
        for k, name in self.order:
            if k == kind:
                return getattr(self, kind + "s")[name]
        return None


@dataclass
class _Block:
    kind: str
    name: str
    line: int
    args: list
    body: list = field(default_factory=list)  # (line, column, tokens)


def _tokens(line: str):
    """Split a line into (column, token) pairs, dropping comments."""
    out = []
    i = 0
    text = line.split("#", 1)[0]
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        j = i
        while j < len(text) and not text[j].isspace():
            j += 1
        out.append((i + 1, text[i:j]))
        i = j
    return out


HEADERS = {"curve": 1, "morphism": 3, "action": 2}


def _split_blocks(text: str) -> list[_Block]:
    blocks: list[_Block] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = _tokens(raw)
        if not toks:
            continue
        col, head = toks[0]
        if head in HEADERS:
            if len(toks) - 1 != HEADERS[head]:
                raise ParseError(f"'{head}' header expects {HEADERS[head]} argument(s)",
                                 lineno, col)
            blocks.append(_Block(head, toks[1][1], lineno, [t for _, t in toks[1:]]))
            continue
        if not blocks:
            raise ParseError(f"'{head}' outside of a block", lineno, col)
        blocks[-1].body.append((lineno, toks))
    return blocks


def _length(tok: str, lineno: int, col: int):
    try:
        return parse_length(tok)
    except ValueError:
        raise ParseError(f"not an exact length: {tok!r}", lineno, col) from None


def _parse_curve(block: _Block) -> Curve:
    vertices, edges = [], []
    for lineno, toks in block.body:
        col, kw = toks[0]
        args = toks[1:]
        if kw == "v":
            if len(args) != 1:
                raise ParseError("'v' expects one vertex id", lineno, col)
            vertices.append(args[0][1])
        elif kw == "e":
            if len(args) not in (4, 5):
                raise ParseError("'e' expects: id a b length [infinite_end=a|b]", lineno, col)
            ident, a, b = (t for _, t in args[:3])
            length = _length(args[3][1], lineno, args[3][0])
            if length is not INF and length <= 0:
                raise NonpositiveLength(f"edge {ident!r} has length {args[3][1]} "
                                        f"(line {lineno}, column {args[3][0]})")
            inf_end = None
            if len(args) == 5:
                c5, opt = args[4]
                if not opt.startswith("infinite_end=") or opt[13:] not in ("a", "b"):
                    raise ParseError(f"bad edge option {opt!r}", lineno, c5)
                inf_end = opt[13:]
            edges.append((ident, a, b, length, inf_end))
        else:
            raise ParseError(f"unknown curve line {kw!r}", lineno, col)
    if vertices:
        declared = set(vertices)
        for row in edges:
            for v in row[1:3]:
                if v not in declared:
                    vertices.append(v)
                    declared.add(v)
    try:
        return validate_model({"name": block.name, "vertices": vertices, "edges": edges})
    except ModelError as exc:
        raise type(exc)(f"curve {block.name} (line {block.line}): {exc}") from None


def _maps(block: _Block, allow_gen: bool):
    """Collect vm/em lines, split into generator groups when allowed."""
    groups: list = []
    current = None
    for lineno, toks in block.body:
        col, kw = toks[0]
        args = [t for _, t in toks[1:]]
        if kw == "gen" and allow_gen:
            current = {"label": args[0] if args else "", "vm": {}, "em": {}, "line": lineno}
            groups.append(current)
            continue
        if current is None:
            if allow_gen:
                raise ParseError("map line before any 'gen'", lineno, col)
            current = {"label": block.name, "vm": {}, "em": {}, "line": lineno}
            groups.append(current)
        if kw == "vm":
            if len(args) != 2:
                raise ParseError("'vm' expects: vertex image", lineno, col)
            current["vm"][args[0]] = args[1]
        elif kw == "em":
            if len(args) < 2 or len(args) > 4:
                raise ParseError("'em' expects: edge image [degree] [flip]", lineno, col)
            flip = False
            deg = 1
            rest = args[2:]
            if rest and rest[-1] == "flip":
                flip = True
                rest = rest[:-1]
            if rest:
                if not rest[0].isdigit() or int(rest[0]) <= 0:
                    raise ParseError(f"degree must be a positive integer, got {rest[0]!r}",
                                     lineno, toks[3][0])
                deg = int(rest[0])
            current["em"][args[0]] = (args[1], flip, deg, lineno)
        else:
            raise ParseError(f"unknown line {kw!r}", lineno, col)
    return groups


def _curve_ref(name: str, curves: dict, line: int) -> Curve:
    if name not in curves:
        raise ParseError(f"unknown curve {name!r}", line)
    return curves[name]


def _parse_morphism(block: _Block, curves: dict) -> MorphismRep:
    name, src_name, tgt_name = block.args
    src = _curve_ref(src_name, curves, block.line)
    tgt = _curve_ref(tgt_name, curves, block.line)
    groups = _maps(block, allow_gen=False)
    data = groups[0] if groups else {"vm": {}, "em": {}}
    emap = {e: (f, flip) for e, (f, flip, _, _) in data["em"].items()}
    degs = {e: d for e, (_, _, d, _) in data["em"].items()}
    return MorphismRep(src, tgt, dict(data["vm"]), emap, degs, name,
                       1 if not src.edges else None)


def _parse_action(block: _Block, curves: dict) -> ActionGroup:
    name, curve_name = block.args
    curve = _curve_ref(curve_name, curves, block.line)
    gens = []
    for g in _maps(block, allow_gen=True):
        vmap = dict(g["vm"])
        emap = {}
        for e, (f, flip, deg, lineno) in g["em"].items():
            if deg != 1:
                raise ParseError("generators must have degree 1 on every edge", lineno)
            if not curve.has_edge(e) or not curve.has_edge(f):
                raise ParseError(f"unknown edge in 'em {e} {f}'", lineno)
            emap[e] = (f, flip)
            src, dst = curve.edge(e), curve.edge(f)
            ends = (dst.b, dst.a) if flip else (dst.a, dst.b)
            for v, w in zip((src.a, src.b), ends):
                if v not in g["vm"]:
                    if vmap.setdefault(v, w) != w:
                        raise ParseError(f"edge map does not determine vertex {v}", lineno)
        try:
            gens.append(make_automorphism(curve, vmap, emap, g["label"]))
        except TropgalError as exc:
            raise type(exc)(f"generator {g['label']!r} (line {g['line']}): {exc}") from None
    return generate_group(curve, gens, name=name)


def parse_document(text: str, curves: dict | None = None) -> Document:
    doc = Document()
    known = dict(curves or {})
    for block in _split_blocks(text):
        if block.kind == "curve":
            c = _parse_curve(block)
            doc.curves[block.name] = c
            known[block.name] = c
        elif block.kind == "morphism":
            doc.morphisms[block.name] = _parse_morphism(block, known)
        else:
            doc.actions[block.name] = _parse_action(block, known)
        doc.order.append((block.kind, block.name))
    return doc


def load(path, curves: dict | None = None) -> Document:
    return parse_document(Path(path).read_text(), curves)


def parse_curve(text: str) -> Curve:
    doc = parse_document(text)
    c = doc.first("curve")
    if c is None:
        raise ParseError("no curve block", 1)
    return c


# -- writers -------------------------------------------------------------------


def format_curve(curve: Curve, name: str | None = None) -> str:
    lines = [f"curve {name or curve.name}"]
    lines += [f"v {v}" for v in curve.vertices]
    for e in curve.edges:
        row = f"e {e.id} {e.a} {e.b} {format_length(e.length)}"
        if e.is_infinite:
            row += f" infinite_end={e.infinite_end}"
        lines.append(row)
    return "\n".join(lines) + "\n"


def format_morphism(m: MorphismRep, name: str | None = None) -> str:
    lines = [f"morphism {name or m.name} {m.source.name} {m.target.name}"]
    lines += [f"vm {v} {m.vertex_map[v]}" for v in m.source.vertices]
    for e in m.source.edges:
        f, flip = m.edge_map[e.id]
        lines.append(f"em {e.id} {f} {m.edge_degrees[e.id]}" + (" flip" if flip else ""))
    return "\n".join(lines) + "\n"


def format_action(group: ActionGroup, name: str | None = None) -> str:
    lines = [f"action {name or group.name} {group.curve.name}"]
    for k, g in enumerate(group.generators):
        lines.append(f"gen {g.label or 'g' + str(k + 1)}")
        lines += [f"vm {v} {g.vmap[v]}" for v in group.curve.vertices if g.vmap[v] != v]
        for e in group.curve.edges:
            f, flip = g.emap[e.id]
            if f != e.id or flip:
                lines.append(f"em {e.id} {f}" + (" 1 flip" if flip else ""))
    return "\n".join(lines) + "\n"
