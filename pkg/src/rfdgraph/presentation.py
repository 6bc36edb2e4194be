"""Finite presentations of countable directed graphs.

A presentation is a finite multigraph core together with four kinds of
infinite attachments:

* ``instar T: v``   fresh sources ``T[1], T[2], ...`` each with one edge into ``v``
* ``outstar T: v``  fresh sinks ``T[1], T[2], ...`` each receiving one edge from ``v``
* ``backray T: v``  vertices ``T[-1], T[-2], ...`` with edges ``T[i] -> T[i+1]``
  and ``T[-1] -> v``
* ``fwdray T: v``   vertices ``T[1], T[2], ...`` with edges ``v -> T[1]`` and
  ``T[i] -> T[i+1]``

Core arcs carry a multiplicity, either a positive integer or ``omega``
(countably many parallel copies).

Vertices are referred to by strings: a core vertex by its id, a derived
vertex as ``"<tag>[<index>]"``.  Edges are :class:`Edge` values named
``"<label>#<index>"``: copy ``k`` of core arc ``a`` is ``a#k`` (printed as
plain ``a`` when ``k == 0``), and the primitive edge of family ``T`` with
index ``i`` is ``T#i``:

* instar/outstar: ``T#i`` joins the anchor and ``T[i]`` (``i >= 1``)
* backray: ``T#i`` goes from ``T[i]`` to ``T[i+1]`` (``T[0]`` is the anchor, ``i <= -1``)
* fwdray: ``T#i`` goes from ``T[i-1]`` to ``T[i]`` (``T[0]`` is the anchor, ``i >= 1``)
"""

from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Optional, Union

__all__ = [
    "OMEGA",
    "PRIMITIVE_KINDS",
    "Arc",
    "Primitive",
    "Edge",
    "GraphPresentation",
    "PresentationError",
    "parse",
    "serialize",
    "out_degree",
    "in_degree",
    "components",
    "core_reachable",
    "core_coreachable",
    "format_card",
]

#: Cardinality of a countably infinite set.  ``OMEGA + n == OMEGA`` and it
#: compares above every integer.
OMEGA = math.inf

Card = Union[int, float]

PRIMITIVE_KINDS = ("instar", "outstar", "backray", "fwdray")

_TOKEN = re.compile(r"[A-Za-z0-9_]+")
_DERIVED = re.compile(r"^([A-Za-z0-9_]+)\[(-?\d+)\]$")
_EDGE_NAME = re.compile(r"^([A-Za-z0-9_]+)(?:#(-?\d+))?$")


def format_card(n: Card) -> str:
    return "omega" if n == OMEGA else str(int(n))


class PresentationError(ValueError):
    """Invalid presentation text or an invalid reference into a presentation."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Arc:
    id: str
    source: str
    target: str
    mult: Card = 1

    @property
    def is_omega(self) -> bool:
        return self.mult == OMEGA


@dataclass(frozen=True)
class Primitive:
    kind: str
    tag: str
    anchor: str


@dataclass(frozen=True)
class Edge:
    """One concrete edge of the presented countable graph."""

    label: str
    index: int
    source: str
    target: str

    @property
    def key(self):
        return (self.label, self.index)

    def __lt__(self, other: "Edge") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return self.label if self.index == 0 else f"{self.label}#{self.index}"


@dataclass(frozen=True)
class GraphPresentation:
    vertices: tuple = ()
    arcs: tuple = ()
    primitives: tuple = ()
    # declaration order for serialization: ("vertex"|"edge"|kind, id)
    order: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if not self.order:
            order = [("vertex", v) for v in self.vertices]
            order += [("edge", a.id) for a in self.arcs]
            order += [(p.kind, p.tag) for p in self.primitives]
            object.__setattr__(self, "order", tuple(order))
        _validate(self)

    # -- indices ---------------------------------------------------------

    @cached_property
    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    @cached_property
    def arc_by_id(self) -> dict:
        return {a.id: a for a in self.arcs}

    @cached_property
    def primitive_by_tag(self) -> dict:
        return {p.tag: p for p in self.primitives}

    @cached_property
    def out_arcs(self) -> dict:
        table = {v: [] for v in self.vertices}
        for a in sorted(self.arcs, key=lambda a: a.id):
            table[a.source].append(a)
        return table

    @cached_property
    def in_arcs(self) -> dict:
        table = {v: [] for v in self.vertices}
        for a in sorted(self.arcs, key=lambda a: a.id):
            table[a.target].append(a)
        return table

    @cached_property
    def anchored(self) -> dict:
        """Primitives per anchor vertex, sorted by tag."""
        table = {v: [] for v in self.vertices}
        for p in sorted(self.primitives, key=lambda p: p.tag):
            table[p.anchor].append(p)
        return table

    def primitives_of(self, kind: str) -> list:
        return sorted((p for p in self.primitives if p.kind == kind), key=lambda p: p.tag)

    # -- vertex references -----------------------------------------------

    def resolve(self, ref: str):
        """Classify a vertex reference.

        Returns ``(None, None)`` for a core vertex and ``(primitive, index)``
        for a derived one; raises :class:`PresentationError` otherwise.
        """
        if ref in self.vertex_set:
            return None, None
        m = _DERIVED.match(ref)
        if m:
            p = self.primitive_by_tag.get(m.group(1))
            i = int(m.group(2))
            if p is not None:
                ok = i <= -1 if p.kind == "backray" else i >= 1
                if ok:
                    return p, i
        raise PresentationError(f"unknown vertex {ref!r}")

    def has_vertex(self, ref: str) -> bool:
        try:
            self.resolve(ref)
        except PresentationError:
            return False
        return True

    @staticmethod
    def derived(tag: str, index: int) -> str:
        return f"{tag}[{index}]"

    # -- edges -----------------------------------------------------------

    def edge(self, label: str, index: int = 0) -> Edge:
        """The concrete edge ``label#index``."""
        a = self.arc_by_id.get(label)
        if a is not None:
            if not 0 <= index < a.mult:
                raise PresentationError(f"arc {label!r} has no copy {index}")
            return Edge(label, index, a.source, a.target)
        p = self.primitive_by_tag.get(label)
        if p is None:
            raise PresentationError(f"unknown edge label {label!r}")
        d = self.derived
        if p.kind == "instar" and index >= 1:
            return Edge(label, index, d(label, index), p.anchor)
        if p.kind == "outstar" and index >= 1:
            return Edge(label, index, p.anchor, d(label, index))
        if p.kind == "backray" and index <= -1:
            tgt = p.anchor if index == -1 else d(label, index + 1)
            return Edge(label, index, d(label, index), tgt)
        if p.kind == "fwdray" and index >= 1:
            src = p.anchor if index == 1 else d(label, index - 1)
            return Edge(label, index, src, d(label, index))
        raise PresentationError(f"primitive {label!r} has no edge {index}")

    def edge_by_name(self, name: str) -> Edge:
        m = _EDGE_NAME.match(name.strip())
        if not m:
            raise PresentationError(f"malformed edge name {name!r}")
        return self.edge(m.group(1), int(m.group(2) or 0))

    def is_edge(self, e: Edge) -> bool:
        try:
            return self.edge(e.label, e.index) == e
        except PresentationError:
            return False

    def out_edges(self, v: str, bound: Optional[int] = None) -> Iterator[Edge]:
        """Edges with source ``v`` in canonical order.

        Infinite families (omega arcs, out-stars) are cut after ``bound``
        members; ``bound=None`` is only allowed when ``v`` emits finitely
        many edges.
        """
        p, i = self.resolve(v)
        if p is not None:
            if p.kind in ("instar", "backray"):
                yield self.edge(p.tag, i)
            elif p.kind == "fwdray":
                yield self.edge(p.tag, i + 1)
            return
        if bound is None and out_degree(self, v) == OMEGA:
            raise ValueError(f"{v} is an infinite emitter; pass a bound")
        families = []
        for a in self.out_arcs[v]:
            n = a.mult if bound is None else min(a.mult, bound)
            families.append((a.id, [self.edge(a.id, k) for k in range(int(n))]))
        for prim in self.anchored[v]:
            if prim.kind == "outstar":
                families.append((prim.tag, [self.edge(prim.tag, k) for k in range(1, bound + 1)]))
            elif prim.kind == "fwdray":
                families.append((prim.tag, [self.edge(prim.tag, 1)]))
        for _, edges in sorted(families, key=lambda t: t[0]):
            yield from edges

    def in_edges(self, v: str, bound: Optional[int] = None) -> Iterator[Edge]:
        """Edges with range ``v`` in canonical order, infinite families cut at ``bound``."""
        p, i = self.resolve(v)
        if p is not None:
            if p.kind == "outstar":
                yield self.edge(p.tag, i)
            elif p.kind == "backray":
                yield self.edge(p.tag, i - 1)
            elif p.kind == "fwdray":
                yield self.edge(p.tag, i)
            return
        if bound is None and in_degree(self, v) == OMEGA:
            raise ValueError(f"{v} is an infinite receiver; pass a bound")
        families = []
        for a in self.in_arcs[v]:
            n = a.mult if bound is None else min(a.mult, bound)
            families.append((a.id, [self.edge(a.id, k) for k in range(int(n))]))
        for prim in self.anchored[v]:
            if prim.kind == "instar":
                families.append((prim.tag, [self.edge(prim.tag, k) for k in range(1, bound + 1)]))
            elif prim.kind == "backray":
                families.append((prim.tag, [self.edge(prim.tag, -1)]))
        for _, edges in sorted(families, key=lambda t: t[0]):
            yield from edges

    def __str__(self) -> str:
        return serialize(self)


def _validate(g: GraphPresentation) -> None:
    seen = set()
    for v in g.vertices:
        if not _TOKEN.fullmatch(v):
            raise PresentationError(f"bad vertex id {v!r}")
        if v in seen:
            raise PresentationError(f"duplicate vertex {v!r}")
        seen.add(v)
    labels = set()
    for a in g.arcs:
        if a.id in labels:
            raise PresentationError(f"duplicate id {a.id!r}")
        labels.add(a.id)
        for end in (a.source, a.target):
            if end not in seen:
                raise PresentationError(f"undeclared vertex {end!r}")
        if not (a.mult == OMEGA or (isinstance(a.mult, int) and a.mult >= 1)):
            raise PresentationError(f"arc {a.id!r}: multiplicity must be >= 1 or omega")
    for p in g.primitives:
        if p.kind not in PRIMITIVE_KINDS:
            raise PresentationError(f"unknown primitive kind {p.kind!r}")
        if p.tag in labels:
            raise PresentationError(f"duplicate id {p.tag!r}")
        labels.add(p.tag)
        if p.anchor not in seen:
            raise PresentationError(f"undeclared vertex {p.anchor!r}")


# -- degrees -------------------------------------------------------------


def out_degree(g: GraphPresentation, v: str) -> Card:
    """Number of edges emitted by ``v`` (``OMEGA`` for infinite emitters)."""
    p, _ = g.resolve(v)
    if p is not None:
        return 0 if p.kind == "outstar" else 1
    n = sum(a.mult for a in g.out_arcs[v])
    for prim in g.anchored[v]:
        if prim.kind == "outstar":
            n += OMEGA
        elif prim.kind == "fwdray":
            n += 1
    return n


def in_degree(g: GraphPresentation, v: str) -> Card:
    """Number of edges received by ``v`` (``OMEGA`` for infinite receivers)."""
    p, _ = g.resolve(v)
    if p is not None:
        return 0 if p.kind == "instar" else 1
    n = sum(a.mult for a in g.in_arcs[v])
    for prim in g.anchored[v]:
        if prim.kind == "instar":
            n += OMEGA
        elif prim.kind == "backray":
            n += 1
    return n


# -- reachability --------------------------------------------------------


def _closure(g: GraphPresentation, start: str, forward: bool) -> set:
    if start not in g.vertex_set:
        raise PresentationError(f"unknown core vertex {start!r}")
    adj = g.out_arcs if forward else g.in_arcs
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for a in adj[u]:
            w = a.target if forward else a.source
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def core_reachable(g: GraphPresentation, start: str) -> set:
    """Core vertices reachable from ``start`` by core arcs (``start`` included)."""
    return _closure(g, start, True)


def core_coreachable(g: GraphPresentation, target: str) -> set:
    """Core vertices with a core path into ``target`` (``target`` included)."""
    return _closure(g, target, False)


def components(g: GraphPresentation) -> list:
    """Weakly connected components; primitives follow their anchors."""
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a in g.arcs:
        ra, rb = find(a.source), find(a.target)
        if ra != rb:
            parent[max(ra, rb, key=g.vertices.index)] = min(ra, rb, key=g.vertices.index)

    groups: dict = {}
    for v in g.vertices:
        groups.setdefault(find(v), set()).add(v)
    out = []
    for root in sorted(groups, key=g.vertices.index):
        members = groups[root]
        keep = set()
        for kind, ident in g.order:
            if kind == "vertex":
                ok = ident in members
            elif kind == "edge":
                ok = g.arc_by_id[ident].source in members
            else:
                ok = g.primitive_by_tag[ident].anchor in members
            if ok:
                keep.add((kind, ident))
        out.append(_restrict(g, keep))
    return out


def _restrict(g: GraphPresentation, keep: set) -> GraphPresentation:
    order = tuple(d for d in g.order if d in keep)
    return GraphPresentation(
        vertices=tuple(v for v in g.vertices if ("vertex", v) in keep),
        arcs=tuple(a for a in g.arcs if ("edge", a.id) in keep),
        primitives=tuple(p for p in g.primitives if (p.kind, p.tag) in keep),
        order=order,
    )


# -- text format ---------------------------------------------------------

_LEX = re.compile(r"\s*(?:(?P<arrow>->)|(?P<word>[A-Za-z0-9_]+)|(?P<punct>[:\[\]=]))")


def _tokens(line: str, lineno: int) -> list:
    toks = []
    pos = 0
    while pos < len(line):
        if line[pos:].strip() == "":
            break
        m = _LEX.match(line, pos)
        if not m:
            col = pos + len(line[pos:]) - len(line[pos:].lstrip()) + 1
            raise PresentationError(f"unexpected character {line[col - 1]!r}", lineno, col)
        text = m.group("arrow") or m.group("word") or m.group("punct")
        toks.append((text, m.start(m.lastgroup) + 1))
        pos = m.end()
    return toks


class _Line:
    def __init__(self, toks, lineno, width):
        self.toks = toks
        self.i = 0
        self.lineno = lineno
        self.width = width

    def fail(self, msg):
        col = self.toks[self.i][1] if self.i < len(self.toks) else self.width + 1
        raise PresentationError(msg, self.lineno, col)

    def word(self, what):
        if self.i >= len(self.toks) or not _TOKEN.fullmatch(self.toks[self.i][0]):
            self.fail(f"expected {what}")
        self.i += 1
        return self.toks[self.i - 1]

    def punct(self, p):
        if self.i >= len(self.toks) or self.toks[self.i][0] != p:
            self.fail(f"expected {p!r}")
        self.i += 1

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def end(self):
        if self.i < len(self.toks):
            self.fail("unexpected trailing input")


def parse(text: str) -> GraphPresentation:
    """Parse presentation source text.

    Raises
    ------
    PresentationError
        On syntax errors (with line and column), references to undeclared
        vertices, duplicate ids and zero multiplicities.
    """
    vertices, arcs, prims, order = [], [], [], []
    refs = []  # (vertex, line, col) checked once all declarations are read
    ids = {}
    vids = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = _tokens(line, lineno)
        if not toks:
            continue
        ln = _Line(toks, lineno, len(line.rstrip()))
        kw, kwcol = ln.word("keyword")
        if kw == "vertex":
            v, col = ln.word("vertex id")
            ln.end()
            if v in vids:
                raise PresentationError(f"duplicate vertex {v!r}", lineno, col)
            vids.add(v)
            vertices.append(v)
            order.append(("vertex", v))
        elif kw == "edge":
            ident, icol = ln.word("edge id")
            ln.punct(":")
            src, scol = ln.word("source vertex")
            ln.punct("->")
            dst, dcol = ln.word("target vertex")
            mult = 1
            if ln.peek() == "[":
                ln.punct("[")
                key, kcol = ln.word("'mult'")
                if key != "mult":
                    raise PresentationError(f"unknown attribute {key!r}", lineno, kcol)
                ln.punct("=")
                val, vcol = ln.word("multiplicity")
                if val == "omega":
                    mult = OMEGA
                elif val.isdigit():
                    mult = int(val)
                    if mult == 0:
                        raise PresentationError("multiplicity 0", lineno, vcol)
                else:
                    raise PresentationError(f"bad multiplicity {val!r}", lineno, vcol)
                ln.punct("]")
            ln.end()
            if ident in ids:
                raise PresentationError(f"duplicate id {ident!r}", lineno, icol)
            ids[ident] = lineno
            refs += [(src, lineno, scol), (dst, lineno, dcol)]
            arcs.append(Arc(ident, src, dst, mult))
            order.append(("edge", ident))
        elif kw in PRIMITIVE_KINDS:
            tag, tcol = ln.word("tag")
            ln.punct(":")
            anchor, acol = ln.word("anchor vertex")
            ln.end()
            if tag in ids:
                raise PresentationError(f"duplicate id {tag!r}", lineno, tcol)
            ids[tag] = lineno
            refs.append((anchor, lineno, acol))
            prims.append(Primitive(kw, tag, anchor))
            order.append((kw, tag))
        else:
            raise PresentationError(f"unknown declaration {kw!r}", lineno, kwcol)
    for v, lineno, col in refs:
        if v not in vids:
            raise PresentationError(f"undeclared vertex {v!r}", lineno, col)
    return GraphPresentation(tuple(vertices), tuple(arcs), tuple(prims), tuple(order))


def serialize(g: GraphPresentation) -> str:
    """Presentation text with declarations in their original order."""
    lines = []
    for kind, ident in g.order:
        if kind == "vertex":
            lines.append(f"vertex {ident}")
        elif kind == "edge":
            a = g.arc_by_id[ident]
            suffix = "" if a.mult == 1 else f" [mult={format_card(a.mult)}]"
            lines.append(f"edge {a.id}: {a.source} -> {a.target}{suffix}")
        else:
            p = g.primitive_by_tag[ident]
            lines.append(f"{p.kind} {p.tag}: {p.anchor}")
    return "\n".join(lines) + ("\n" if lines else "")
