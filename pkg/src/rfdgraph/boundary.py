"""Symbolic boundary path space of a presented graph.

Boundary points are never materialised as infinite sequences.  Three shapes
are representable:

* :class:`FinitePath` -- a finite path ending at a singular vertex (sink or
  infinite emitter); the empty path at a singular vertex is allowed;
* :class:`Lasso` -- ``stem`` followed by a closed walk repeated forever;
* :class:`RayTail` -- ``stem`` followed by the edges of a forward ray.

Lassos are kept in canonical form (primitive period word, least rotation,
shortest stem), so structural equality is equality of edge sequences.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional, Union

from .conditions import cycle_vertices, cycles_through, enumerate_cycles
from .presentation import OMEGA, Edge, GraphPresentation, PresentationError, out_degree

__all__ = [
    "FinitePath",
    "Lasso",
    "RayTail",
    "BoundaryPoint",
    "CylinderSet",
    "PointError",
    "NonEmptyResult",
    "HomeoReport",
    "source",
    "length",
    "edge_at",
    "unroll",
    "shift",
    "prepend",
    "validate_point",
    "is_singular",
    "singular_vertices",
    "cylinder_nonempty",
    "candidate_members",
    "membership",
    "enumerate_points",
    "local_homeo_check",
    "format_point",
    "parse_point",
    "format_path",
    "parse_path",
    "parse_cylinder",
]


class PointError(ValueError):
    """Malformed boundary point, cylinder, or shift beyond a finite length."""


def _primitive_root(word: tuple) -> tuple:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word[:d] * (n // d) == word:
            return word[:d]
    return word


def _least_rotation(word: tuple) -> int:
    keys = [e.key for e in word]
    n = len(keys)
    return min(range(n), key=lambda r: keys[r:] + keys[:r])


@dataclass(frozen=True)
class FinitePath:
    edges: tuple
    terminal: str

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))


@dataclass(frozen=True)
class Lasso:
    """``stem`` followed by ``cycle`` read from position ``phase``, forever."""

    stem: tuple
    cycle: tuple
    phase: int = 0

    def __post_init__(self):
        stem, word, phase = tuple(self.stem), tuple(self.cycle), self.phase
        if not word:
            raise PointError("lasso needs a non-empty period")
        phase %= len(word)
        root = _primitive_root(word)
        phase %= len(root)
        r = _least_rotation(root)
        word = root[r:] + root[:r]
        phase = (phase - r) % len(word)
        while stem and stem[-1] == word[(phase - 1) % len(word)]:
            stem = stem[:-1]
            phase = (phase - 1) % len(word)
        object.__setattr__(self, "stem", stem)
        object.__setattr__(self, "cycle", word)
        object.__setattr__(self, "phase", phase)

    @property
    def period(self) -> tuple:
        """The repeating block as read from the end of the stem."""
        return self.cycle[self.phase:] + self.cycle[: self.phase]


@dataclass(frozen=True)
class RayTail:
    """``stem`` followed by forward-ray edges ``tag#start, tag#(start+1), ...``."""

    stem: tuple
    tag: str
    anchor: str
    start: int = 1

    def __post_init__(self):
        stem, start = tuple(self.stem), self.start
        while stem and stem[-1].label == self.tag and stem[-1].index == start - 1:
            stem = stem[:-1]
            start -= 1
        object.__setattr__(self, "stem", stem)
        object.__setattr__(self, "start", start)

    def ray_edge(self, i: int) -> Edge:
        src = self.anchor if i == 1 else f"{self.tag}[{i - 1}]"
        return Edge(self.tag, i, src, f"{self.tag}[{i}]")


BoundaryPoint = Union[FinitePath, Lasso, RayTail]


# -- sequence access -----------------------------------------------------


def length(x: BoundaryPoint):
    return len(x.edges) if isinstance(x, FinitePath) else OMEGA


def edge_at(x: BoundaryPoint, i: int) -> Optional[Edge]:
    """The ``i``-th edge (0-based), or None past the end of a finite path."""
    if isinstance(x, FinitePath):
        return x.edges[i] if i < len(x.edges) else None
    if i < len(x.stem):
        return x.stem[i]
    i -= len(x.stem)
    if isinstance(x, Lasso):
        return x.cycle[(x.phase + i) % len(x.cycle)]
    return x.ray_edge(x.start + i)


def unroll(x: BoundaryPoint, n: int) -> list:
    out = []
    for i in range(n):
        e = edge_at(x, i)
        if e is None:
            break
        out.append(e)
    return out


def source(x: BoundaryPoint) -> str:
    e = edge_at(x, 0)
    return x.terminal if e is None else e.source


def shift(x: BoundaryPoint, n: int) -> BoundaryPoint:
    """Drop the first ``n`` edges.

    Raises
    ------
    PointError
        If ``x`` is a finite path shorter than ``n``.
    """
    if n < 0:
        raise PointError("negative shift")
    if isinstance(x, FinitePath):
        if n > len(x.edges):
            raise PointError(f"cannot shift a path of length {len(x.edges)} by {n}")
        return FinitePath(x.edges[n:], x.terminal)
    if n <= len(x.stem):
        return _with_stem(x, x.stem[n:])
    rest = n - len(x.stem)
    if isinstance(x, Lasso):
        return Lasso((), x.cycle, x.phase + rest)
    return RayTail((), x.tag, x.anchor, x.start + rest)


def _with_stem(x, stem):
    if isinstance(x, Lasso):
        return Lasso(stem, x.cycle, x.phase)
    return RayTail(stem, x.tag, x.anchor, x.start)


def prepend(path, x: BoundaryPoint) -> BoundaryPoint:
    """The point ``path`` followed by ``x`` (no composability check)."""
    path = tuple(path)
    if isinstance(x, FinitePath):
        return FinitePath(path + x.edges, x.terminal)
    return _with_stem(x, path + x.stem)


# -- validity ------------------------------------------------------------


def is_singular(g: GraphPresentation, v: str) -> bool:
    return out_degree(g, v) in (0, OMEGA)


def _check_path(g: GraphPresentation, edges) -> None:
    for e in edges:
        if not g.is_edge(e):
            raise PointError(f"{e} is not an edge of the presentation")
    for e, f in zip(edges, edges[1:]):
        if e.target != f.source:
            raise PointError(f"{e} and {f} do not compose")


def validate_point(g: GraphPresentation, x: BoundaryPoint) -> None:
    """Raise :class:`PointError` unless ``x`` is a boundary point of ``g``."""
    if isinstance(x, FinitePath):
        _check_path(g, x.edges)
        if x.edges and x.edges[-1].target != x.terminal:
            raise PointError("terminal does not match the last edge")
        if not g.has_vertex(x.terminal) or not is_singular(g, x.terminal):
            raise PointError(f"{x.terminal} is not a singular vertex")
    elif isinstance(x, Lasso):
        _check_path(g, x.stem + x.period + x.period[:1])
        if x.stem and x.stem[-1].target != x.period[0].source:
            raise PointError("stem does not reach the cycle")
    else:
        p = g.primitive_by_tag.get(x.tag)
        if p is None or p.kind != "fwdray" or p.anchor != x.anchor or x.start < 1:
            raise PointError(f"{x.tag} is not a forward ray at {x.anchor}")
        _check_path(g, x.stem + (x.ray_edge(x.start),))


# -- cylinders -----------------------------------------------------------


@dataclass(frozen=True)
class CylinderSet:
    """``Z(base \\ excluded)``; an empty base is anchored at ``start``."""

    start: str
    base: tuple = ()
    excluded: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(self.base))
        object.__setattr__(self, "excluded", frozenset(self.excluded))

    @property
    def end(self) -> str:
        return self.base[-1].target if self.base else self.start

    def validate(self, g: GraphPresentation) -> None:
        if not g.has_vertex(self.start):
            raise PointError(f"unknown vertex {self.start}")
        if self.base and self.base[0].source != self.start:
            raise PointError("base path does not start at the anchor vertex")
        _check_path(g, self.base)
        for e in self.excluded:
            if not g.is_edge(e) or e.source != self.end:
                raise PointError(f"excluded edge {e} does not leave {self.end}")

    def sort_key(self):
        return (len(self.base), self.start, [e.key for e in self.base],
                len(self.excluded), sorted(e.key for e in self.excluded))

    def __str__(self):
        mu = format_path(self.base) if self.base else self.start
        if not self.excluded:
            return f"Z({mu})"
        return f"Z({mu} \\ {{{','.join(str(e) for e in sorted(self.excluded))}}})"


def membership(x: BoundaryPoint, z: CylinderSet) -> bool:
    """Whether ``x`` starts with the base of ``z`` and then avoids its excluded edges."""
    if source(x) != z.start:
        return False
    n = len(z.base)
    if length(x) < n or tuple(unroll(x, n)) != z.base:
        return False
    nxt = edge_at(x, n)
    return nxt is None or nxt not in z.excluded


@dataclass(frozen=True)
class NonEmptyResult:
    nonempty: bool
    member: Optional[BoundaryPoint] = None


def _bfs_terminals(g: GraphPresentation, v: str):
    """Shortest paths from ``v`` to every reachable terminal, nearest first.

    Returns ``(terminals, rays)`` where terminals are ``(path, vertex)`` for
    sinks, infinite emitters and cycle vertices, and rays are ``(path, tag,
    anchor, start)`` for forward rays reachable when nothing else is.
    """
    p, i = g.resolve(v)
    lead = ()
    if p is not None:
        if p.kind == "outstar":
            return [((), v)], []
        if p.kind == "fwdray":
            return [], [((), p.tag, p.anchor, i + 1)]
        if p.kind == "instar":
            lead = (g.edge(p.tag, i),)
        else:
            lead = tuple(g.edge(p.tag, k) for k in range(i, 0))
        v = p.anchor
    cyc = cycle_vertices(g)
    prev = {v: None}
    order = [v]
    for u in order:
        for a in g.out_arcs[u]:
            if a.target not in prev:
                prev[a.target] = g.edge(a.id, 0)
                order.append(a.target)

    def path_to(u):
        out = []
        while prev[u] is not None:
            out.append(prev[u])
            u = prev[u].source
        return lead + tuple(reversed(out))

    terminals = [(path_to(u), u) for u in order if u in cyc or is_singular(g, u)]
    rays = [(path_to(u), q.tag, u, 1) for u in order for q in g.anchored[u] if q.kind == "fwdray"]
    return terminals, rays


@lru_cache(maxsize=4096)
def _tails(g: GraphPresentation, v: str, cycles_per_vertex: int = 1) -> tuple:
    """Boundary points starting at ``v``, terminal-reaching ones first."""
    terminals, rays = _bfs_terminals(g, v)
    out = []
    cyc = cycle_vertices(g)
    for path, u in terminals:
        if u in cyc:
            for c in cycles_through(g, u)[:cycles_per_vertex]:
                out.append(Lasso(path, c.rotated(u)))
        if is_singular(g, u):
            out.append(FinitePath(path, u))
    for path, tag, anchor, start in rays:
        out.append(RayTail(path, tag, anchor, start))
    return tuple(out)


def candidate_members(g: GraphPresentation, z: CylinderSet, bound: int = 3,
                      cycles_per_vertex: int = 1) -> Iterator[BoundaryPoint]:
    """Members of ``z`` built by extending its base toward a terminal.

    Candidates reaching a sink, cycle or infinite emitter come first, ray
    tails last.  At most ``max(bound, |F| + 1)`` edges of an infinite family
    are tried.
    """
    end = z.end
    deg = out_degree(g, end)
    if deg == 0:
        yield FinitePath(z.base, end)
        return
    width = max(bound, len(z.excluded) + 1)
    later = []
    for nu in g.out_edges(end, bound=width):
        if nu in z.excluded:
            continue
        for tail in _tails(g, nu.target, cycles_per_vertex):
            x = prepend(z.base + (nu,), tail)
            if isinstance(tail, RayTail):
                later.append(x)
            else:
                yield x
    if deg == OMEGA:
        yield FinitePath(z.base, end)
    yield from later


def cylinder_nonempty(g: GraphPresentation, z: CylinderSet) -> NonEmptyResult:
    """Decide whether ``z`` is non-empty and, if so, exhibit a member.

    The cylinder is empty exactly when its end vertex emits finitely many
    (and at least one) edges and all of them are excluded.
    """
    z.validate(g)
    deg = out_degree(g, z.end)
    if 0 < deg < OMEGA and set(g.out_edges(z.end)) <= z.excluded:
        return NonEmptyResult(False)
    return NonEmptyResult(True, next(candidate_members(g, z)))


def singular_vertices(g: GraphPresentation, bound: int = 3) -> set:
    """Singular vertices; derived out-star sinks are listed up to index ``bound``."""
    out = {v for v in g.vertices if is_singular(g, v)}
    for p in g.primitives_of("outstar"):
        out |= {g.derived(p.tag, i) for i in range(1, bound + 1)}
    return out


# -- bounded enumeration -------------------------------------------------


@lru_cache(maxsize=4096)
def _edge_cycles_at(g: GraphPresentation, u: str, bound: int) -> tuple:
    """Edge-level simple cycles starting at core vertex ``u`` (copies < bound)."""
    if u not in g.vertex_set or u not in cycle_vertices(g):
        return ()
    out = []
    for c in enumerate_cycles(g):
        if u not in c.vertices:
            continue
        k = c.vertices.index(u)
        verts = c.vertices[k:] + c.vertices[:k]
        choices = []
        for i, a in enumerate(verts):
            b = verts[(i + 1) % len(verts)]
            choices.append([g.edge(arc.id, j) for arc in g.out_arcs[a] if arc.target == b
                            for j in range(int(min(arc.mult, bound)))])
        out += [tuple(word) for word in itertools.product(*choices)]
    return tuple(out)


def enumerate_points(g: GraphPresentation, start: str, depth: int, bound: int = 3) -> list:
    """Representable boundary points from ``start`` with stem length at most ``depth``.

    Lasso periods are restricted to simple cycles and infinite edge families
    to their first ``bound`` members; the result is sorted and duplicate-free.
    """
    found = set()

    def visit(path, u):
        if is_singular(g, u):
            found.add(FinitePath(path, u))
        for word in _edge_cycles_at(g, u, bound):
            found.add(Lasso(path, word))
        p, i = g.resolve(u)
        if p is None:
            for q in g.anchored[u]:
                if q.kind == "fwdray":
                    found.add(RayTail(path, q.tag, u, 1))
        elif p.kind == "fwdray":
            found.add(RayTail(path, p.tag, p.anchor, i + 1))
        if len(path) < depth and out_degree(g, u) > 0:
            for e in g.out_edges(u, bound=bound):
                visit(path + (e,), e.target)

    visit((), start)
    return sorted(found, key=format_point)


@dataclass(frozen=True)
class HomeoReport:
    base: tuple
    depth: int
    source_count: int
    target_count: int
    collisions: tuple = ()
    missing: tuple = ()
    extra: tuple = ()

    @property
    def bijective(self) -> bool:
        return not (self.collisions or self.missing or self.extra)


def local_homeo_check(g: GraphPresentation, start: str, base, depth: int, bound: int = 3) -> HomeoReport:
    """Check that shifting by ``|base|`` maps ``Z(base)`` bijectively onto ``Z(r(base))``.

    Only points with stem at most ``depth + |base|`` (source side) and
    ``depth`` (target side) are enumerated; the check is exact on those sets.
    """
    base = tuple(base)
    zmu = CylinderSet(start, base)
    zmu.validate(g)
    n = len(base)
    bound = max([bound] + [e.index + 1 for e in base])
    src = [x for x in enumerate_points(g, start, depth + n, bound) if membership(x, zmu)]
    dst = set(enumerate_points(g, zmu.end, depth, bound))
    images = {}
    collisions = []
    for x in src:
        y = shift(x, n)
        if y in images:
            collisions.append((images[y], x))
        images[y] = x
    missing = sorted(dst - set(images), key=format_point)
    extra = sorted(set(images) - dst, key=format_point)
    return HomeoReport(base, depth, len(src), len(dst), tuple(collisions), tuple(missing), tuple(extra))


# -- text notation -------------------------------------------------------


def format_path(edges) -> str:
    return ".".join(str(e) for e in edges)


def format_point(x: BoundaryPoint) -> str:
    if isinstance(x, FinitePath):
        return format_path(x.edges) if x.edges else x.terminal
    stem = format_path(x.stem) + "." if x.stem else ""
    if isinstance(x, Lasso):
        word = str(x.cycle[0]) if len(x.cycle) == 1 else f"({format_path(x.cycle)})"
        return f"{stem}{word}^inf" + (f"@{x.phase}" if x.phase else "")
    return f"{stem}{x.tag}^ray" + (f"@{x.start}" if x.start != 1 else "")


def parse_path(g: GraphPresentation, text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    try:
        edges = tuple(g.edge_by_name(t) for t in text.split("."))
    except PresentationError as exc:
        raise PointError(str(exc)) from None
    _check_path(g, edges)
    return edges


_LASSO = re.compile(r"^(?:(?P<stem>[^()]*)\.)?\((?P<cycle>[^()]+)\)\^inf(?:@(?P<phase>\d+))?$")
_LOOP = re.compile(r"^(?:(?P<stem>[^()]*)\.)?(?P<cycle>[A-Za-z0-9_]+(?:#-?\d+)?)\^inf(?:@(?P<phase>\d+))?$")
_RAY = re.compile(r"^(?:(?P<stem>[^()]*)\.)?(?P<tag>[A-Za-z0-9_]+)\^ray(?:@(?P<start>\d+))?$")


def parse_point(g: GraphPresentation, text: str) -> BoundaryPoint:
    """Read a point in report notation and check it against ``g``.

    ``e1.e2`` is a finite path, a bare vertex id the empty path there,
    ``s1.(c1.c2)^inf@k`` a lasso (``e^inf`` for a single loop) and
    ``s1.r^ray@k`` a ray tail entering forward ray ``r`` at edge ``r#k``.
    """
    text = text.strip()
    m = _LASSO.match(text) or _LOOP.match(text)
    if m:
        x = Lasso(parse_path(g, m.group("stem") or ""), parse_path(g, m.group("cycle")),
                  int(m.group("phase") or 0))
    elif _RAY.match(text):
        m = _RAY.match(text)
        p = g.primitive_by_tag.get(m.group("tag"))
        if p is None or p.kind != "fwdray":
            raise PointError(f"{m.group('tag')} is not a forward ray")
        x = RayTail(parse_path(g, m.group("stem") or ""), p.tag, p.anchor, int(m.group("start") or 1))
    elif g.has_vertex(text):
        x = FinitePath((), text)
    else:
        edges = parse_path(g, text)
        x = FinitePath(edges, edges[-1].target)
    validate_point(g, x)
    return x


_CYL = re.compile(r"^Z\((?P<base>[^\\{}]*?)\s*(?:\\\s*\{(?P<ex>[^{}]*)\})?\s*\)$")


def parse_cylinder(g: GraphPresentation, text: str) -> CylinderSet:
    """Read ``Z(mu)`` or ``Z(mu \\ {e1,e2})``; ``mu`` may be a vertex id."""
    m = _CYL.match(text.strip())
    if not m:
        raise PointError(f"malformed cylinder {text!r}")
    base_text = m.group("base").strip()
    if g.has_vertex(base_text):
        start, base = base_text, ()
    else:
        base = parse_path(g, base_text)
        if not base:
            raise PointError("empty cylinder base")
        start = base[0].source
    ex = m.group("ex")
    try:
        excluded = {g.edge_by_name(t) for t in ex.split(",") if t.strip()} if ex else set()
    except PresentationError as exc:
        raise PointError(str(exc)) from None
    z = CylinderSet(start, base, frozenset(excluded))
    z.validate(g)
    return z
