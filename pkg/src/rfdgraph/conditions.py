"""Deciders for the four graph conditions characterising RFD graph algebras.

The graph algebra of ``G`` is residually finite-dimensional exactly when

a) no vertex receives infinitely many edges,
b) no cycle has an exit,
c) there is no infinite backward chain of distinct edges,
d) every vertex has a finite path to a sink, a cycle or an infinite emitter.

Each decider returns a :class:`ConditionResult` whose witness, when the
condition fails, can be re-checked against the presentation with
``witness.validate(g)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import networkx as nx

from .presentation import (
    OMEGA,
    Edge,
    GraphPresentation,
    components,
    in_degree,
    out_degree,
)

__all__ = [
    "Cycle",
    "CycleList",
    "InfiniteReceiver",
    "CycleWithExit",
    "BackwardChainGen",
    "StrandedVertex",
    "WitnessError",
    "ConditionResult",
    "ConditionReport",
    "enumerate_cycles",
    "cycle_vertices",
    "cycles_through",
    "check_no_infinite_receiver",
    "check_no_cycle_with_exit",
    "check_no_infinite_backward_chain",
    "check_reaches_terminal",
    "decide_rfd",
    "forward_summary",
]

DEFAULT_CYCLE_CAP = 10_000


class WitnessError(ValueError):
    """A witness does not certify what it claims about the presentation."""


@dataclass(frozen=True)
class Cycle:
    """A simple directed cycle, rotated to start at its smallest vertex id."""

    edges: tuple
    vertices: tuple

    def __post_init__(self):
        if not self.edges or len(self.edges) != len(self.vertices):
            raise ValueError("cycle needs matching non-empty edge and vertex lists")

    def __len__(self):
        return len(self.edges)

    def rotated(self, vertex: str) -> tuple:
        """Edge word of the cycle starting at ``vertex``."""
        i = self.vertices.index(vertex)
        return self.edges[i:] + self.edges[:i]

    def validate(self, g: GraphPresentation) -> None:
        for e in self.edges:
            if not g.is_edge(e):
                raise WitnessError(f"{e} is not an edge")
        n = len(self.edges)
        for i, e in enumerate(self.edges):
            if e.source != self.vertices[i] or e.target != self.vertices[(i + 1) % n]:
                raise WitnessError("cycle edges do not compose")
        if len(set(self.vertices)) != n:
            raise WitnessError("cycle repeats a vertex")

    def to_document(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [str(e) for e in self.edges]}

    def __str__(self):
        return ".".join(str(e) for e in self.edges)


class CycleList(list):
    """List of cycles; ``truncated`` is set when enumeration hit its cap."""

    truncated = False


@dataclass(frozen=True)
class InfiniteReceiver:
    vertex: str
    samples: tuple

    def validate(self, g: GraphPresentation) -> None:
        if in_degree(g, self.vertex) != OMEGA:
            raise WitnessError(f"{self.vertex} has finite in-degree")
        if len(set(self.samples)) != len(self.samples) or len(self.samples) < 3:
            raise WitnessError("need three distinct sample in-edges")
        for e in self.samples:
            if not g.is_edge(e) or e.target != self.vertex:
                raise WitnessError(f"{e} is not an edge into {self.vertex}")

    def to_document(self) -> dict:
        return {"type": "InfiniteReceiver", "vertex": self.vertex, "samples": [str(e) for e in self.samples]}

    def describe(self) -> str:
        return f"infinite receiver {self.vertex} (in-edges {', '.join(map(str, self.samples))}, ...)"


@dataclass(frozen=True)
class CycleWithExit:
    cycle: Cycle
    exit: Edge
    position: int

    def validate(self, g: GraphPresentation) -> None:
        self.cycle.validate(g)
        if not g.is_edge(self.exit):
            raise WitnessError(f"{self.exit} is not an edge")
        if self.exit.source != self.cycle.vertices[self.position]:
            raise WitnessError("exit does not leave the cycle at the stated position")
        if self.exit == self.cycle.edges[self.position]:
            raise WitnessError("exit coincides with the cycle edge")

    def to_document(self) -> dict:
        return {
            "type": "CycleWithExit",
            "cycle": self.cycle.to_document(),
            "exit": str(self.exit),
            "position": self.position,
        }

    def describe(self) -> str:
        return f"cycle {self.cycle} has exit {self.exit} at {self.cycle.vertices[self.position]}"


@dataclass(frozen=True)
class BackwardChainGen:
    """Generator of an infinite backward chain: a backward ray or a cycle of omega arcs."""

    backray: Optional[str] = None
    cycle: Optional[Cycle] = None

    def validate(self, g: GraphPresentation) -> None:
        if (self.backray is None) == (self.cycle is None):
            raise WitnessError("exactly one of backray / cycle must be given")
        if self.backray is not None:
            p = g.primitive_by_tag.get(self.backray)
            if p is None or p.kind != "backray":
                raise WitnessError(f"{self.backray} is not a backward ray")
            return
        self.cycle.validate(g)
        for e in self.cycle.edges:
            if not g.arc_by_id[e.label].is_omega:
                raise WitnessError(f"arc {e.label} has finite multiplicity")

    def chain(self, g: GraphPresentation, length: int) -> list:
        """The last ``length`` edges of the generated chain, in path order."""
        if self.backray is not None:
            return [g.edge(self.backray, -k) for k in range(length, 0, -1)]
        arcs = [e.label for e in self.cycle.edges]
        k = len(arcs)
        back = [g.edge(arcs[(k - 1 - q) % k], q // k) for q in range(length)]
        return back[::-1]

    def to_document(self) -> dict:
        return {
            "type": "BackwardChainGen",
            "backray": self.backray,
            "cycle": None if self.cycle is None else self.cycle.to_document(),
        }

    def describe(self) -> str:
        if self.backray is not None:
            return f"backward ray {self.backray}"
        return f"cycle of omega arcs {self.cycle}"


@dataclass(frozen=True)
class StrandedVertex:
    """A vertex with no finite path to a sink, a cycle or an infinite emitter."""

    vertex: str
    core: tuple = ()
    rays: tuple = ()

    def validate(self, g: GraphPresentation) -> None:
        core, rays, good = forward_summary(g, self.vertex)
        if good:
            raise WitnessError(f"{self.vertex} reaches a sink, cycle or infinite emitter")
        if tuple(sorted(core)) != self.core or tuple(sorted(rays)) != self.rays:
            raise WitnessError("forward closure summary is stale")

    def to_document(self) -> dict:
        return {
            "type": "StrandedVertex",
            "vertex": self.vertex,
            "closure": {"core": list(self.core), "rays": list(self.rays)},
        }

    def describe(self) -> str:
        return f"{self.vertex} never reaches a sink, cycle or infinite emitter"


Witness = Union[InfiniteReceiver, CycleWithExit, BackwardChainGen, StrandedVertex]


@dataclass(frozen=True)
class ConditionResult:
    holds: bool
    witness: Optional[Witness] = None

    def to_document(self) -> dict:
        return {"holds": self.holds, "witness": None if self.witness is None else self.witness.to_document()}


@dataclass(frozen=True)
class ConditionReport:
    a: ConditionResult
    b: ConditionResult
    c: ConditionResult
    d: ConditionResult
    vertices: tuple = ()
    components: tuple = ()

    @property
    def rfd(self) -> bool:
        return self.a.holds and self.b.holds and self.c.holds and self.d.holds

    @property
    def vector(self) -> tuple:
        return (self.a.holds, self.b.holds, self.c.holds, self.d.holds)

    def results(self):
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}

    def witnesses(self) -> list:
        out = []
        for comp in self.components or (self,):
            out += [r.witness for r in comp.results().values() if r.witness is not None]
        return out

    def to_document(self) -> dict:
        doc = {
            "rfd": self.rfd,
            "conditions": {k: r.to_document() for k, r in self.results().items()},
        }
        if self.components:
            doc["components"] = [
                dict(vertices=list(c.vertices), **c.to_document()) for c in self.components
            ]
        else:
            doc["components"] = []
        return doc


# -- cycles --------------------------------------------------------------


@lru_cache(maxsize=256)
def _core_digraph(g: GraphPresentation) -> nx.DiGraph:
    dg = nx.DiGraph()
    dg.add_nodes_from(g.vertices)
    for a in g.arcs:
        dg.add_edge(a.source, a.target)
    return dg


@lru_cache(maxsize=256)
def cycle_vertices(g: GraphPresentation) -> frozenset:
    """Core vertices lying on at least one cycle."""
    dg = _core_digraph(g)
    out = set()
    for comp in nx.strongly_connected_components(dg):
        if len(comp) > 1:
            out |= comp
    out |= {v for v in g.vertices if dg.has_edge(v, v)}
    return frozenset(out)


def _cycle_from_vertices(g: GraphPresentation, verts) -> Cycle:
    verts = list(verts)
    k = verts.index(min(verts))
    verts = verts[k:] + verts[:k]
    edges = []
    for i, u in enumerate(verts):
        w = verts[(i + 1) % len(verts)]
        arc = min((a for a in g.out_arcs[u] if a.target == w), key=lambda a: a.id)
        edges.append(g.edge(arc.id, 0))
    return Cycle(tuple(edges), tuple(verts))


def enumerate_cycles(g: GraphPresentation, cap: Optional[int] = DEFAULT_CYCLE_CAP) -> CycleList:
    """All simple cycles of the core, one per vertex sequence, sorted.

    Parallel arcs are represented by the smallest arc id, copy 0.  At most
    ``cap`` cycles are returned; ``result.truncated`` flags a cut.
    """
    return _enumerate_cycles(g, cap)


@lru_cache(maxsize=256)
def _enumerate_cycles(g, cap):
    out = CycleList()
    for i, verts in enumerate(nx.simple_cycles(_core_digraph(g))):
        if cap is not None and i >= cap:
            out.truncated = True
            break
        out.append(_cycle_from_vertices(g, verts))
    out.sort(key=lambda c: c.vertices)
    return out


def _shortest_cycle_through(g: GraphPresentation, v: str) -> Cycle:
    prev = {v: None}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for a in g.out_arcs[u]:
            w = a.target
            if w == v:
                path = [u]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return _cycle_from_vertices(g, path[::-1])
            if w not in prev:
                prev[w] = u
                queue.append(w)
    raise ValueError(f"{v} is not on a cycle")


def cycles_through(g: GraphPresentation, v: str) -> list:
    """Cycles through ``v``, smallest first; never empty when ``v`` is on a cycle."""
    cycles = enumerate_cycles(g)
    found = [c for c in cycles if v in c.vertices]
    if not found and cycles.truncated and v in cycle_vertices(g):
        found = [_shortest_cycle_through(g, v)]
    return found


# -- condition a ---------------------------------------------------------


def check_no_infinite_receiver(g: GraphPresentation) -> ConditionResult:
    candidates = []
    for a in g.arcs:
        if a.is_omega:
            candidates.append((a.target, a.id, [g.edge(a.id, k) for k in range(3)]))
    for p in g.primitives_of("instar"):
        candidates.append((p.anchor, p.tag, [g.edge(p.tag, k) for k in range(1, 4)]))
    if not candidates:
        return ConditionResult(True)
    v, _, samples = min(candidates, key=lambda t: (t[0], t[1]))
    return ConditionResult(False, InfiniteReceiver(v, tuple(samples)))


# -- condition b ---------------------------------------------------------


def check_no_cycle_with_exit(g: GraphPresentation) -> ConditionResult:
    bad = {v for v in cycle_vertices(g) if out_degree(g, v) >= 2}
    if not bad:
        return ConditionResult(True)
    cycles = enumerate_cycles(g)
    if cycles.truncated:
        cycles = cycles_through(g, min(bad))
    for cyc in cycles:
        for pos, v in enumerate(cyc.vertices):
            if v in bad:
                own = cyc.edges[pos]
                exit_edge = next(e for e in g.out_edges(v, bound=2) if e != own)
                return ConditionResult(False, CycleWithExit(cyc, exit_edge, pos))
    raise AssertionError("cycle vertex with out-degree >= 2 but no cycle found")


# -- condition c ---------------------------------------------------------


def check_no_infinite_backward_chain(g: GraphPresentation) -> ConditionResult:
    rays = g.primitives_of("backray")
    if rays:
        return ConditionResult(False, BackwardChainGen(backray=rays[0].tag))
    omega = [a for a in g.arcs if a.is_omega]
    if not omega:
        return ConditionResult(True)
    sub = GraphPresentation(
        vertices=g.vertices, arcs=tuple(omega), primitives=()
    )
    cycles = enumerate_cycles(sub, cap=None if len(omega) < 16 else DEFAULT_CYCLE_CAP)
    if not cycles:
        return ConditionResult(True)
    cyc = cycles[0]
    edges = tuple(g.edge(e.label, 0) for e in cyc.edges)
    return ConditionResult(False, BackwardChainGen(cycle=Cycle(edges, cyc.vertices)))


# -- condition d ---------------------------------------------------------


def _is_good(g: GraphPresentation, v: str) -> bool:
    return out_degree(g, v) in (0, OMEGA) or v in cycle_vertices(g)


def forward_summary(g: GraphPresentation, v: str):
    """Forward closure of ``v``: (core vertices, forward-ray tags, reaches-terminal).

    Terminal means a sink, a cycle vertex or an infinite emitter.
    """
    p, _ = g.resolve(v)
    if p is not None:
        if p.kind == "outstar":
            return set(), set(), True
        if p.kind == "fwdray":
            return set(), {p.tag}, False
        start = p.anchor
    else:
        start = v
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for a in g.out_arcs[u]:
            if a.target not in seen:
                seen.add(a.target)
                queue.append(a.target)
    rays = {q.tag for u in seen for q in g.anchored[u] if q.kind == "fwdray"}
    good = any(_is_good(g, u) for u in seen)
    return seen, rays, good


def check_reaches_terminal(g: GraphPresentation) -> ConditionResult:
    rays = g.primitives_of("fwdray")
    if rays:
        v = g.derived(rays[0].tag, 1)
        core, tags, _ = forward_summary(g, v)
        return ConditionResult(False, StrandedVertex(v, tuple(sorted(core)), tuple(sorted(tags))))
    good = [v for v in g.vertices if _is_good(g, v)]
    closure = set(good)
    queue = deque(good)
    while queue:
        u = queue.popleft()
        for a in g.in_arcs[u]:
            if a.source not in closure:
                closure.add(a.source)
                queue.append(a.source)
    stranded = sorted(set(g.vertices) - closure)
    if not stranded:
        return ConditionResult(True)
    v = stranded[0]
    core, tags, _ = forward_summary(g, v)
    return ConditionResult(False, StrandedVertex(v, tuple(sorted(core)), tuple(sorted(tags))))


# -- verdict -------------------------------------------------------------


def _component_report(g: GraphPresentation) -> ConditionReport:
    return ConditionReport(
        a=check_no_infinite_receiver(g),
        b=check_no_cycle_with_exit(g),
        c=check_no_infinite_backward_chain(g),
        d=check_reaches_terminal(g),
        vertices=tuple(g.vertices),
    )


def decide_rfd(g: GraphPresentation) -> ConditionReport:
    """Run the four deciders on every connected component and conjoin them.

    The top-level result for each condition carries the witness from the
    first component where it fails; per-component reports keep all of them.
    """
    subs = tuple(_component_report(c) for c in components(g))
    merged = {}
    for key in "abcd":
        failing = [getattr(s, key) for s in subs if not getattr(s, key).holds]
        merged[key] = failing[0] if failing else ConditionResult(True)
    return ConditionReport(vertices=tuple(g.vertices), components=subs, **merged)
