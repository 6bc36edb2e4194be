"""Brute-force counterparts of the symbolic deciders.

Everything here works on an explicit finite truncation of the presented
graph, built straight from the raw arcs and primitives.  Nothing calls into
the symbolic layer (degrees, cycles, reachability), so whenever the two
sides disagree the symbolic side is the suspect.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .presentation import OMEGA, Arc, Edge, GraphPresentation, Primitive

__all__ = [
    "TruncatedExpansion",
    "expand",
    "enumerate_paths",
    "brute_backward_chain",
    "longest_backward_chain",
    "window",
    "backward_chain_plateau",
    "infinite_receivers",
    "has_cycle_with_exit",
    "stranded_vertices",
    "oracle_vector",
    "cylinder_has_member",
    "RandomSpec",
    "random_presentation",
    "random_corpus",
]


def _name(tag, i):
    return f"{tag}[{i}]"


@dataclass
class TruncatedExpansion:
    """Finite piece of the graph: every infinite family cut after ``bound`` members."""

    bound: int
    vertices: list
    edges: list
    out_map: dict = field(default_factory=dict, repr=False)
    in_map: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        out_map = defaultdict(list)
        in_map = defaultdict(list)
        for e in self.edges:
            out_map[e.source].append(e)
            in_map[e.target].append(e)
        self.out_map = {v: sorted(out_map[v]) for v in self.vertices}
        self.in_map = {v: sorted(in_map[v]) for v in self.vertices}

    def out_count(self, v) -> int:
        return len(self.out_map.get(v, ()))

    def in_count(self, v) -> int:
        return len(self.in_map.get(v, ()))


def expand(g: GraphPresentation, bound: int) -> TruncatedExpansion:
    """Explicit multigraph with omega arcs and primitive families cut at ``bound``."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    vertices = list(g.vertices)
    edges = []
    for a in g.arcs:
        copies = bound if a.mult == OMEGA else a.mult
        edges += [Edge(a.id, k, a.source, a.target) for k in range(copies)]
    for p in g.primitives:
        t, v = p.tag, p.anchor
        if p.kind == "backray":
            vertices += [_name(t, -i) for i in range(1, bound + 1)]
            for i in range(1, bound + 1):
                tgt = v if i == 1 else _name(t, -i + 1)
                edges.append(Edge(t, -i, _name(t, -i), tgt))
            continue
        vertices += [_name(t, i) for i in range(1, bound + 1)]
        for i in range(1, bound + 1):
            if p.kind == "instar":
                edges.append(Edge(t, i, _name(t, i), v))
            elif p.kind == "outstar":
                edges.append(Edge(t, i, v, _name(t, i)))
            else:
                src = v if i == 1 else _name(t, i - 1)
                edges.append(Edge(t, i, src, _name(t, i)))
    return TruncatedExpansion(bound, vertices, edges)


def enumerate_paths(t: TruncatedExpansion, to: str, max_length: int) -> list:
    """All edge sequences of length at most ``max_length`` ending at ``to``.

    Ordered by length, then by edge names.  Edges may repeat (walks).
    """
    out = [()]
    frontier = [()]
    for _ in range(max_length):
        nxt = []
        for p in frontier:
            head = p[0].source if p else to
            for e in t.in_map.get(head, ()):
                nxt.append((e,) + p)
        out += sorted(nxt, key=lambda p: [e.key for e in p])
        frontier = nxt
    return out


def _longest_into(t: TruncatedExpansion, v: str, used: set, cap: int) -> int:
    """Longest backward trail (distinct edges) ending at ``v``, searched up to ``cap``."""
    best = 0
    for e in t.in_map.get(v, ()):
        if e in used:
            continue
        used.add(e)
        best = max(best, 1 + _longest_into(t, e.source, used, cap - 1))
        used.discard(e)
        if best >= cap:
            break
    return best


def window(g: GraphPresentation) -> list:
    """Core vertices plus the first derived vertex of every primitive.

    Every backward chain of the full graph ends in an edge whose range can be
    moved into this window by extending the chain forward, so chain lengths
    are measured into these vertices only.
    """
    return list(g.vertices) + [_name(p.tag, -1 if p.kind == "backray" else 1) for p in g.primitives]


def longest_backward_chain(t: TruncatedExpansion, cap: int, targets=None) -> int:
    """Longest path with pairwise distinct edges ending in ``targets``, searched up to ``cap``."""
    best = 0
    for v in t.vertices if targets is None else targets:
        best = max(best, _longest_into(t, v, set(), cap))
        if best >= cap:
            return cap
    return best


def brute_backward_chain(t: TruncatedExpansion, min_length: int) -> Optional[list]:
    """A path of at least ``min_length`` pairwise distinct edges, if ``t`` has one."""

    def dfs(v, chain, used):
        if len(chain) >= min_length:
            return list(chain)
        for e in t.in_map.get(v, ()):
            if e in used:
                continue
            used.add(e)
            chain.insert(0, e)
            found = dfs(e.source, chain, used)
            if found:
                return found
            chain.pop(0)
            used.discard(e)
        return None

    if min_length <= 0:
        return []
    for v in t.vertices:
        found = dfs(v, [], set())
        if found:
            return found
    return None


def backward_chain_plateau(g: GraphPresentation, bounds=(8, 16, 32)) -> Optional[bool]:
    """Brute-force verdict on infinite backward chains.

    ``True`` (a chain exists) when the longest distinct-edge path reaches
    ``B`` at every bound ``B``; ``False`` when it stays below the largest
    bound and stops growing between the last two; ``None`` if neither.
    """
    targets = window(g)
    longest = [longest_backward_chain(expand(g, b), b, targets) for b in bounds]
    if all(n >= b for n, b in zip(longest, bounds)):
        return True
    if longest[-1] < bounds[-1] and longest[-2] == longest[-1]:
        return False
    return None


def infinite_receivers(g: GraphPresentation, bound: int = 4) -> list:
    """Vertices whose in-degree keeps growing when the truncation doubles."""
    t1, t2 = expand(g, bound), expand(g, 2 * bound)
    return [v for v in t1.vertices if t1.in_count(v) >= 1 and t2.in_count(v) > t1.in_count(v)]


def _emitters(t1, t2):
    return {v for v in t1.vertices if t1.out_count(v) >= 1 and t2.out_count(v) > t1.out_count(v)}


def has_cycle_with_exit(g: GraphPresentation) -> bool:
    """Search every vertex-simple cycle of the truncation at 2 for an exit."""
    t = expand(g, 2)
    found = False

    def dfs(start, v, path, seen):
        nonlocal found
        for e in t.out_map[v]:
            if found:
                return
            if e.target == start:
                cyc = path + [e]
                if any(f not in cyc for c in cyc for f in t.out_map[c.source]):
                    found = True
                    return
            elif e.target not in seen and e.target > start:
                seen.add(e.target)
                dfs(start, e.target, path + [e], seen)
                seen.discard(e.target)

    for s in t.vertices:
        dfs(s, s, [], {s})
        if found:
            return True
    return False


def _on_cycle(t):
    on = set()
    for s in t.vertices:
        stack = [e.target for e in t.out_map[s]]
        seen = set()
        while stack:
            u = stack.pop()
            if u == s:
                on.add(s)
                break
            if u in seen:
                continue
            seen.add(u)
            stack += [e.target for e in t.out_map[u]]
    return on


def stranded_vertices(g: GraphPresentation, bound: int = 4) -> list:
    """Vertices of the truncation at ``bound`` that reach no sink, cycle or infinite emitter.

    Reachability is explored in the truncation at ``2 * bound``; a vertex
    counts as a sink only if it emits nothing at either level.
    """
    t1, t2 = expand(g, bound), expand(g, 2 * bound)
    good = {v for v in t1.vertices if t2.out_count(v) == 0}
    good |= _emitters(t1, t2)
    good |= _on_cycle(t2) & set(t1.vertices)
    out = []
    for v in t1.vertices:
        seen, stack = {v}, [v]
        ok = False
        while stack and not ok:
            u = stack.pop()
            if u in good:
                ok = True
            for e in t2.out_map[u]:
                if e.target not in seen:
                    seen.add(e.target)
                    stack.append(e.target)
        if not ok:
            out.append(v)
    return out


def oracle_vector(g: GraphPresentation) -> tuple:
    """Brute-force (a, b, c, d) vector; c is ``None`` when the plateau rule is inconclusive."""
    chain = backward_chain_plateau(g)
    return (
        not infinite_receivers(g),
        not has_cycle_with_exit(g),
        None if chain is None else not chain,
        not stranded_vertices(g),
    )


@lru_cache(maxsize=2048)
def _forward_paths(g, start, depth, bound):
    t1, t2 = expand(g, bound), expand(g, 2 * bound)
    singular = {v for v in t1.vertices if t2.out_count(v) == 0} | _emitters(t1, t2)
    paths, frontier = [()], [()]
    for _ in range(depth):
        frontier = [p + (e,) for p in frontier for e in t2.out_map[p[-1].target if p else start]]
        paths += frontier
    return singular, paths


def cylinder_has_member(g: GraphPresentation, start: str, base, excluded, depth: int = 4,
                        bound: int = 4) -> bool:
    """Whether an enumerated path of length at most ``depth`` witnesses ``Z(base \\ excluded)``.

    Paths from ``start`` in the truncation at ``2 * bound`` are listed
    exhaustively, so a base using family members up to ``bound`` is never
    cut off by the truncation.  A path witnesses the set when it starts with ``base`` and
    either continues with an edge outside ``excluded`` (any finite path
    extends to a boundary path) or equals ``base`` and ends at a sink or an
    infinite emitter.
    """
    singular, paths = _forward_paths(g, start, depth, bound)
    base = tuple(base)
    n = len(base)
    for p in paths:
        if p[:n] != base:
            continue
        if len(p) > n and p[n] not in excluded:
            return True
        if len(p) == n and (p[-1].target if p else start) in singular:
            return True
    return False


# -- random presentations -------------------------------------------------


@dataclass(frozen=True)
class RandomSpec:
    seed: int
    max_core_vertices: int = 4
    arc_density: float = 0.3
    omega_prob: float = 0.0
    max_mult: int = 2
    instars: int = 0
    outstars: int = 0
    backrays: int = 0
    fwdrays: int = 0
    # draw arcs only from lower to higher index, closing loops on some sinks
    forward_only: bool = False
    loop_prob: float = 0.3


def random_presentation(spec: RandomSpec) -> GraphPresentation:
    """Deterministic random presentation drawn from ``spec``."""
    rng = random.Random(spec.seed)
    n = rng.randint(1, spec.max_core_vertices)
    vertices = tuple(f"v{i}" for i in range(n))
    arcs = []
    for i in range(n):
        for j in range(n):
            if spec.forward_only and j <= i:
                continue
            if rng.random() < spec.arc_density:
                mult = OMEGA if rng.random() < spec.omega_prob else rng.randint(1, spec.max_mult)
                arcs.append(Arc(f"a{len(arcs)}", vertices[i], vertices[j], mult))
    if spec.forward_only:
        sources = {a.source for a in arcs}
        for v in vertices:
            if v not in sources and rng.random() < spec.loop_prob:
                arcs.append(Arc(f"a{len(arcs)}", v, v, 1))
    prims = []
    for kind, count in (("instar", spec.instars), ("outstar", spec.outstars),
                        ("backray", spec.backrays), ("fwdray", spec.fwdrays)):
        for _ in range(count):
            prims.append(Primitive(kind, f"p{len(prims)}", rng.choice(vertices)))
    return GraphPresentation(vertices, tuple(arcs), tuple(prims))


_KINDS = ("instar", "outstar", "backray", "fwdray")


def random_corpus(size: int, master_seed: int = 0, max_core_vertices: int = 6,
                  max_primitives: int = 2) -> list:
    """``size`` random presentations with varied shapes, all drawn from ``master_seed``."""
    rng = random.Random(master_seed)
    out = []
    for _ in range(size):
        counts = dict.fromkeys(_KINDS, 0)
        for _ in range(rng.choice(range(max_primitives + 1))):
            counts[rng.choice(_KINDS)] += 1
        spec = RandomSpec(
            seed=rng.getrandbits(63),
            max_core_vertices=rng.randint(1, max_core_vertices),
            arc_density=rng.choice((0.1, 0.2, 0.3, 0.4)),
            omega_prob=rng.choice((0.0, 0.0, 0.15)),
            max_mult=rng.choice((1, 2)),
            instars=counts["instar"],
            outstars=counts["outstar"],
            backrays=counts["backray"],
            fwdrays=counts["fwdray"],
            forward_only=rng.random() < 0.5,
        )
        out.append((spec, random_presentation(spec)))
    return out
