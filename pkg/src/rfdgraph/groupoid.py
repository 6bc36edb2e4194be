"""The graph groupoid on the boundary path space.

Elements are triples ``(x, m - n, y)`` with ``shift(x, m) == shift(y, n)``.
Two boundary points lie in the same orbit exactly when they share a tail,
so an orbit is determined by the tail of any of its points:

* a finite path ending at ``t`` -- the orbit is every finite path into ``t``;
* a lasso with period word ``W`` -- the orbit is every ``q . W^inf`` read
  from some position ``i`` of ``W``, with ``q`` a path into ``s(W_i)`` whose
  last edge is not ``W_{i-1}``;
* a ray tail -- always an infinite orbit.

A point is periodic when its orbit is finite.  :func:`periodic_density_check`
looks for a periodic point in every basic open set up to given bounds, which
is the groupoid-side counterpart of :func:`rfdgraph.conditions.decide_rfd`.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Union

from . import boundary as bd
from .boundary import BoundaryPoint, CylinderSet, FinitePath, Lasso, RayTail
from .conditions import (
    BackwardChainGen,
    CycleWithExit,
    InfiniteReceiver,
    StrandedVertex,
    cycle_vertices,
    cycles_through,
    decide_rfd,
    forward_summary,
)
from .presentation import (
    OMEGA,
    Arc,
    Edge,
    GraphPresentation,
    PresentationError,
    core_coreachable,
    in_degree,
    out_degree,
)

__all__ = [
    "GroupoidError",
    "GroupoidElement",
    "unit",
    "compose",
    "invert",
    "Trivial",
    "InfiniteCyclic",
    "isotropy",
    "verify_minimal_period",
    "incoming_path_count",
    "path_count_into",
    "PrependBackward",
    "PrependCycleExit",
    "ShiftEscape",
    "OrbitReport",
    "OrbitCapExceeded",
    "orbit",
    "orbit_key",
    "KonigPreconditionError",
    "konig_backward_chain",
    "DensityParams",
    "DensityWitness",
    "NotDense",
    "DensityReport",
    "periodic_density_check",
    "not_dense_from_witness",
    "validate_not_dense",
]


class GroupoidError(ValueError):
    """Invalid groupoid element or non-composable pair."""


@dataclass(frozen=True)
class GroupoidElement:
    """``(x, k, y)`` with evidence ``shift(x, m) == shift(y, n)``, ``k = m - n``."""

    x: BoundaryPoint
    k: int
    y: BoundaryPoint
    m: int = field(default=0, compare=False)
    n: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.m < 0 or self.n < 0 or self.m - self.n != self.k:
            raise GroupoidError(f"evidence ({self.m}, {self.n}) does not give k = {self.k}")
        try:
            ok = bd.shift(self.x, self.m) == bd.shift(self.y, self.n)
        except bd.PointError as exc:
            raise GroupoidError(str(exc)) from None
        if not ok:
            raise GroupoidError("points are not shift-equivalent with the given evidence")

    @property
    def is_unit(self) -> bool:
        return self.k == 0 and self.x == self.y


def unit(x: BoundaryPoint) -> GroupoidElement:
    return GroupoidElement(x, 0, x, 0, 0)


def compose(a: GroupoidElement, b: GroupoidElement) -> GroupoidElement:
    """``(x, k, y)(y, l, z) = (x, k + l, z)``."""
    if a.y != b.x:
        raise GroupoidError("elements are not composable")
    t = max(a.n, b.m)
    return GroupoidElement(a.x, a.k + b.k, b.y, a.m + t - a.n, b.n + t - b.m)


def invert(a: GroupoidElement) -> GroupoidElement:
    return GroupoidElement(a.y, -a.k, a.x, a.n, a.m)


# -- isotropy ------------------------------------------------------------


@dataclass(frozen=True)
class Trivial:
    def __str__(self):
        return "trivial"


@dataclass(frozen=True)
class InfiniteCyclic:
    period: int

    def __post_init__(self):
        if self.period < 1:
            raise ValueError("period must be positive")

    def __str__(self):
        return f"Z (generator period {self.period})"


IsotropyGroup = Union[Trivial, InfiniteCyclic]


def isotropy(x: BoundaryPoint) -> IsotropyGroup:
    """Isotropy group at ``x``: infinite cyclic for eventually periodic points, else trivial."""
    if isinstance(x, Lasso):
        return InfiniteCyclic(len(x.cycle))
    return Trivial()


def verify_minimal_period(x: BoundaryPoint, period: int) -> bool:
    """Unroll ``3 * period`` symbols of the tail and check ``period`` is its least period."""
    if not isinstance(x, Lasso):
        return False
    tail = bd.unroll(bd.shift(x, len(x.stem)), 3 * period)
    if any(tail[i] != tail[i + period] for i in range(2 * period)):
        return False
    return all(any(tail[i] != tail[i + k] for i in range(2 * period)) for k in range(1, period))


# -- path counts ---------------------------------------------------------


def _core_in_finite(g: GraphPresentation, u: str) -> bool:
    return not any(a.is_omega for a in g.in_arcs[u]) and not any(
        p.kind in ("instar", "backray") for p in g.anchored[u]
    )


@lru_cache(maxsize=8192)
def incoming_path_count(g: GraphPresentation, v: str):
    """Number of finite paths (length 0 included) ending at ``v``; ``OMEGA`` if infinite."""
    p, i = g.resolve(v)
    if p is not None:
        if p.kind == "instar":
            return 1
        if p.kind == "backray":
            return OMEGA
        steps = 1 if p.kind == "outstar" else i
        return steps + incoming_path_count(g, p.anchor)
    reach = core_coreachable(g, v)
    if reach & cycle_vertices(g) or not all(_core_in_finite(g, u) for u in reach):
        return OMEGA
    memo = {}

    def count(u):
        if u not in memo:
            memo[u] = 1 + sum(a.mult * count(a.source) for a in g.in_arcs[u])
        return memo[u]

    return count(v)


def _without(g: GraphPresentation, edges) -> GraphPresentation:
    drop = {}
    for e in edges:
        drop[e.label] = drop.get(e.label, 0) + 1
    arcs = []
    for a in g.arcs:
        left = a.mult - drop.get(a.id, 0)
        if left > 0:
            arcs.append(Arc(a.id, a.source, a.target, left))
    return GraphPresentation(g.vertices, tuple(arcs), g.primitives)


def _count_bound(g: GraphPresentation, v: str):
    p, i = g.resolve(v)
    if p is not None:
        if p.kind == "instar":
            size, m = 1, 0
        else:
            reach = core_coreachable(g, p.anchor)
            size = len(reach) + (1 if p.kind == "outstar" else i)
            m = max([1] + [in_degree(g, u) for u in reach])
    else:
        reach = core_coreachable(g, v)
        size = len(reach)
        m = max(in_degree(g, u) for u in reach)
    return sum(int(m) ** k for k in range(size))


def path_count_into(g: GraphPresentation, w: str, mode: str = "exact"):
    """Count finite paths ending at ``w``.

    ``mode="exact"`` returns the exact count, except at a vertex of a cycle
    where windings of the cycle are counted once: the result is then the cycle
    length plus, for every cycle vertex, the number of paths reaching it
    without using the cycle's own edges.  ``mode="bound"`` returns the
    path-count bound ``sum(M**i for i in range(N + 1))`` with ``N + 1``
    coreachable vertices of maximal in-degree ``M`` (summed over the cycle
    vertices in the cycle case); it is ``OMEGA`` when the exact count is.
    """
    if mode not in ("exact", "bound"):
        raise ValueError(f"unknown mode {mode!r}")
    g.resolve(w)
    on_cycle = w in g.vertex_set and w in cycle_vertices(g)
    if not on_cycle:
        exact = incoming_path_count(g, w)
        if mode == "exact" or exact == OMEGA:
            return exact
        return _count_bound(g, w)
    cycles = cycles_through(g, w)
    if len(cycles) > 1:
        return OMEGA
    cyc = cycles[0]
    rest = _without(g, cyc.edges)
    counts = [incoming_path_count(rest, x) for x in cyc.vertices]
    if OMEGA in counts:
        return OMEGA
    if mode == "exact":
        return len(cyc) + sum(counts)
    return len(cyc) + sum(_count_bound(rest, x) for x in cyc.vertices)


def _paths_into(g: GraphPresentation, v: str, skip: Optional[Edge] = None):
    """All finite paths into ``v`` (lazy; only call when their number is finite)."""
    yield ()
    for e in g.in_edges(v):
        if e == skip:
            continue
        for p in _paths_into(g, e.source):
            yield p + (e,)


# -- orbits --------------------------------------------------------------


def _samples_members(samples, connector, x, shift_by):
    base = bd.shift(x, shift_by)
    return [bd.prepend(tuple(s) + tuple(connector), base) for s in samples]


def _check_equivalent(g, x, members, prefix_lengths, shift_by):
    for mem, plen in zip(members, prefix_lengths):
        bd.validate_point(g, mem)
        GroupoidElement(mem, plen - shift_by, x, plen, shift_by)
    if len(set(members)) != len(members):
        raise GroupoidError("certificate samples are not pairwise distinct")


@dataclass(frozen=True)
class PrependBackward:
    """Infinitely many distinct paths arrive at ``vertex`` and then follow ``connector`` into the tail of x.

    ``mode`` is ``"star"`` (infinitely many in-edges) or ``"chain"`` (an
    infinite backward chain); ``samples`` are three of the prepended paths.
    """

    vertex: str
    samples: tuple
    mode: str = "star"
    connector: tuple = ()
    shift: int = 0

    def members(self, x: BoundaryPoint) -> list:
        return _samples_members(self.samples, self.connector, x, self.shift)

    def validate(self, g: GraphPresentation, x: BoundaryPoint) -> None:
        for s in self.samples:
            if not s or s[-1].target != self.vertex:
                raise GroupoidError("sample path does not end at the vertex")
        if self.mode == "star":
            heads = [s[-1] for s in self.samples]
            if len(set(heads)) != len(heads) or in_degree(g, self.vertex) != OMEGA:
                raise GroupoidError("star certificate needs an infinite receiver")
        else:
            for short, long in zip(self.samples, self.samples[1:]):
                if long[1:] != short:
                    raise GroupoidError("chain samples are not nested")
            chain = self.samples[-1]
            if len(set(chain)) != len(chain) or not _coreach_infinite(g, self.vertex):
                raise GroupoidError("chain certificate needs an infinite backward chain")
        if self.connector and self.connector[0].source != self.vertex:
            raise GroupoidError("connector does not start at the vertex")
        members = self.members(x)
        plens = [len(s) + len(self.connector) for s in self.samples]
        _check_equivalent(g, x, members, plens, self.shift)

    def to_document(self) -> dict:
        return {
            "type": "PrependBackward",
            "mode": self.mode,
            "vertex": self.vertex,
            "samples": [bd.format_path(s) for s in self.samples],
            "connector": bd.format_path(self.connector),
            "shift": self.shift,
        }

    def describe(self) -> str:
        what = "in-edges" if self.mode == "star" else "backward chain"
        return f"prepend {what} at {self.vertex}: {', '.join(bd.format_path(s) for s in self.samples)}, ..."


@dataclass(frozen=True)
class PrependCycleExit:
    """Windings of ``cycle`` followed by ``connector`` give distinct orbit members."""

    cycle: tuple
    exit: Optional[Edge]
    connector: tuple = ()
    shift: int = 0

    def members(self, x: BoundaryPoint, count: int = 3) -> list:
        return _samples_members([self.cycle * k for k in range(count)], self.connector, x, self.shift)

    def validate(self, g: GraphPresentation, x: BoundaryPoint) -> None:
        word = self.cycle
        bd._check_path(g, word + word[:1])
        if self.exit is not None:
            pos = [i for i, e in enumerate(word) if e.source == self.exit.source]
            if not pos or any(word[i] == self.exit for i in pos) or not g.is_edge(self.exit):
                raise GroupoidError(f"{self.exit} is not an exit of the cycle")
        members = self.members(x)
        plens = [len(word) * k + len(self.connector) for k in range(len(members))]
        _check_equivalent(g, x, members, plens, self.shift)

    def to_document(self) -> dict:
        return {
            "type": "PrependCycleExit",
            "cycle": bd.format_path(self.cycle),
            "exit": None if self.exit is None else str(self.exit),
            "connector": bd.format_path(self.connector),
            "shift": self.shift,
        }

    def describe(self) -> str:
        return f"prepend windings of ({bd.format_path(self.cycle)}) before exit {self.exit}"


@dataclass(frozen=True)
class ShiftEscape:
    """Past its stem ``x`` runs along a forward ray, so its shifts are pairwise distinct."""

    vertex: str

    def members(self, x: BoundaryPoint, count: int = 3) -> list:
        skip = len(x.stem) if isinstance(x, RayTail) else 0
        return [bd.shift(x, skip + k) for k in range(count)]

    def validate(self, g: GraphPresentation, x: BoundaryPoint) -> None:
        if not isinstance(x, RayTail):
            raise GroupoidError("shift escape needs a path that ends in a forward ray")
        members = self.members(x)
        for k, mem in enumerate(members):
            bd.validate_point(g, mem)
            n = len(x.stem) + k
            GroupoidElement(mem, -n, x, 0, n)
        if len(set(members)) != len(members):
            raise GroupoidError("shifts are not pairwise distinct")

    def to_document(self) -> dict:
        return {"type": "ShiftEscape", "vertex": self.vertex}

    def describe(self) -> str:
        return f"shifts escape along pairwise distinct edges from {self.vertex}"


Certificate = Union[PrependBackward, PrependCycleExit, ShiftEscape]


class OrbitCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OrbitReport:
    point: BoundaryPoint
    finite: bool
    size: object  # int or OMEGA
    members: Optional[tuple] = None
    certificate: Optional[Certificate] = None
    capped: bool = False

    def to_document(self) -> dict:
        return {
            "point": bd.format_point(self.point),
            "finite": self.finite,
            "size": self.size if self.finite else "omega",
            "members": None if self.members is None else [bd.format_point(m) for m in self.members],
            "capped": self.capped,
            "certificate": None if self.certificate is None else self.certificate.to_document(),
        }


def orbit_key(x: BoundaryPoint):
    """Hashable key shared exactly by the points of one orbit."""
    if isinstance(x, FinitePath):
        return ("path", x.terminal)
    if isinstance(x, Lasso):
        return ("lasso", x.cycle)
    return ("ray", x.tag, x.anchor)


def _lasso_entries(x: Lasso):
    d = len(x.cycle)
    return [(x.cycle[i].source, x.cycle[i - 1], len(x.stem) + (i - x.phase) % d) for i in range(d)]


def _orbit_size(g: GraphPresentation, x: BoundaryPoint):
    if isinstance(x, FinitePath):
        return incoming_path_count(g, x.terminal)
    if isinstance(x, RayTail):
        return OMEGA
    total = 0
    for v, skip, _ in _lasso_entries(x):
        if in_degree(g, v) == OMEGA:
            return OMEGA
        total += 1 + sum(incoming_path_count(g, e.source) for e in g.in_edges(v) if e != skip)
    return total


def _orbit_members(g, x):
    if isinstance(x, FinitePath):
        return [FinitePath(p, x.terminal) for p in _paths_into(g, x.terminal)]
    out = []
    d = len(x.cycle)
    for i in range(d):
        v, skip = x.cycle[i].source, x.cycle[i - 1]
        out += [Lasso(p, x.cycle, i) for p in _paths_into(g, v, skip=skip)]
    return out


@lru_cache(maxsize=8192)
def _coreach_infinite(g: GraphPresentation, v: str) -> bool:
    """Whether infinitely many vertices have a path into ``v``."""
    p, _ = g.resolve(v)
    if p is not None:
        return p.kind == "backray" or (p.kind != "instar" and _coreach_infinite(g, p.anchor))
    reach = core_coreachable(g, v)
    return any(q.kind in ("instar", "backray") for u in reach for q in g.anchored[u]) or any(
        a.is_omega for u in reach for a in g.in_arcs[u]
    )


def _cause_at(g, z, dist, skip):
    """A reason why infinitely many paths arrive at ``z``, or None."""
    p, i = g.resolve(z)
    if p is not None:
        if p.kind == "backray":
            return "chain", [tuple(g.edge(p.tag, j) for j in range(i - k, i)) for k in (1, 2, 3)]
        return None
    for q in g.anchored[z]:
        if q.kind == "instar":
            return "star", [(g.edge(q.tag, j),) for j in (1, 2, 3)]
    for a in g.in_arcs[z]:
        if a.is_omega:
            copies = [g.edge(a.id, j) for j in range(4)]
            return "star", [(e,) for e in copies if e != skip][:3]
    for q in g.anchored[z]:
        if q.kind == "backray":
            return "chain", [tuple(g.edge(q.tag, j) for j in range(-k, 0)) for k in (1, 2, 3)]
    if z in cycle_vertices(g) and (dist > 0 or skip is None):
        return "cycle", None
    return None


def _cycle_certificate(g, z, connector, x, shift_by):
    word = cycles_through(g, z)[0].rotated(z)
    tail = bd.shift(x, shift_by)
    seq = list(connector) + bd.unroll(tail, 2 * len(word) + 2)
    exit_edge = None
    for j, e in enumerate(seq):
        if e != word[j % len(word)]:
            exit_edge = e
            break
    else:
        if isinstance(tail, FinitePath):
            own = word[len(seq) % len(word)]
            exit_edge = next(e for e in g.out_edges(own.source, bound=2) if e != own)
    return PrependCycleExit(word, exit_edge, tuple(connector), shift_by)


def _infinite_certificate(g: GraphPresentation, x: BoundaryPoint) -> Certificate:
    if isinstance(x, RayTail):
        return ShiftEscape(bd.source(x))
    if isinstance(x, FinitePath):
        entries = [(x.terminal, None, len(x.edges))]
    else:
        entries = _lasso_entries(x)
    queue = deque((v, skip, j, (), 0) for v, skip, j in entries)
    seen = set()
    while queue:
        z, skip, j, connector, dist = queue.popleft()
        cause = _cause_at(g, z, dist, skip if dist == 0 else None)
        if cause is not None:
            kind, samples = cause
            if kind == "cycle":
                return _cycle_certificate(g, z, connector, x, j)
            return PrependBackward(z, tuple(samples), kind, tuple(connector), j)
        if (z, dist == 0) in seen:
            continue
        seen.add((z, dist == 0))
        for e in g.in_edges(z):
            if dist == 0 and e == skip:
                continue
            queue.append((e.source, skip, j, (e,) + connector, dist + 1))
    raise AssertionError(f"no reason found for an infinite orbit of {bd.format_point(x)}")


@lru_cache(maxsize=4096)
def _orbit_by_key(g, key, x, cap):
    size = _orbit_size(g, x)
    if size == OMEGA:
        return OrbitReport(x, False, OMEGA, certificate=_infinite_certificate(g, x))
    if size > cap:
        return OrbitReport(x, True, size, capped=True)
    members = tuple(sorted(_orbit_members(g, x), key=bd.format_point))
    return OrbitReport(x, True, size, members)


def orbit(g: GraphPresentation, x: BoundaryPoint, cap: int = 64) -> OrbitReport:
    """Orbit of ``x``: its exact size, members when at most ``cap``, or a certificate.

    A finite orbit larger than ``cap`` is reported with ``capped=True`` and no
    member list.
    """
    bd.validate_point(g, x)
    rep = _orbit_by_key(g, orbit_key(x), _orbit_representative(x), cap)
    if rep.finite:
        return OrbitReport(x, True, rep.size, rep.members, None, rep.capped)
    return OrbitReport(x, False, OMEGA, certificate=_infinite_certificate(g, x))


def _orbit_representative(x):
    if isinstance(x, FinitePath):
        return FinitePath((), x.terminal)
    if isinstance(x, Lasso):
        return Lasso((), x.cycle, 0)
    return x


# -- König construction ---------------------------------------------------


class KonigPreconditionError(ValueError):
    """The backward-chain construction does not apply; ``reason`` names why."""

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason.replace('_', ' ')} found" + (f": {detail}" if detail else ""))


def _coreach_core(g, w0):
    p, _ = g.resolve(w0)
    if p is None:
        return core_coreachable(g, w0)
    if p.kind in ("outstar", "fwdray"):
        return core_coreachable(g, p.anchor)
    return set()


def konig_backward_chain(g: GraphPresentation, w0: str, length: int) -> list:
    """A backward path of ``length`` distinct edges ending at ``w0``.

    Starting from ``w0``, each step takes the first in-edge whose source
    still has infinitely many vertices behind it.  The choice is
    deterministic, so a longer request extends a shorter one at the front.

    Raises
    ------
    KonigPreconditionError
        With ``reason`` ``"cycle"``, ``"infinite_receiver"`` or
        ``"finitely_many_vertices"`` when the vertices with a path into
        ``w0`` do not satisfy the hypotheses.
    """
    reach = _coreach_core(g, w0)
    on_cycle = sorted(reach & cycle_vertices(g))
    if on_cycle:
        raise KonigPreconditionError("cycle", f"through {on_cycle[0]}")
    receivers = sorted(u for u in reach if in_degree(g, u) == OMEGA)
    if receivers:
        raise KonigPreconditionError("infinite_receiver", receivers[0])
    if not _coreach_infinite(g, w0):
        raise KonigPreconditionError("finitely_many_vertices")
    chain = []
    current = w0
    for _ in range(length):
        e = next(e for e in g.in_edges(current) if _coreach_infinite(g, e.source))
        chain.append(e)
        current = e.source
    return chain[::-1]


# -- density of periodic points -------------------------------------------


@dataclass(frozen=True)
class DensityParams:
    stem_bound: int = 4
    exclusion_bound: int = 3
    orbit_cap: int = 64
    expand_bound: Optional[int] = None

    @property
    def width(self) -> int:
        """How many members of each infinite edge family are enumerated."""
        return self.expand_bound if self.expand_bound is not None else self.exclusion_bound + 1

    def to_document(self) -> dict:
        return {
            "stem_bound": self.stem_bound,
            "exclusion_bound": self.exclusion_bound,
            "orbit_cap": self.orbit_cap,
            "expand_bound": self.width,
        }


@dataclass(frozen=True)
class DensityWitness:
    cylinder: CylinderSet
    point: BoundaryPoint
    orbit_size: int
    isotropy: IsotropyGroup

    def to_document(self) -> dict:
        return {
            "cylinder": str(self.cylinder),
            "point": bd.format_point(self.point),
            "orbit_size": self.orbit_size,
            "isotropy": _isotropy_doc(self.isotropy),
        }


def _isotropy_doc(grp):
    if isinstance(grp, Trivial):
        return {"type": "Trivial"}
    return {"type": "InfiniteCyclic", "period": grp.period}


@dataclass(frozen=True)
class NotDense:
    """An open set without periodic points and the reason none can exist."""

    cylinder: CylinderSet
    reason: str  # receiver | cycle_exit | backward_chain | stranded
    certificate: Certificate

    def to_document(self) -> dict:
        return {"cylinder": str(self.cylinder), "reason": self.reason, "certificate": self.certificate.to_document()}


@dataclass(frozen=True)
class DensityReport:
    params: DensityParams
    dense: bool
    witnesses: tuple = ()
    not_dense: Optional[NotDense] = None
    first_failure: Optional[CylinderSet] = None
    cylinders_checked: int = 0

    @property
    def outcome(self) -> str:
        return "Dense" if self.dense else "NotDense"

    def to_document(self) -> dict:
        return {
            "outcome": self.outcome,
            "parameters": self.params.to_document(),
            "cylinders_checked": self.cylinders_checked,
            "witnesses": [w.to_document() for w in self.witnesses],
            "not_dense": None if self.not_dense is None else self.not_dense.to_document(),
            "first_failure": None if self.first_failure is None else str(self.first_failure),
        }


def not_dense_from_witness(g: GraphPresentation, witness) -> NotDense:
    """Turn a failing-condition witness into a cylinder with no periodic point."""
    if isinstance(witness, InfiniteReceiver):
        v = witness.vertex
        cert = PrependBackward(v, tuple((e,) for e in witness.samples), "star")
        return NotDense(CylinderSet(v), "receiver", cert)
    if isinstance(witness, CycleWithExit):
        f = witness.exit
        cert = PrependCycleExit(witness.cycle.rotated(f.source), f)
        return NotDense(CylinderSet(f.source, (f,)), "cycle_exit", cert)
    if isinstance(witness, BackwardChainGen):
        chain = witness.chain(g, 4)
        mu0 = chain[-1]
        samples = tuple(tuple(chain[3 - k:3]) for k in (1, 2, 3))
        cert = PrependBackward(mu0.source, samples, "chain")
        return NotDense(CylinderSet(mu0.source, (mu0,)), "backward_chain", cert)
    if isinstance(witness, StrandedVertex):
        return NotDense(CylinderSet(witness.vertex), "stranded", ShiftEscape(witness.vertex))
    raise TypeError(f"not a condition witness: {witness!r}")


def validate_not_dense(g: GraphPresentation, nd: NotDense, depth: int = 2, bound: int = 3) -> int:
    """Re-check a non-density certificate on enumerated points of its cylinder.

    Every enumerated point of the cylinder must have an infinite orbit and the
    certificate must produce distinct, shift-equivalent orbit members for it.
    Returns the number of points checked.
    """
    z = nd.cylinder
    z.validate(g)
    if not bd.cylinder_nonempty(g, z).nonempty:
        raise GroupoidError("certificate cylinder is empty")
    if nd.reason == "stranded" and forward_summary(g, z.start)[2]:
        raise GroupoidError(f"{z.start} reaches a terminal")
    points = [x for x in bd.enumerate_points(g, z.start, depth + len(z.base), bound)
              if bd.membership(x, z)]
    if not points:
        raise GroupoidError("no enumerated point in the certificate cylinder")
    for x in points:
        if orbit(g, x).finite:
            raise GroupoidError(f"{bd.format_point(x)} is periodic")
        nd.certificate.validate(g, x)
    return len(points)


def _start_vertices(g: GraphPresentation, width: int) -> list:
    out = list(g.vertices)
    for p in sorted(g.primitives, key=lambda p: p.tag):
        idx = range(-1, -width - 1, -1) if p.kind == "backray" else range(1, width + 1)
        out += [g.derived(p.tag, i) for i in idx]
    return out


def _cylinders(g: GraphPresentation, params: DensityParams):
    width = params.width
    level = [((), v) for v in _start_vertices(g, width)]
    for _ in range(params.stem_bound + 1):
        for base, start in level:
            end = base[-1].target if base else start
            outs = list(g.out_edges(end, bound=width)) if out_degree(g, end) else []
            for size in range(min(params.exclusion_bound, len(outs)) + 1):
                for excluded in itertools.combinations(outs, size):
                    yield CylinderSet(start, base, frozenset(excluded))
        level = [(base + (e,), start) for base, start in level
                 for e in (g.out_edges(base[-1].target if base else start, bound=width)
                           if out_degree(g, base[-1].target if base else start) else ())]


def periodic_density_check(g: GraphPresentation, stem_bound: int = 4, exclusion_bound: int = 3,
                           orbit_cap: int = 64, expand_bound: Optional[int] = None) -> DensityReport:
    """Search every basic open set ``Z(mu \\ F)`` with ``|mu| <= stem_bound`` and
    ``|F| <= exclusion_bound`` for a periodic point.

    Candidates extend ``mu`` by an edge outside ``F`` and then along a shortest
    path to a sink, a cycle (wound forever) or an infinite emitter.  The
    outcome is ``Dense`` when every non-empty set gets a candidate with a
    finite orbit.  Otherwise the search stops at the first failing set and
    the report carries a certificate derived from the failing graph
    condition.
    """
    params = DensityParams(stem_bound, exclusion_bound, orbit_cap, expand_bound)
    finite = {}
    witnesses = []
    checked = 0
    failure = None
    for z in _cylinders(g, params):
        checked += 1
        end_deg = out_degree(g, z.end)
        if 0 < end_deg < OMEGA and len(z.excluded) == end_deg:
            continue
        found = None
        for y in bd.candidate_members(g, z, bound=params.width, cycles_per_vertex=2):
            key = orbit_key(y)
            if key not in finite:
                finite[key] = _orbit_size(g, y)
            if finite[key] != OMEGA:
                found = DensityWitness(z, y, finite[key], isotropy(y))
                break
        if found is None:
            failure = z
            break
        witnesses.append(found)
    if failure is None:
        return DensityReport(params, True, tuple(witnesses), cylinders_checked=checked)
    report = decide_rfd(g)
    failing = [r.witness for r in report.results().values() if not r.holds]
    nd = not_dense_from_witness(g, failing[0]) if failing else None
    return DensityReport(params, False, (), nd, failure, checked)
