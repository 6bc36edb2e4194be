"""Shared builders for groupoid-law checks."""

import random

from rfdgraph import boundary as bd
from rfdgraph.groupoid import GroupoidElement
from rfdgraph.presentation import in_degree


def backward_path(g, v, rng, max_len=3):
    path = ()
    for _ in range(rng.randint(0, max_len)):
        ins = list(g.in_edges(v, bound=2)) if in_degree(g, v) else []
        if not ins:
            break
        e = rng.choice(ins)
        path = (e,) + path
        v = e.source
    return path


def family(g, x0, rng, size=4):
    """Points ``q_i . shift(x0, m_i)``, all in the orbit of ``x0``, with their (|q_i|, m_i)."""
    out = []
    top = 3 if bd.length(x0) == float("inf") else min(3, bd.length(x0))
    for _ in range(size):
        m = rng.randint(0, top)
        tail = bd.shift(x0, m)
        q = backward_path(g, bd.source(tail), rng)
        out.append((bd.prepend(q, tail), len(q), m))
    return out


def element(a, b):
    """Groupoid element from family entry ``a`` to family entry ``b``."""
    (x, qx, mx), (y, qy, my) = a, b
    top = max(mx, my)
    return GroupoidElement(x, (qx - mx) - (qy - my), y, qx + top - mx, qy + top - my)


def rng_for(seed):
    return random.Random(seed)
