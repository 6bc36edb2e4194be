"""Named fixture presentations.

``FIX_A`` .. ``FIX_D`` encode the four counterexample graphs showing that
the four RFD conditions are independent; each fails exactly one condition.
Infinite families of edges are written as primitives.
"""

from .presentation import parse

SOURCES = {
    "FIX_SINK": """\
vertex v
""",
    "FIX_LOOP": """\
vertex v
edge e: v -> v
""",
    "FIX_O2": """\
vertex v
edge e: v -> v [mult=2]
""",
    # infinite receiver at v, infinite emitter at v5
    "FIX_A": """\
vertex v
vertex v1
vertex v2
vertex v3
vertex v4
vertex v5
vertex v6
vertex v7
edge a1: v1 -> v
edge a2: v2 -> v
edge a3: v3 -> v
edge b: v -> v4
edge c: v4 -> v6
edge d: v4 -> v5
edge g: v5 -> v7
instar i1: v
instar i2: v
outstar o: v5
""",
    # 4-cycle v v1 v2 v3 with exit b: v -> v4, loop at v6
    "FIX_B": """\
vertex v
vertex v1
vertex v2
vertex v3
vertex v4
vertex v5
vertex v6
vertex v7
vertex v8
edge a: v -> v1
edge a1: v1 -> v2
edge a2: v2 -> v3
edge a3: v3 -> v
edge b: v -> v4
edge c: v4 -> v6
edge c1: v6 -> v6
edge d: v4 -> v5
edge g: v5 -> v7
edge h: v5 -> v8
""",
    # backward ray into v, infinite emitters v4 and v5
    "FIX_C": """\
vertex v
vertex v4
vertex v5
vertex v6
vertex v7
edge b: v -> v4
edge c: v4 -> v6
edge d: v4 -> v5
edge g: v5 -> v7
backray r: v
outstar o1: v4
outstar o2: v5
""",
    # forward ray: nothing past v2 reaches a sink, cycle or emitter
    "FIX_D": """\
vertex v
vertex v1
vertex v2
edge a: v -> v1
edge b: v1 -> v2
fwdray r: v2
""",
    # backward ray plus a finite side branch into u
    "FIX_BRANCH": """\
vertex u
vertex w1
vertex w2
edge e: w1 -> u
edge f: w2 -> w1
backray r: u
""",
    # infinite receiver on an acyclic backward-ray graph
    "FIX_INSTAR": """\
vertex u
vertex w
edge e: u -> w
backray r: u
instar s: u
""",
}

FIXTURES = {name: parse(text) for name, text in SOURCES.items()}

INDEPENDENCE_FIXTURES = ("FIX_A", "FIX_B", "FIX_C", "FIX_D")


def get(name: str):
    return FIXTURES[name]
