import pytest
from hypothesis import given

from rfdgraph.conditions import (
    BackwardChainGen,
    CycleWithExit,
    InfiniteReceiver,
    StrandedVertex,
    WitnessError,
    check_no_cycle_with_exit,
    cycle_vertices,
    decide_rfd,
    enumerate_cycles,
)
from rfdgraph.fixtures import FIXTURES
from rfdgraph.oracle import expand, oracle_vector
from rfdgraph.presentation import parse

from strategies import presentations

T, F = True, False


@pytest.mark.parametrize("name, vector", [
    ("FIX_A", (F, T, T, T)),
    ("FIX_B", (T, F, T, T)),
    ("FIX_C", (T, T, F, T)),
    ("FIX_D", (T, T, T, F)),
    ("FIX_SINK", (T, T, T, T)),
    ("FIX_LOOP", (T, T, T, T)),
    ("FIX_O2", (T, F, T, T)),
    ("FIX_BRANCH", (T, T, F, T)),
    ("FIX_INSTAR", (F, T, F, T)),
])
def test_fixture_vectors(name, vector):
    report = decide_rfd(FIXTURES[name])
    assert report.vector == vector
    assert report.rfd == all(vector)
    for w in report.witnesses():
        w.validate(FIXTURES[name])


def test_fixture_witness_shapes():
    a = decide_rfd(FIXTURES["FIX_A"]).a.witness
    assert isinstance(a, InfiniteReceiver) and a.vertex == "v"
    b = decide_rfd(FIXTURES["FIX_B"]).b.witness
    assert isinstance(b, CycleWithExit)
    assert str(b.exit) == "b" and [str(e) for e in b.cycle.edges] == ["a", "a1", "a2", "a3"]
    c = decide_rfd(FIXTURES["FIX_C"]).c.witness
    assert c == BackwardChainGen(backray="r")
    d = decide_rfd(FIXTURES["FIX_D"]).d.witness
    assert isinstance(d, StrandedVertex) and d.vertex == "r[1]"


def test_parallel_loop_copy_is_an_exit():
    w = decide_rfd(FIXTURES["FIX_O2"]).b.witness
    assert str(w.exit) == "e#1"


def test_omega_cycle_is_a_backward_chain():
    g = parse("vertex u\nvertex v\nedge a: u -> v [mult=omega]\nedge b: v -> u [mult=omega]\n")
    w = decide_rfd(g).c.witness
    assert w.cycle is not None
    chain = w.chain(g, 5)
    assert len(set(chain)) == 5
    assert all(e.target == f.source for e, f in zip(chain, chain[1:]))


def test_components_are_checked_separately():
    g = parse("vertex a\nvertex b\nedge e: a -> a\nedge f: b -> b\nedge h: b -> b\n")
    report = decide_rfd(g)
    assert [c.rfd for c in report.components] == [True, False]
    assert not report.rfd


def test_stale_witness_is_rejected():
    g = FIXTURES["FIX_LOOP"]
    with pytest.raises(WitnessError):
        InfiniteReceiver("v", ()).validate(g)
    with pytest.raises(WitnessError):
        StrandedVertex("v").validate(g)


def test_cycle_enumeration_matches_brute_force():
    g = parse("vertex a\nvertex b\nvertex c\nedge x: a -> b\nedge y: b -> a\n"
              "edge z: b -> c\nedge w: c -> a\nedge l: c -> c\n")
    cycles = enumerate_cycles(g)
    assert sorted(c.vertices for c in cycles) == [("a", "b"), ("a", "b", "c"), ("c",)]
    assert cycle_vertices(g) == {"a", "b", "c"}
    assert not check_no_cycle_with_exit(g).holds


@given(presentations(max_vertices=5))
def test_deciders_agree_with_brute_force(g):
    expected = oracle_vector(g)
    assert expected[2] is not None, "plateau rule inconclusive"
    assert decide_rfd(g).vector == expected


@given(presentations())
def test_witnesses_validate(g):
    for w in decide_rfd(g).witnesses():
        w.validate(g)


def test_cycle_vertices_match_truncation(small_corpus):
    for _, g in small_corpus:
        t = expand(g, 2)
        on_cycle = set()
        for v in g.vertices:
            seen, stack = set(), [e.target for e in t.out_map[v]]
            while stack:
                u = stack.pop()
                if u == v:
                    on_cycle.add(v)
                    break
                if u not in seen:
                    seen.add(u)
                    stack += [e.target for e in t.out_map[u]]
        assert cycle_vertices(g) == on_cycle
