from rfdgraph import boundary as bd
from rfdgraph.fixtures import FIXTURES
from rfdgraph.oracle import (
    RandomSpec,
    backward_chain_plateau,
    brute_backward_chain,
    enumerate_paths,
    expand,
    longest_backward_chain,
    random_corpus,
    random_presentation,
)
from rfdgraph.presentation import Edge, parse, serialize


def test_expand_omega_loop():
    t = expand(parse("vertex v\nedge e: v -> v [mult=omega]\n"), 3)
    assert [str(e) for e in t.edges] == ["e", "e#1", "e#2"]


def test_expand_backray():
    t = expand(FIXTURES["FIX_C"], 2)
    ray = [e for e in t.edges if e.label == "r"]
    assert ray == [Edge("r", -1, "r[-1]", "v"), Edge("r", -2, "r[-2]", "r[-1]")]


def test_expand_sink():
    for b in (1, 5):
        t = expand(FIXTURES["FIX_SINK"], b)
        assert t.vertices == ["v"] and t.edges == []


def test_expansion_is_monotone(small_corpus):
    for _, g in small_corpus:
        a, b = expand(g, 3), expand(g, 4)
        assert set(a.vertices) <= set(b.vertices)
        assert set(a.edges) <= set(b.edges)


def test_enumerate_paths_examples():
    chain = parse("vertex u\nvertex v\nedge e: u -> v\n")
    assert [bd.format_path(p) for p in enumerate_paths(expand(chain, 3), "v", 5)] == ["", "e"]
    loop = enumerate_paths(expand(FIXTURES["FIX_LOOP"], 3), "v", 3)
    assert [bd.format_path(p) for p in loop] == ["", "e", "e.e", "e.e.e"]
    assert enumerate_paths(expand(FIXTURES["FIX_SINK"], 3), "v", 4) == [()]


def test_brute_backward_chain_examples():
    found = brute_backward_chain(expand(FIXTURES["FIX_C"], 8), 8)
    assert found is not None and len(found) == 8 and len(set(found)) == 8
    assert all(e.label == "r" for e in found)
    assert brute_backward_chain(expand(FIXTURES["FIX_O2"], 8), 3) is None
    assert brute_backward_chain(expand(FIXTURES["FIX_SINK"], 8), 1) is None


def test_plateau_rule():
    assert backward_chain_plateau(FIXTURES["FIX_C"]) is True
    assert backward_chain_plateau(FIXTURES["FIX_D"]) is False
    assert backward_chain_plateau(FIXTURES["FIX_O2"]) is False
    assert longest_backward_chain(expand(FIXTURES["FIX_O2"], 8), 8) == 2


def test_random_presentation_small_cases():
    g = random_presentation(RandomSpec(seed=0, max_core_vertices=1, arc_density=0.0))
    assert serialize(g) == "vertex v0\n"
    spec = RandomSpec(seed=42, max_core_vertices=4, backrays=1, omega_prob=0.3)
    assert serialize(random_presentation(spec)) == serialize(random_presentation(spec))
    assert parse(serialize(random_presentation(spec))) == random_presentation(spec)


def test_corpus_is_reproducible_and_within_bounds():
    a, b = random_corpus(50, 7), random_corpus(50, 7)
    assert [serialize(g) for _, g in a] == [serialize(g) for _, g in b]
    for _, g in a:
        assert 1 <= len(g.vertices) <= 6 and len(g.primitives) <= 2
