import pytest
from hypothesis import given, strategies as st

from rfdgraph import boundary as bd
from rfdgraph.boundary import FinitePath, Lasso
from rfdgraph.conditions import decide_rfd
from rfdgraph.fixtures import FIXTURES
from rfdgraph.groupoid import (
    GroupoidElement,
    GroupoidError,
    InfiniteCyclic,
    KonigPreconditionError,
    PrependBackward,
    PrependCycleExit,
    ShiftEscape,
    Trivial,
    compose,
    incoming_path_count,
    invert,
    isotropy,
    konig_backward_chain,
    orbit,
    path_count_into,
    periodic_density_check,
    unit,
    validate_not_dense,
    verify_minimal_period,
)
from rfdgraph.oracle import enumerate_paths, expand
from rfdgraph.presentation import OMEGA, parse

from helpers import element, family, rng_for
from strategies import presentations

LOOP = FIXTURES["FIX_LOOP"]
CHAIN = parse("vertex u\nvertex v\nedge e: u -> v\n")
EXIT = parse("vertex v\nvertex u\nedge e: v -> v\nedge f: v -> u\n")
TWO = parse("vertex p\nvertex q\nedge e1: p -> q\nedge e2: q -> p\n")
FAN = parse("vertex x\nvertex u\nvertex w\nedge p: x -> u [mult=2]\nedge q: u -> w [mult=2]\n")


def pt(g, text):
    return bd.parse_point(g, text)


# -- elements ------------------------------------------------------------


def test_unit_law_on_loop():
    x = pt(LOOP, "e^inf")
    assert compose(unit(x), unit(x)) == unit(x)


def test_winding_composition_on_loop():
    x = pt(LOOP, "e^inf")
    a = GroupoidElement(x, 1, x, 1, 0)
    c = compose(a, a)
    assert c == GroupoidElement(x, 2, x, 2, 0)
    assert (c.m, c.n) == (2, 0)


def test_inverse():
    g = FIXTURES["FIX_B"]
    x, y = pt(g, "a3.b.d.g"), pt(g, "b.d.g")
    a = GroupoidElement(x, 1, y, 1, 0)
    assert invert(a) == GroupoidElement(y, -1, x, 0, 1)
    assert compose(a, invert(a)).is_unit


def test_bad_evidence_and_non_composable():
    g = FIXTURES["FIX_B"]
    x, y = pt(g, "a3.b.d.g"), pt(g, "b.d.g")
    with pytest.raises(GroupoidError):
        GroupoidElement(x, 0, y, 0, 0)
    with pytest.raises(GroupoidError):
        GroupoidElement(x, 2, y, 2, 0)
    with pytest.raises(GroupoidError):
        compose(GroupoidElement(x, 1, y, 1, 0), GroupoidElement(x, 0, x))


@given(presentations(max_vertices=4), st.integers(0, 10**6))
def test_groupoid_laws(g, seed):
    rng = rng_for(seed)
    v = rng.choice(g.vertices)
    points = bd.enumerate_points(g, v, 2)
    if not points:
        return
    fam = family(g, rng.choice(points), rng, 4)
    a, b, c = element(fam[0], fam[1]), element(fam[1], fam[2]), element(fam[2], fam[3])
    assert compose(compose(a, b), c) == compose(a, compose(b, c))
    assert compose(a, invert(a)) == unit(a.x)
    assert compose(invert(a), a) == unit(a.y)
    assert compose(unit(a.x), a) == a == compose(a, unit(a.y))
    assert invert(invert(a)) == a


# -- isotropy ------------------------------------------------------------


def test_isotropy_examples():
    assert isotropy(pt(LOOP, "e^inf")) == InfiniteCyclic(1)
    assert isotropy(pt(FIXTURES["FIX_SINK"], "v")) == Trivial()
    assert isotropy(pt(TWO, "(e1.e2)^inf")) == InfiniteCyclic(2)
    assert isotropy(pt(FIXTURES["FIX_D"], "a.b.r^ray")) == Trivial()
    assert verify_minimal_period(pt(TWO, "(e1.e2)^inf"), 2)
    assert not verify_minimal_period(pt(TWO, "(e1.e2)^inf"), 4)
    assert not verify_minimal_period(pt(TWO, "(e1.e2)^inf"), 1)


def test_isotropy_generator_fixes_point():
    x = pt(TWO, "e2.(e1.e2)^inf")
    n = len(x.stem)
    gen = GroupoidElement(x, 2, x, n + 2, n)
    assert compose(gen, invert(gen)) == unit(x)


# -- path counts ---------------------------------------------------------


def test_path_count_examples():
    assert path_count_into(CHAIN, "v") == 2
    assert path_count_into(FAN, "w") == 7
    assert path_count_into(FAN, "w", "bound") == 7
    assert path_count_into(LOOP, "v") == 2
    assert path_count_into(FIXTURES["FIX_C"], "v") == OMEGA
    assert path_count_into(FIXTURES["FIX_A"], "v4") == OMEGA
    assert path_count_into(FIXTURES["FIX_O2"], "v") == OMEGA
    assert path_count_into(FIXTURES["FIX_A"], "o[3]") == 1 + path_count_into(FIXTURES["FIX_A"], "v5")
    assert path_count_into(FIXTURES["FIX_D"], "r[2]") == 5


def test_cycle_case_counts_external_paths():
    g = parse("vertex s\nvertex a\nvertex b\nedge x: s -> a\nedge y: a -> b\nedge z: b -> a\n")
    # cycle length 2, plus paths into a avoiding the cycle (a, x) and into b (b)
    assert path_count_into(g, "a") == 2 + 2 + 1


def test_path_count_agrees_with_enumeration(corpus):
    checked = 0
    for _, g in corpus[:200]:
        for v in g.vertices:
            n = incoming_path_count(g, v)
            t = expand(g, 4)
            if n == OMEGA:
                assert len(enumerate_paths(expand(g, 5), v, 5)) > len(enumerate_paths(t, v, 4))
            else:
                assert len(enumerate_paths(t, v, n + 1)) == n
                assert path_count_into(g, v) <= path_count_into(g, v, "bound")
                checked += 1
    assert checked > 100


# -- orbits --------------------------------------------------------------


def test_orbit_of_loop_point():
    rep = orbit(LOOP, pt(LOOP, "e^inf"))
    assert rep.finite and rep.size == 1 and rep.members == (pt(LOOP, "e^inf"),)


def test_orbit_through_cycle_exit():
    x = pt(EXIT, "f")
    rep = orbit(EXIT, x)
    assert not rep.finite
    cert = rep.certificate
    assert isinstance(cert, PrependCycleExit)
    assert [str(e) for e in cert.cycle] == ["e"] and str(cert.exit) == "f"
    cert.validate(EXIT, x)


def test_orbit_in_receiver_cylinder():
    g = FIXTURES["FIX_A"]
    for x in bd.enumerate_points(g, "v", 3):
        rep = orbit(g, x)
        assert not rep.finite and isinstance(rep.certificate, PrependBackward)
        assert rep.certificate.mode == "star" and rep.certificate.vertex == "v"
        rep.certificate.validate(g, x)


def test_orbit_of_ray_tail():
    g = FIXTURES["FIX_D"]
    x = pt(g, "a.b.r^ray")
    rep = orbit(g, x)
    assert not rep.finite and rep.certificate == ShiftEscape("v")
    rep.certificate.validate(g, x)


def test_finite_orbit_members():
    rep = orbit(CHAIN, pt(CHAIN, "e"))
    assert rep.finite and rep.size == 2
    assert [bd.format_point(m) for m in rep.members] == ["e", "v"]
    rep = orbit(FAN, pt(FAN, "p#1.q"))
    assert rep.size == 7 and len(set(rep.members)) == 7
    # the cycle a.a1.a2.a3 exits into v4, so paths into v7 keep growing
    g = FIXTURES["FIX_B"]
    assert not orbit(g, pt(g, "d.g")).finite
    rep = orbit(g, pt(g, "c1^inf"))
    assert not rep.finite
    rep.certificate.validate(g, pt(g, "c1^inf"))


def test_orbit_cap_is_reported():
    rep = orbit(FAN, pt(FAN, "w"), cap=3)
    assert rep.finite and rep.capped and rep.members is None and rep.size == 7


def test_orbits_against_enumerated_equivalence(small_corpus):
    # members of finite orbits are exactly the enumerated points sharing a tail
    for _, g in small_corpus[:80]:
        pool = sorted({x for v in g.vertices for x in bd.enumerate_points(g, v, 3)}, key=bd.format_point)
        for x in pool[:12]:
            rep = orbit(g, x, cap=500)
            if not rep.finite:
                rep.certificate.validate(g, x)
                continue
            if rep.capped:
                continue
            members = set(rep.members)
            assert len(members) == rep.size
            for y in pool:
                same = any(bd.length(x) >= m and bd.length(y) >= n and bd.shift(x, m) == bd.shift(y, n)
                           for m in range(6) for n in range(6))
                if same:
                    assert y in members
            for y in rep.members:
                assert isotropy(y) == isotropy(x)


# -- König construction --------------------------------------------------


def test_konig_on_backward_ray():
    chain = konig_backward_chain(FIXTURES["FIX_C"], "v", 5)
    assert [str(e) for e in chain] == ["r#-5", "r#-4", "r#-3", "r#-2", "r#-1"]


def test_konig_picks_the_infinite_branch():
    chain = konig_backward_chain(FIXTURES["FIX_BRANCH"], "u", 3)
    assert [str(e) for e in chain] == ["r#-3", "r#-2", "r#-1"]


@pytest.mark.parametrize("name, w0, reason", [
    ("FIX_LOOP", "v", "cycle"),
    ("FIX_INSTAR", "w", "infinite_receiver"),
    ("FIX_SINK", "v", "finitely_many_vertices"),
])
def test_konig_preconditions(name, w0, reason):
    with pytest.raises(KonigPreconditionError) as info:
        konig_backward_chain(FIXTURES[name], w0, 3)
    assert info.value.reason == reason


def test_konig_is_prefix_stable():
    g = parse("vertex a\nvertex b\nvertex c\nedge x: a -> c\nedge y: b -> c\nbackray r: b\n")
    chains = [konig_backward_chain(g, "c", n) for n in range(1, 12)]
    for short, long in zip(chains, chains[1:]):
        assert long[1:] == short


# -- density -------------------------------------------------------------


def test_density_on_loop():
    rep = periodic_density_check(LOOP, stem_bound=2)
    assert rep.dense
    assert {bd.format_point(w.point) for w in rep.witnesses} == {"e^inf"}


def test_density_certificates_on_fixtures():
    expected = {"FIX_A": ("receiver", "Z(v)"), "FIX_B": ("cycle_exit", "Z(b)"),
                "FIX_C": ("backward_chain", "Z(r#-1)"), "FIX_D": ("stranded", "Z(r[1])")}
    for name, (reason, cyl) in expected.items():
        g = FIXTURES[name]
        rep = periodic_density_check(g)
        assert not rep.dense and rep.not_dense.reason == reason
        assert str(rep.not_dense.cylinder) == cyl
        assert validate_not_dense(g, rep.not_dense) > 0


def test_density_witnesses_revalidate():
    g = parse("vertex a\nvertex b\nvertex c\nedge x: a -> b\nedge y: b -> c\nedge z: c -> c\n"
              "outstar o: a\n")
    assert decide_rfd(g).rfd
    rep = periodic_density_check(g)
    assert rep.dense and len(rep.witnesses) <= rep.cylinders_checked
    for w in rep.witnesses:
        assert bd.membership(w.point, w.cylinder)
        assert orbit(g, w.point).finite


def test_density_reports_bounds():
    rep = periodic_density_check(LOOP, 1, 1, 8)
    assert rep.to_document()["parameters"] == {"stem_bound": 1, "exclusion_bound": 1,
                                               "orbit_cap": 8, "expand_bound": 2}
