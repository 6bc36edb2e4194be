import itertools

import pytest
from hypothesis import given, strategies as st

from rfdgraph import boundary as bd
from rfdgraph.boundary import CylinderSet, FinitePath, Lasso, PointError, RayTail
from rfdgraph.fixtures import FIXTURES
from rfdgraph.oracle import cylinder_has_member
from rfdgraph.presentation import OMEGA, out_degree, parse

from strategies import presentations

LOOP = FIXTURES["FIX_LOOP"]
B = FIXTURES["FIX_B"]
TWO = parse("vertex p\nvertex q\nedge e1: p -> q\nedge e2: q -> p\n")


def pt(g, text):
    return bd.parse_point(g, text)


def test_lasso_canonical_forms_coincide():
    # the same sequence written with a rotated period, a repeated period, or a longer stem
    e1, e2 = TWO.edge("e1"), TWO.edge("e2")
    a = Lasso((), (e1, e2), 0)
    assert Lasso((), (e1, e2, e1, e2), 0) == a
    assert Lasso((e1,), (e2, e1), 0) == a
    assert Lasso((), (e2, e1), 0) == Lasso((), (e1, e2), 1)
    assert Lasso((e1, e2), (e1, e2), 0) == a
    assert Lasso((), (e2, e1), 1) == a


def test_ray_tail_absorbs_ray_edges():
    d = FIXTURES["FIX_D"]
    x = RayTail((d.edge("a"), d.edge("b"), d.edge("r", 1), d.edge("r", 2)), "r", "v2", 3)
    assert x == RayTail((d.edge("a"), d.edge("b")), "r", "v2", 1)
    assert bd.format_point(x) == "a.b.r^ray"


@pytest.mark.parametrize("g, text", [
    (LOOP, "e^inf"),
    (FIXTURES["FIX_SINK"], "v"),
    (TWO, "(e1.e2)^inf"),
    (TWO, "(e1.e2)^inf@1"),
    (B, "b.c.c1^inf"),
    (B, "a3.b.d.g"),
    (FIXTURES["FIX_D"], "a.b.r^ray"),
    (FIXTURES["FIX_D"], "r^ray@3"),
    (FIXTURES["FIX_A"], "i1#2.b.d"),
])
def test_notation_round_trip(g, text):
    x = pt(g, text)
    assert bd.format_point(x) == text
    assert pt(g, bd.format_point(x)) == x


@pytest.mark.parametrize("g, text", [
    (B, "a.b"),        # does not compose
    (B, "b.c"),        # v6 is not singular
    (LOOP, "f^inf"),   # unknown edge
    (B, "v4"),         # regular vertex
    (FIXTURES["FIX_C"], "r^ray"),  # not a forward ray
])
def test_invalid_points_rejected(g, text):
    with pytest.raises(PointError):
        pt(g, text)


def test_shift_and_prepend():
    x = pt(B, "b.c.c1^inf")
    assert bd.shift(x, 2) == pt(B, "c1^inf")
    assert bd.shift(x, 7) == bd.shift(x, 2)
    assert bd.prepend((B.edge("a3"),), x) == pt(B, "a3.b.c.c1^inf")
    with pytest.raises(PointError):
        bd.shift(pt(B, "b.d.g"), 4)


def test_unroll_and_edge_at():
    x = pt(TWO, "(e1.e2)^inf@1")
    assert [str(e) for e in bd.unroll(x, 5)] == ["e2", "e1", "e2", "e1", "e2"]
    assert bd.source(x) == "q"
    y = pt(B, "b.d.g")
    assert bd.edge_at(y, 3) is None and bd.length(y) == 3


def test_cylinder_notation_and_membership():
    z = bd.parse_cylinder(B, r"Z(a3.b \ {c})")
    assert str(z) == r"Z(a3.b \ {c})"
    assert bd.membership(pt(B, "a3.b.d.g"), z)
    assert not bd.membership(pt(B, "a3.b.c.c1^inf"), z)
    assert not bd.membership(pt(B, "b.d.g"), z)
    assert str(bd.parse_cylinder(B, "Z(v4)")) == "Z(v4)"
    with pytest.raises(PointError):
        bd.parse_cylinder(B, r"Z(a3 \ {c})")


def test_cylinder_nonempty_examples():
    assert not bd.cylinder_nonempty(B, bd.parse_cylinder(B, r"Z(b \ {c,d})")).nonempty
    res = bd.cylinder_nonempty(B, bd.parse_cylinder(B, r"Z(b \ {c})"))
    assert res.nonempty and bd.membership(res.member, bd.parse_cylinder(B, r"Z(b \ {c})"))
    a = FIXTURES["FIX_A"]
    z = bd.parse_cylinder(a, r"Z(d \ {g,o#1,o#2})")
    res = bd.cylinder_nonempty(a, z)
    assert res.nonempty and bd.membership(res.member, z)
    # excluding every finite out-edge of an infinite emitter still leaves the emitter itself
    assert bd.cylinder_nonempty(a, bd.parse_cylinder(a, r"Z(d \ {g})")).nonempty


def _cylinders(g, depth=2, width=3):
    starts = list(g.vertices) + [g.derived(p.tag, -1 if p.kind == "backray" else 1) for p in g.primitives]
    for v in starts:
        paths = [()]
        for _ in range(depth):
            paths += [p + (e,) for p in paths if len(p) == _
                      for e in g.out_edges(p[-1].target if p else v, bound=width)
                      if out_degree(g, p[-1].target if p else v)]
        for mu in paths:
            end = mu[-1].target if mu else v
            outs = list(g.out_edges(end, bound=width)) if out_degree(g, end) else []
            for k in range(min(len(outs), 3) + 1):
                for ex in itertools.combinations(outs, k):
                    yield CylinderSet(v, mu, frozenset(ex))


def test_cylinder_nonempty_agrees_with_truncation(small_corpus):
    checked = 0
    for _, g in small_corpus[:60]:
        for z in _cylinders(g):
            res = bd.cylinder_nonempty(g, z)
            assert res.nonempty == cylinder_has_member(g, z.start, z.base, z.excluded)
            if res.nonempty:
                bd.validate_point(g, res.member)
                assert bd.membership(res.member, z)
            checked += 1
    assert checked > 1000


@given(presentations(), st.integers(0, 3))
def test_enumerated_points_are_valid_and_shift_closed(g, n):
    for v in g.vertices[:2]:
        for x in bd.enumerate_points(g, v, 3):
            bd.validate_point(g, x)
            assert bd.source(x) == v
            if bd.length(x) >= n:
                y = bd.shift(x, n)
                bd.validate_point(g, y)
                assert bd.prepend(bd.unroll(x, n), y) == x


@given(presentations(), st.integers(0, 3), st.integers(0, 3))
def test_shift_composition(g, m, n):
    for v in g.vertices[:2]:
        for x in bd.enumerate_points(g, v, 3):
            if bd.length(x) >= m + n:
                assert bd.shift(bd.shift(x, m), n) == bd.shift(x, m + n)


def test_shift_is_bijective_on_cylinders(small_corpus):
    for _, g in small_corpus[:40]:
        for v in g.vertices:
            if out_degree(g, v) == 0:
                continue
            for e in list(g.out_edges(v, bound=2))[:2]:
                rep = bd.local_homeo_check(g, v, (e,), 2)
                assert rep.bijective, rep


def test_singular_vertices():
    a = FIXTURES["FIX_A"]
    assert bd.singular_vertices(a, bound=2) == {"v5", "v6", "v7", "o[1]", "o[2]"}
    assert bd.is_singular(a, "v5") and out_degree(a, "v5") == OMEGA
