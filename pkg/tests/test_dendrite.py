from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gehman.dendrite import (
    ArcPoint,
    Endpoint,
    Node,
    TreePath,
    assign_codes,
    build_skeleton,
    common_prefix,
    height,
    metric,
    on_arc,
    point_distance,
    subdendrite_diameter_bound,
    subtree_diameter,
    tail,
)
from gehman.errors import ConstructionError, DepthRangeError
from gehman.system import GehmanSystem

SYS = GehmanSystem.full_shift(2, 2)
CODES = SYS.codes


def test_code_lengths_and_examples():
    assert CODES.n == [0, 8, 72]
    assert CODES.code(1, "000") == "00000000"
    assert CODES.code(1, "111") == "11100000"
    assert CODES.code(2, "000000") == "0" * 72
    assert CODES.code(2, "010110") == "01000000" + "110" + "0" * 61
    assert len(set(CODES.phi.values())) == len(CODES.phi)


def test_codes_are_prefix_coherent():
    for (level, cell), code in CODES.phi.items():
        if level:
            parent = SYS.seq.parent(level, cell)
            assert code.startswith(CODES.code(level - 1, parent))
            assert len(code) == CODES.n[level]


def test_unknown_policy():
    with pytest.raises(ConstructionError):
        assign_codes(SYS.seq, "greedy")


def test_membership_and_children():
    assert CODES.in_s("") and CODES.in_s("0") and CODES.in_s("111")
    assert not CODES.in_s("0001")
    assert CODES.s_children("") == ["0", "1"]
    assert CODES.s_children("000") == ["0000"]
    assert CODES.s_children("00000000") == ["000000000", "000000001"]
    with pytest.raises(DepthRangeError):
        CODES.s_children("0" * 72)


def test_skeleton_to_level_one():
    skel = build_skeleton(CODES, 8)
    assert len(skel.nodes) == 55
    assert len(skel.arcs) == 54
    kinds = [skel.node_kind[u] for u in skel.nodes]
    assert kinds.count("level-point") == 8
    assert kinds.count("chain") == 40
    assert kinds.count("S-branch") == 6
    assert len(build_skeleton(CODES).nodes) == 4071
    with pytest.raises(DepthRangeError):
        build_skeleton(CODES, 73)


def test_layout_is_tidy():
    skel = build_skeleton(CODES, 8)
    pos = skel.layout()
    leaves = sorted(x for u, (x, y) in pos.items() if len(u) == 8)
    assert leaves == list(range(8))
    assert pos[""] == (Fraction(7, 2), 0)


def test_height_and_tail():
    assert height(0) == 0
    assert height(1) == Fraction(1, 4)
    assert height(2) + tail(2) == Fraction(1, 3)
    assert subdendrite_diameter_bound("0" * 8) == (Fraction(2, 3 * 4 ** 8), Fraction(1, 4 ** 8))


def test_subtree_diameter():
    assert subtree_diameter("", CODES) == Fraction(2, 3)
    assert subtree_diameter("000", CODES) == tail(3)
    assert subtree_diameter("00000000", CODES) == 2 * tail(8)


def test_on_arc_normalizes():
    assert on_arc("01", 0) == Node("0")
    assert on_arc("01", 1) == Node("01")
    assert on_arc("01", Fraction(1, 2)) == ArcPoint("01", Fraction(1, 2))
    with pytest.raises(ValueError):
        on_arc("01", 2)


def test_point_strings():
    assert str(Node("")) == "root"
    assert str(Node("01")) == "node=01"
    assert str(ArcPoint("0", Fraction(1, 16))) == "arc=0,t=1/16"
    assert str(Endpoint(("C", "000", "000000"))) == "end=000/000000"


def test_path_geometry():
    p = TreePath("011", "00")
    assert p.apex == "0"
    assert p.arcs == ["011", "01", "00"]
    assert p.total_len == Fraction(1, 16) + Fraction(1, 64) + Fraction(1, 16)
    assert p.locate(Fraction(0)) == Node("011")
    assert p.locate(Fraction(1, 64)) == Node("01")
    assert p.locate(p.total_len) == Node("00")
    assert p.locate(Fraction(1, 128)) == ArcPoint("011", Fraction(1, 2))
    with pytest.raises(ValueError):
        p.locate(p.total_len + 1)


def test_common_prefix():
    assert common_prefix("0110", "0101") == "01"
    assert common_prefix("", "1") == ""


def test_endpoint_metric_bounds():
    a = Endpoint(("C", "000", "000000"))
    b = Endpoint(("C", "000", "000001"))
    d = metric(a, b, CODES)
    assert d.error == 2 * tail(72)
    # the two codes part after the third bit of the level-2 block
    assert d.value == 2 * (height(72) - height(10))
    assert metric(a, a, CODES).value == 0
    coarse = metric(a, b, CODES, truncation=8)
    assert coarse.value == 0 and coarse.upper == 2 * tail(8)


# ---------------------------------------------------------------------------
# metric axioms on random points of S

@st.composite
def s_points(draw, max_depth=14):
    code = ""
    depth = draw(st.integers(0, max_depth))
    for _ in range(depth):
        code = draw(st.sampled_from(CODES.s_children(code)))
    if not code or draw(st.booleans()):
        return Node(code)
    t = draw(st.fractions(min_value=0, max_value=1, max_denominator=10 ** 6))
    return on_arc(code, t)


@settings(max_examples=300, deadline=None)
@given(s_points(), s_points(), s_points())
def test_metric_axioms(p, q, r):
    d = point_distance
    assert d(p, p) == 0
    assert d(p, q) == d(q, p)
    assert d(p, r) <= d(p, q) + d(q, r)
    if p != q:
        assert d(p, q) > 0
    assert d(p, q) < Fraction(2, 3)


@settings(max_examples=200, deadline=None)
@given(s_points(), s_points(), st.fractions(min_value=0, max_value=1))
def test_locate_is_an_isometric_parametrization(p, q, s):
    a = p.code if isinstance(p, Node) else p.arc
    b = q.code if isinstance(q, Node) else q.arc
    path = TreePath(a, b)
    x = s * path.total_len
    mid = path.locate(x)
    assert point_distance(Node(a), mid) == x
    assert point_distance(mid, Node(b)) == path.total_len - x


@settings(max_examples=100, deadline=None)
@given(s_points(max_depth=40))
def test_distance_from_root_is_height(p):
    if isinstance(p, Node):
        assert point_distance(Node(""), p) == height(len(p.code))
    else:
        assert point_distance(Node(""), p) == height(len(p.arc) - 1) + p.t * Fraction(1, 4 ** len(p.arc))
