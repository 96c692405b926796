import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gehman.dendrite import ArcPoint, Endpoint, Node, TreePath
from gehman.errors import ConstructionError, DepthRangeError
from gehman.dynamics_f import CASE_A, CASE_B, CASE_C, PRESERVE, REVERSE
from gehman.system import GehmanSystem
from oracle import Oracle, as_tuple

SYS = GehmanSystem.full_shift(2, 2)
F, CODES = SYS.F, SYS.codes


def phi(level, cell):
    return CODES.code(level, cell)


def test_branch_image_reads_successor_parent():
    assert F.branch_image(phi(2, "010110")) == phi(1, "101")
    assert F.branch_image(phi(2, "000000")) == phi(1, "000")
    assert F.branch_image(phi(1, "011")) == ""
    assert F.branch_image("") == ""
    with pytest.raises(ConstructionError):
        F.branch_image("0")


def test_node_images():
    assert F.node_image("") == ""
    assert F.node_image("0100") == ""
    assert F.node_image(phi(1, "010")) == ""
    below = phi(1, "010") + "110"
    assert F.node_image(below) == F.branch_image(phi(1, "010"))


def test_family_sets():
    fam = F.family_sets(1, "010")
    assert fam.w_rel == ("100", "101")
    assert fam.w_ad == SYS.seq.cells(1)
    assert fam.e_choice["100"] == "100000000"


def test_case_a_table_on_root_arc():
    table = F.edge_table("0")
    assert table.case_tag == CASE_A
    assert len(table.pieces) == 16
    assert {p.lam for p in table.pieces} == {Fraction(21845, 1024)}
    assert [p.orientation for p in table.pieces[:2]] == [PRESERVE, REVERSE]
    assert table.pieces[0].target == TreePath("", phi(1, "000"))


def test_case_b_table():
    arc = phi(1, "010")
    table = F.edge_table(arc)
    assert table.case_tag == CASE_B
    assert len(table.pieces) == 4
    assert [p.target.end for p in table.pieces] == ["100000000"] * 2 + ["101000000"] * 2
    assert table.pieces[0].start == Node("")
    assert table.pieces[-1].end == Node("")


def test_case_c_needs_the_next_level():
    with pytest.raises(DepthRangeError):
        F.edge_table(phi(2, "010110"))


def test_case_c_table(two3):
    arc = two3.codes.code(2, "010110")
    table = two3.F.edge_table(arc)
    assert table.case_tag == CASE_C
    k = len(two3.seq.successors(2, "010110"))
    assert len(table.pieces) == 2 * k + 1
    first = table.pieces[0]
    assert first.orientation == PRESERVE
    assert first.target == TreePath("", two3.codes.code(1, "101"))
    assert table.pieces[-1].end == Node(two3.codes.code(1, "101"))


def test_tables_continuous_to_level_one_and_a_half():
    for arc in SYS.skeleton(9).arcs:
        table = F.edge_table(arc)
        cuts = table.cutpoints()
        assert cuts[0] == 0 and cuts[-1] == 1
        assert all(a < b for a, b in zip(cuts, cuts[1:]))


def test_stretch_bounds():
    rep = F.stretch_stats(9)
    assert rep.passed
    assert rep.overall[0] == Fraction(21845, 1024)
    assert rep.min_below_level_one > 4
    assert set(rep.by_case) == {CASE_A, CASE_B}


def test_eval_points():
    assert F.eval(Node("")) == Node("")
    x = F.eval(ArcPoint("0", Fraction(1, 32)))
    # the first piece runs down from the root along arc 0 at slope lambda
    assert x == ArcPoint("0", Fraction(1, 32) * Fraction(21845, 1024))
    assert F.eval(Endpoint(("C", "010", "010110"))) == Endpoint(("C", "101"))


def test_arc_cover_set_floods_level_one():
    assert F.arc_cover_set("0") == frozenset(SYS.skeleton(8).arcs)


def test_not_in_s():
    with pytest.raises(ConstructionError):
        F.classify("0001")


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 6), st.fractions(min_value=0, max_value=1, max_denominator=10 ** 5))
def test_subtree_images_stay_below_the_image_node(seed, t):
    rng = random.Random(seed)
    code = ""
    for _ in range(rng.randint(9, 40)):
        code = rng.choice(CODES.s_children(code))
    p = F.eval(ArcPoint(code, t) if 0 < t < 1 else Node(code[:-1]))
    top = F.node_image(code[:8])
    where = p.code if isinstance(p, Node) else p.arc
    assert where.startswith(top)


ORACLE = Oracle(SYS.seq)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(SYS.skeleton(9).arcs),
       st.fractions(min_value=0, max_value=1, max_denominator=10 ** 4))
def test_agrees_with_oracle(arc, t):
    if t in (0, 1):
        return
    assert as_tuple(F.eval(ArcPoint(arc, t))) == ORACLE.F(arc, t)
