from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gehman.dendrite import ArcPoint, Node
from gehman.errors import DepthRangeError
from gehman.exact_mod import DENDRITE, LINEAR, Nested, split, stage_check
from gehman.system import GehmanSystem, SystemSpec
from helpers import odometer_levels
from oracle import Oracle, as_tuple

SYS = GehmanSystem.full_shift(2, 2)
M = SYS.Fmod


@pytest.mark.parametrize("t, value", [
    (Fraction(0), Node("")),
    (Fraction(1), Node("")),
    (Fraction(1, 8), Node("0")),
    (Fraction(1, 4), Node("0")),
    (Fraction(1, 2), Node("")),
    (Fraction(5, 8), Node("1")),
    (Fraction(1, 16), ArcPoint("0", Fraction(1, 2))),
])
def test_limit_map_values(t, value):
    assert M.eval_limit_f(t) == value


def test_nested_when_unresolved():
    v = M.eval_limit_f(Fraction(1, 3))
    assert isinstance(v, Nested) and v.depth == 72
    assert M.eval_limit_f(Fraction(1, 3), resolve_depth=5) == Nested(v.code[:5], 5)


def test_stage_shapes():
    for n in range(7):
        table = M.build_stage(n)
        kinds = [p.kind for p in table.pieces]
        assert kinds.count(DENDRITE) == 2 ** n
        assert kinds.count(LINEAR) == 4 * (2 ** n - 1)
        assert table.cutpoints()[0] == 0 and table.cutpoints()[-1] == 1


def test_every_linear_stage_piece_stretches_by_eight():
    lams = {p.lam for n in range(9) for p in M.build_stage(n).pieces if p.kind == LINEAR}
    assert lams == {Fraction(8)}


def test_single_child_node_is_used_twice():
    assert SYS.codes.s_children("000") == ["0000"]
    pieces = split((Fraction(0), Fraction(1)), "000", SYS.codes)
    assert {p.code for p in pieces} == {"0000"}
    assert [p.kind for p in pieces] == [LINEAR, DENDRITE, LINEAR] * 2


def test_stage_beyond_build():
    with pytest.raises(DepthRangeError):
        M.build_stage(73)


def test_other_arcs_follow_f():
    p = ArcPoint("01", Fraction(1, 3))
    assert M.eval(p) == SYS.F.eval(p)
    assert M.eval(Node("0")) == Node("")


def test_root_arc_floods_in_one_step():
    assert M.root_arc_cover(8) == frozenset(SYS.skeleton(8).arcs)


def test_stage_check_to_six():
    rep = stage_check(M, 6)
    assert rep.passed, rep.as_dict()


def test_diameter_chain_breaks_at_chain_to_branch_step():
    rep = stage_check(M, 8, samples=200)
    assert not (rep.nesting_failures or rep.diameter_failures or rep.surjectivity_failures)
    assert rep.chain_failures
    assert all(f.startswith("stage 8") for f in rep.chain_failures)


def test_odometer_stages():
    levels, homs = odometer_levels((4, 16))
    system = GehmanSystem.build(SystemSpec({"type": "explicit_covers", "levels": levels,
                                            "homs": homs}, 2))
    assert system.n == [0, 4, 20]
    assert stage_check(system.Fmod, 3, samples=200).passed
    # depth 3 is a chain node, depth 4 a level point: the quarter chain fails there
    late = stage_check(system.Fmod, 4, samples=200)
    assert late.chain_failures and not late.nesting_failures and not late.diameter_failures
    # level-1 points have 4 children: two bits, then padding
    assert system.codes.s_children("0") == ["00", "01"]
    assert system.codes.s_children("00") == ["000"]


ORACLE = Oracle(SYS.seq)


@settings(max_examples=300, deadline=None)
@given(st.fractions(min_value=0, max_value=1, max_denominator=10 ** 6))
def test_agrees_with_oracle(t):
    assert as_tuple(M.eval_limit_f(t)) == ORACLE.f(t)
