"""Tests for bit encoding, expression translation and symbolic model construction."""

from __future__ import annotations

import itertools

import pytest

from helpers import config
from helpers.exceptions import EvaluationError, InvalidConfig, NodeLimitExceeded, OutOfDomainUpdate, OverlappingGuards
from processes.subprocesses.bdd.reorder import VarOrder
from processes.subprocesses.program.explicit import explicit_semantics
from processes.subprocesses.program.model import BoolLit
from processes.subprocesses.program.parser import parse
from processes.subprocesses.symbolic.builder import (
    Budget,
    build_init,
    build_transition,
    check_stochastic,
    construct,
    reachable,
    reachable_states,
    transition_entries,
)
from processes.subprocesses.symbolic.encoding import Side, encode
from processes.subprocesses.symbolic.expressions import expr_to_bdd
from tests.builders import family

XY = """
var x : [0..1];
var y : [4..6];
"""

ALL = ("none", "comparison", "voting")

# blocks, mechanisms, p
SMALL_FAMILIES = [
    *itertools.product([1], [ALL, ("none",), ("comparison", "voting"), ("none", "voting")], [0.0, 0.5]),
    *itertools.product([2], [ALL, ("none", "comparison"), ("comparison", "voting")], [0.1, 0.5]),
    *itertools.product([3], [("none", "voting"), ("comparison", "voting"), ("none", "comparison")], [0.0, 0.1]),
]


def _init_of(source: str):
    return parse(source).init


def _assert_matches_explicit(model, program):
    oracle = explicit_semantics(program)
    assert reachable_states(model) == oracle.states
    assert model.stats.states == oracle.num_states
    symbolic = transition_entries(model)
    expected = oracle.matrix()
    assert symbolic.keys() == expected.keys()
    for key, value in expected.items():
        assert abs(symbolic[key] - value) <= config.ORACLE_TOLERANCE


# ======================== Encoding ========================


class TestEncoding:
    def test_three_value_domain(self):
        encoding = encode(parse(XY), VarOrder(("x", "y")))
        y = encoding["y"]
        assert y.width == 2
        assert [y.code(value) for value in (4, 5, 6)] == [0, 1, 2]
        assert y.bits(Side.ROW) == ("y.r1", "y.r0")

    def test_widths(self):
        encoding = encode(parse("var x : [0..1];\nvar z : [7..7];"), VarOrder(("x", "z")))
        assert encoding["x"].width == 1
        assert encoding["z"].width == 1

    def test_groups_interleave_rows_and_columns(self):
        encoding = encode(parse(XY), VarOrder(("y", "x")))
        assert encoding.bits == ["y.r1", "y.c1", "y.r0", "y.c0", "x.r0", "x.c0"]
        assert encoding.side_bits(Side.COLUMN) == ["y.c1", "y.c0", "x.c0"]

    def test_assignment_decodes(self):
        encoding = encode(parse(XY), VarOrder(("x", "y")))
        assignment = {**encoding["x"].assignment(1, Side.ROW), **encoding["y"].assignment(6, Side.ROW)}
        assert encoding.decode(assignment) == (1, 6)

    def test_order_must_cover_program(self):
        with pytest.raises(InvalidConfig):
            encode(parse(XY), VarOrder(("x",)))


# ======================== Expressions ========================


class TestExpressions:
    def _count(self, source: str) -> int:
        program = parse(source)
        encoding = encode(program, VarOrder(program.names))
        table = encoding.new_table()
        f = expr_to_bdd(table, encoding, program.init)
        return table.sat_count(f, encoding.side_bits(Side.ROW))

    def test_guard_count(self):
        assert self._count(XY + "init (x=1)&(y<=5) endinit") == 2

    def test_true_is_the_range(self):
        assert self._count(XY + "init true endinit") == 6

    def test_disjunction(self):
        assert self._count(XY + "init (x=0) & ((y=4)|(y=5)) endinit") == 2

    def test_arithmetic_and_relations(self):
        source = "var a : [0..3];\nvar b : [0..3];\ninit (a + b = 3) & (a * 2 >= b) & (b / 2 != 1) endinit"
        expected = sum(
            1 for a in range(4) for b in range(4) if a + b == 3 and a * 2 >= b and int(b / 2) != 1
        )
        assert self._count(source) == expected

    def test_division_by_zero_is_rejected(self):
        with pytest.raises(EvaluationError):
            self._count("var a : [0..2];\ninit 4 / a = 2 endinit")

    def test_boolean_equality(self):
        assert self._count(XY + "init (x=1) = (y=4) endinit") == 3


# ======================== Construction ========================


class TestConstruct:
    def test_single_state_identity(self):
        program = parse("var x : [0..0];")
        model = construct(program)
        assert model.stats.states == 1
        assert transition_entries(model) == {((0,), (0,)): 1.0}

    def test_coin(self, coin):
        model = construct(coin)
        assert transition_entries(model) == {
            ((0,), (0,)): 0.5,
            ((0,), (1,)): 0.5,
            ((1,), (0,)): 0.5,
            ((1,), (1,)): 0.5,
        }

    def test_no_commands_reach_is_init(self):
        program = parse(XY + "init (x=1) & (y>4) endinit")
        model = construct(program)
        assert model.reach == model.init
        assert model.stats.states == 2

    def test_counter(self, counter):
        model = construct(counter)
        assert model.stats.states == 3
        assert reachable_states(model) == [(0,), (1,), (2,)]
        _assert_matches_explicit(model, counter)

    def test_two_members_union(self, two_members):
        model = construct(two_members)
        _assert_matches_explicit(model, two_members)
        members = set()
        for y in (4, 5):
            member = two_members.with_init(parse(XY + f"init (x=1)&(y={y}) endinit").init)
            members |= set(explicit_semantics(member).states)
        assert set(reachable_states(model)) == members

    def test_stochastic(self, family3):
        model = construct(family3)
        assert check_stochastic(model) <= config.PROBABILITY_TOLERANCE

    def test_family_matches_explicit(self):
        program = family(2, p=0.1)
        _assert_matches_explicit(construct(program), program)

    @pytest.mark.parametrize(("index", "case"), list(enumerate(SMALL_FAMILIES)))
    def test_small_families_match_explicit(self, index, case):
        blocks, mechanisms, p = case
        program = family(blocks, p=p, mechanisms=mechanisms)
        names = program.names if index % 2 == 0 else tuple(reversed(program.names))
        model = construct(program, VarOrder(names))
        assert model.stats.states <= 200
        _assert_matches_explicit(model, program)

    def test_voting_error_mass(self):
        program = family(1, p=0.1, mechanisms=("voting",))
        model = construct(program)
        entries = transition_entries(model)
        # s1, pc, err, stop
        start, failed = (2, 0, 0, 0), (2, 1, 1, 0)
        assert abs(entries[(start, failed)] - 0.028) <= config.ORACLE_TOLERANCE

    def test_stats(self, counter):
        stats = construct(counter).stats
        assert stats.model_nodes > 0
        assert stats.peak_nodes >= stats.model_nodes
        assert stats.iterations == 3
        assert stats.to_json()["states"] == "3"

    def test_node_limit(self, counter):
        with pytest.raises(NodeLimitExceeded) as e:
            construct(counter, budget=Budget(node_limit=4))
        assert e.value.phase is not None
        assert f"phase={e.value.phase}" in e.value.where

    def test_budget_validation(self):
        with pytest.raises(InvalidConfig):
            Budget(node_limit=0)
        with pytest.raises(InvalidConfig):
            Budget(time_limit=-1)

    def test_order_changes_size_not_semantics(self, family3):
        forward = construct(family3, VarOrder(family3.names))
        backward = construct(family3, VarOrder(tuple(reversed(family3.names))))
        assert forward.stats.states == backward.stats.states
        assert transition_entries(forward) == pytest.approx(transition_entries(backward))

    def test_rebuilt_under_other_order(self, family3):
        model = construct(family3)
        rebuilt = model.rebuilt_under(VarOrder(tuple(reversed(family3.names))))
        assert rebuilt.stats.states == model.stats.states
        assert reachable_states(rebuilt) == reachable_states(model)
        assert rebuilt.table.audit() == []


# ======================== Well-formedness on reachable states ========================


class TestReachableChecks:
    def test_unreachable_overlap_is_tolerated(self):
        program = parse("var x : [0..2] init 0;\n[] x=0 -> (x'=1);\n[] x=2 -> (x'=0);\n[] x>=2 -> (x'=1);")
        model = construct(program)
        assert model.stats.states == 2

    def test_reachable_overlap_is_rejected(self):
        program = parse("var x : [0..2] init 0;\n[] x=0 -> (x'=1);\n[] x<=1 -> (x'=0);")
        with pytest.raises(OverlappingGuards) as e:
            construct(program)
        assert e.value.state == {"x": 0}

    def test_out_of_domain_update(self):
        program = parse("var x : [0..1] init 0;\n[] true -> (x'=x+1);")
        with pytest.raises(OutOfDomainUpdate):
            construct(program)

    def test_division_guarded_by_its_divisor(self):
        program = parse("var x : [0..2] init 2;\nvar y : [0..1] init 0;\n[] y>0 -> (x'=x/y);\n[] y=0 -> (y'=1);")
        model = construct(program)
        assert model.stats.states == 2
        _assert_matches_explicit(model, program)

    def test_conjunction_skips_division_when_left_is_false(self):
        program = parse("var x : [0..2] init 0;\n[] (x>0) & (4/x >= 2) -> (x'=0);\n[] x=0 -> (x'=1);")
        model = construct(program)
        assert reachable_states(model) == [(0,), (1,)]
        _assert_matches_explicit(model, program)

    def test_unreachable_zero_divisor_is_tolerated(self):
        program = parse("var x : [0..2] init 1;\n[] true -> (x'=2/x);")
        model = construct(program)
        assert reachable_states(model) == [(1,), (2,)]
        _assert_matches_explicit(model, program)

    def test_reachable_zero_divisor_in_update(self):
        program = parse("var x : [0..1] init 0;\nvar y : [0..1] init 0;\n[] true -> (x'=1/y);")
        with pytest.raises(EvaluationError):
            construct(program)

    def test_reachable_zero_divisor_in_guard(self):
        program = parse("var x : [0..1] init 0;\n[] 1/x = 1 -> (x'=1);")
        with pytest.raises(EvaluationError):
            construct(program)

    def test_transition_over_all_states_checks_every_divisor(self):
        program = parse("var x : [0..2] init 1;\n[] true -> (x'=2/x);")
        encoding = encode(program, VarOrder(program.names))
        with pytest.raises(EvaluationError):
            build_transition(program, encoding, encoding.new_table())

    def test_building_blocks(self, counter):
        encoding = encode(counter, VarOrder(counter.names))
        table = encoding.new_table()
        init = build_init(counter, encoding, table)
        trans = build_transition(counter, encoding, table)
        reach, states, steps = reachable(table, encoding, init, trans)
        assert states == 3
        assert steps == 3
        assert table.sat_count(init, encoding.side_bits(Side.ROW)) == 1
        assert reach != table.false

    def test_build_init_of_true(self):
        program = parse(XY).with_init(BoolLit(True))
        encoding = encode(program, VarOrder(program.names))
        table = encoding.new_table()
        assert table.sat_count(build_init(program, encoding, table), encoding.side_bits(Side.ROW)) == 6
