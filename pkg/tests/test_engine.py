"""Tests for the decision diagram engine: canonicity, apply family, counting, swaps, budgets."""

from __future__ import annotations

import random
import time

import pytest

from helpers.exceptions import (
    IncompleteAssignment,
    KindMismatch,
    NodeLimitExceeded,
    SupportViolation,
    TimeBudgetExceeded,
)
from processes.subprocesses.bdd.engine import Kind, NodeTable
from tests.builders import all_assignments, bits_named, from_truth_table, random_truth_table, truth_table

# ======================== Helpers ========================


def _random_formula(table: NodeTable, bits: list[str], rng: random.Random, depth: int):
    """Random formula as (diagram, python predicate) built from and/or/xor/not."""
    if depth == 0 or rng.random() < 0.2:
        bit = rng.choice(bits)
        return table.var(bit), lambda a, bit=bit: a[bit]
    op = rng.choice(["and", "or", "xor", "not"])
    f, pf = _random_formula(table, bits, rng, depth - 1)
    if op == "not":
        return ~f, lambda a: not pf(a)
    g, pg = _random_formula(table, bits, rng, depth - 1)
    if op == "and":
        return f & g, lambda a: pf(a) and pg(a)
    if op == "or":
        return f | g, lambda a: pf(a) or pg(a)
    return f ^ g, lambda a: pf(a) != pg(a)


# ======================== Terminals and nodes ========================


class TestConstruction:
    def test_constants_are_hash_consed(self):
        table = NodeTable(["x"])
        assert table.mk_const(True) == table.mk_const(True)
        assert table.mk_const(0.5) == table.mk_const(0.5)
        assert table.mk_const(0.5) != table.mk_const(0.25)

    def test_boolean_terminals_are_fixed(self):
        table = NodeTable(["x"])
        assert table.false.node == 0
        assert table.true.node == 1
        assert table.kind(table.const(1.0)) is Kind.REAL

    def test_redundant_node_is_skipped(self):
        table = NodeTable(["x", "y"])
        y = table.var("y")
        assert table.mk_node(0, y, y) == y

    def test_unique_table(self):
        table = NodeTable(["x"])
        assert table.mk_node(0, table.false, table.true) == table.mk_node(0, table.false, table.true)
        assert table.mk_node(0, table.false, table.true) == table.var("x")

    def test_mk_node_rejects_misordered_successors(self):
        table = NodeTable(["x", "y"])
        with pytest.raises(ValueError):
            table.mk_node(1, table.var("x"), table.true)

    def test_duplicate_bits_rejected(self):
        with pytest.raises(ValueError):
            NodeTable(["x", "x"])


# ======================== Apply family ========================


class TestApply:
    def test_and_identity(self):
        table = NodeTable(["x", "y"])
        f = table.var("x") | table.var("y")
        assert table.apply("and", f, table.true) == f

    def test_contradiction(self):
        table = NodeTable(["x"])
        x = table.var("x")
        assert table.apply("and", x, table.negate(x)) == table.false

    def test_terminal_arithmetic(self):
        table = NodeTable(["x"])
        result = table.apply("plus", table.const(0.3), table.const(0.2))
        assert result == table.const(0.5)
        assert table.value(result) == 0.5

    def test_ite_trivial_cases(self):
        table = NodeTable(["x", "y"])
        f, g, h = table.var("x"), table.var("y"), table.negate(table.var("y"))
        assert table.ite(table.true, g, h) == g
        assert table.ite(f, table.true, table.false) == f

    def test_ite_on_real_branches(self):
        table = NodeTable(["x"])
        f = table.ite(table.var("x"), table.const(0.75), table.const(0.25))
        assert table.eval(f, {"x": True}) == 0.75
        assert table.eval(f, {"x": False}) == 0.25

    def test_kind_mismatch(self):
        table = NodeTable(["x"])
        with pytest.raises(KindMismatch):
            table.apply("and", table.var("x"), table.const(1.0))
        with pytest.raises(KindMismatch):
            table.apply("plus", table.var("x"), table.const(1.0))

    def test_unknown_operator(self):
        table = NodeTable(["x"])
        with pytest.raises(ValueError):
            table.apply("nand", table.var("x"), table.true)

    def test_gt_zero_and_to_real(self):
        table = NodeTable(["x"])
        x = table.var("x")
        real = table.to_real(x)
        assert table.terminal_values(real) == {0.0, 1.0}
        assert table.greater_than_zero(real) == x

    def test_algebra_on_random_diagrams(self, rng):
        bits = bits_named(5)
        table = NodeTable(bits)
        for _ in range(20):
            f = from_truth_table(table, bits, random_truth_table(rng, 5))
            g = from_truth_table(table, bits, random_truth_table(rng, 5))
            h = from_truth_table(table, bits, random_truth_table(rng, 5))
            assert f & g == g & f
            assert f | g == g | f
            assert (f & g) & h == f & (g & h)
            assert (f | g) | h == f | (g | h)
            assert f ^ f == table.false
            assert table.negate(f & g) == table.negate(f) | table.negate(g)
            real = table.to_real(f)
            assert table.apply("plus", real, table.const(0.0)) == real
        assert table.audit() == []


# ======================== Canonicity and audit ========================


class TestCanonicity:
    def test_equivalent_constructions_share_one_node(self, rng):
        bits = bits_named(6)
        table = NodeTable(bits)
        for _ in range(30):
            rows = random_truth_table(rng, 6)
            direct = from_truth_table(table, bits, rows)
            # same function through the complement of the complement set
            via_complement = table.negate(from_truth_table(table, bits, [not row for row in rows]))
            assert direct == via_complement

    def test_same_node_iff_same_function(self, rng):
        bits = bits_named(4)
        table = NodeTable(bits)
        for _ in range(500):
            left = random_truth_table(rng, 4)
            right = list(left) if rng.random() < 0.5 else random_truth_table(rng, 4)
            f = from_truth_table(table, bits, left)
            g = table.negate(from_truth_table(table, bits, [not row for row in right]))
            assert (f == g) == (left == right)
            assert (f.node == g.node) == (left == right)

    def test_formulas_match_python_semantics(self, rng):
        bits = bits_named(6)
        table = NodeTable(bits)
        for _ in range(100):
            f, predicate = _random_formula(table, bits, rng, 4)
            assignment = {bit: rng.random() < 0.5 for bit in bits}
            assert table.eval(f, assignment) == predicate(assignment)

    def test_audit_after_mixed_operations(self, rng):
        bits = bits_named(6)
        table = NodeTable(bits)
        roots = [_random_formula(table, bits, rng, 5)[0] for _ in range(25)]
        roots.append(table.exists_abstract(roots[0], bits[:2]))
        roots.append(table.ite(roots[1], table.const(0.5), table.const(2.0)))
        assert table.audit() == []


# ======================== Abstraction and renaming ========================


class TestAbstraction:
    def test_exists_drops_quantified_bit(self):
        table = NodeTable(["x", "y"])
        assert table.exists_abstract(table.var("x") & table.var("y"), ["x"]) == table.var("y")

    def test_exists_over_nothing(self):
        table = NodeTable(["x", "y"])
        f = table.var("x") ^ table.var("y")
        assert table.exists_abstract(f, []) == f

    def test_and_abstract_equals_exists_of_and(self, rng):
        bits = bits_named(6)
        table = NodeTable(bits)
        for _ in range(15):
            f = from_truth_table(table, bits, random_truth_table(rng, 6))
            g = from_truth_table(table, bits, random_truth_table(rng, 6))
            quantified = rng.sample(bits, 3)
            assert table.and_abstract(f, g, quantified) == table.exists_abstract(f & g, quantified)

    def test_sum_abstract(self):
        table = NodeTable(["x", "y"])
        f = table.to_real(table.var("x") | table.var("y"))
        assert table.sum_abstract(f, ["x", "y"]) == table.const(3.0)
        partial = table.sum_abstract(f, ["y"])
        assert table.eval(partial, {"x": True}) == 2.0
        assert table.eval(partial, {"x": False}) == 1.0

    def test_rename_moves_support(self):
        table = NodeTable(["a", "b", "c"])
        f = table.var("a") & table.negate(table.var("c"))
        renamed = table.rename(f, {"a": "b"})
        assert renamed == table.var("b") & table.negate(table.var("c"))
        assert table.support(renamed) == frozenset({"b", "c"})

    def test_rename_rejects_clash(self):
        table = NodeTable(["a", "b"])
        with pytest.raises(ValueError):
            table.rename(table.var("a") & table.var("b"), {"a": "b"})


# ======================== Size, counting and evaluation ========================


class TestCounting:
    def test_sizes(self):
        table = NodeTable(["a", "b", "c"])
        a, b, c = table.var("a"), table.var("b"), table.var("c")
        assert table.size(table.true) == 1
        assert table.size(a) == 3
        assert table.size((a & b) | c) == 5
        assert table.shared_size([a, b]) == 4

    def test_sat_count(self):
        table = NodeTable(["x", "y"])
        assert table.sat_count(table.true, ["x", "y"]) == 4
        assert table.sat_count(table.var("x"), ["x", "y"]) == 2
        assert table.sat_count(table.false, ["x", "y"]) == 0

    def test_sat_count_outside_support(self):
        table = NodeTable(["x", "y"])
        with pytest.raises(SupportViolation):
            table.sat_count(table.var("x") & table.var("y"), ["x"])

    def test_sat_count_matches_truth_table(self, rng):
        bits = bits_named(8)
        table = NodeTable(bits)
        for _ in range(10):
            rows = random_truth_table(rng, 8)
            f = from_truth_table(table, bits, rows)
            assert table.sat_count(f, bits) == sum(rows)
            assert table.sat_count(f, bits) + table.sat_count(table.negate(f), bits) == 2**8

    def test_sat_count_is_exact_for_wide_support(self):
        bits = bits_named(80)
        table = NodeTable(bits)
        assert table.sat_count(table.var("b40"), bits) == 2**79

    def test_eval(self):
        table = NodeTable(["x", "y"])
        assert table.eval(table.const(0.25), {}) == 0.25
        assert table.eval(table.var("x"), {"x": True}) is True

    def test_eval_incomplete_assignment(self):
        table = NodeTable(["x", "y"])
        with pytest.raises(IncompleteAssignment):
            table.eval(table.var("x") & table.var("y"), {"x": True})

    def test_iter_assignments(self):
        table = NodeTable(["x", "y", "z"])
        f = table.var("x") & table.negate(table.var("z"))
        found = list(table.iter_assignments(f, ["x", "y", "z"]))
        assert sorted(sorted(a.items()) for a in found) == [
            [("x", True), ("y", False), ("z", False)],
            [("x", True), ("y", True), ("z", False)],
        ]

    def test_iter_paths_skips_zero(self):
        table = NodeTable(["x", "y"])
        f = table.ite(table.var("x"), table.const(0.5), table.const(0.0))
        assert list(table.iter_paths(f)) == [({"x": True}, 0.5)]


# ======================== Level swaps ========================


class TestSwap:
    def test_swap_preserves_every_function(self, rng):
        bits = bits_named(8)
        for _ in range(20):
            table = NodeTable(bits)
            rows = random_truth_table(rng, 8)
            f = from_truth_table(table, bits, rows)
            level = rng.randrange(7)
            table.swap_adjacent(level)
            assert truth_table(table, f, bits) == rows
            assert table.audit() == []

    def test_swap_twice_restores_order_and_size(self, rng):
        bits = bits_named(6)
        table = NodeTable(bits)
        f = from_truth_table(table, bits, random_truth_table(rng, 6))
        before = table.size(f)
        table.swap_adjacent(2)
        assert table.bits[2:4] == ("b3", "b2")
        table.swap_adjacent(2)
        assert table.bits == tuple(bits)
        assert table.size(f) == before

    def test_swap_leaves_unrelated_function_alone(self):
        table = NodeTable(["a", "b", "c", "d"])
        f = table.var("a") & table.var("b")
        before = table.size(f)
        table.swap_adjacent(2)
        assert table.size(f) == before

    def test_swap_sequence_preserves_reals(self, rng):
        bits = bits_named(5)
        table = NodeTable(bits)
        f = table.ite(from_truth_table(table, bits, random_truth_table(rng, 5)), table.const(0.5), table.const(0.125))
        expected = [table.eval(f, a) for a in all_assignments(bits)]
        for level in (0, 1, 2, 3, 0, 2):
            table.swap_adjacent(level)
        assert [table.eval(f, a) for a in all_assignments(bits)] == expected
        assert table.audit() == []

    def test_swap_out_of_range(self):
        table = NodeTable(["a", "b"])
        with pytest.raises(ValueError):
            table.swap_adjacent(1)


# ======================== Garbage collection and budgets ========================


class TestBudgets:
    def test_collection_keeps_live_handles(self, rng):
        bits = bits_named(6)
        table = NodeTable(bits)
        rows = random_truth_table(rng, 6)
        keep = from_truth_table(table, bits, rows)
        scratch = [from_truth_table(table, bits, random_truth_table(rng, 6)) for _ in range(5)]
        del scratch
        freed = table.collect_garbage()
        assert freed > 0
        assert table.node_count == table.size(keep)
        assert truth_table(table, keep, bits) == rows
        assert table.audit() == []

    def test_node_limit(self):
        table = NodeTable(["x", "y"], node_limit=4)
        x, y = table.var("x"), table.var("y")
        with pytest.raises(NodeLimitExceeded):
            _ = x & y

    def test_operation_at_limit_collects_and_retries(self):
        table = NodeTable(["x", "y"], node_limit=5, gc_ratio=1.0)
        x, y = table.var("x"), table.var("y")
        scratch = x | y
        del scratch
        assert table.node_count == 5
        both = x & y
        assert table.eval(both, {"x": True, "y": True})
        assert not table.eval(both, {"x": True, "y": False})
        assert table.collections == 1

    def test_time_budget(self):
        table = NodeTable(["x"], time_limit=60)
        table.deadline = time.monotonic() - 1
        with pytest.raises(TimeBudgetExceeded):
            table.var("x")

    def test_copy_into_other_order(self, rng):
        bits = bits_named(6)
        table = NodeTable(bits)
        rows = random_truth_table(rng, 6)
        f = from_truth_table(table, bits, rows)
        other = NodeTable(list(reversed(bits)))
        (copied,) = table.copy_into(other, [f])
        assert truth_table(other, copied, bits) == rows
        assert other.audit() == []

    def test_dot_output(self):
        table = NodeTable(["x"])
        dot = table.to_dot([table.var("x")])
        assert dot.startswith("digraph")
        assert "style=dashed" in dot
