"""Translation of program expressions into decision diagrams.

Integer expressions become partitions: a map from each value the expression
can take to the Boolean diagram of the encodings where it takes it. Boolean
expressions become plain Boolean diagrams.
"""

from __future__ import annotations

from helpers.exceptions import EvaluationError
from processes.subprocesses.bdd.engine import NodeRef, NodeTable
from processes.subprocesses.program.evaluate import apply_operator
from processes.subprocesses.program.model import (
    ARITHMETIC_OPS,
    RELATIONAL_OPS,
    Binary,
    BoolLit,
    Expr,
    IntLit,
    Unary,
    VarRef,
)
from processes.subprocesses.symbolic.encoding import Encoding, Side

Partition = dict[int, NodeRef]


class Translator:
    """Expression translator bound to one table, encoding and bit side."""

    def __init__(self, table: NodeTable, encoding: Encoding, side: Side = Side.ROW) -> None:
        self.table = table
        self.encoding = encoding
        self.side = side
        self._ranges: dict[str, NodeRef] = {}
        self._all_ranges: NodeRef | None = None

    def value(self, name: str, value: int) -> NodeRef:
        """Encodings where variable ``name`` equals ``value``."""
        return self.table.cube(self.encoding[name].assignment(value, self.side))

    def range(self, name: str) -> NodeRef:
        """Encodings of ``name`` that stand for a value of its domain."""
        if name not in self._ranges:
            result = self.table.false
            for value in self.encoding[name].domain.values():
                result = result | self.value(name, value)
            self._ranges[name] = result
        return self._ranges[name]

    def all_ranges(self) -> NodeRef:
        """Conjunction of every variable's range constraint."""
        if self._all_ranges is None:
            result = self.table.true
            for name in reversed(self.encoding.order.variables):
                result = self.range(name) & result
            self._all_ranges = result
        return self._all_ranges

    def partial_partition(self, expr: Expr) -> tuple[Partition, NodeRef]:
        """Value partition of an integer expression and the region where it is undefined.

        Encodings where evaluation divides by zero belong to no block of the
        partition; they make up the second component.
        """
        table = self.table
        match expr:
            case IntLit(value):
                return {value: table.true}, table.false
            case VarRef(name):
                return {value: self.value(name, value) for value in self.encoding[name].domain.values()}, table.false
            case Unary("-", operand):
                parts, undefined = self.partial_partition(operand)
                return {-value: region for value, region in parts.items()}, undefined
            case Binary(op, left, right) if op in ARITHMETIC_OPS:
                left_parts, left_undefined = self.partial_partition(left)
                right_parts, right_undefined = self.partial_partition(right)
                undefined = left_undefined | right_undefined
                result: Partition = {}
                for a, region_a in left_parts.items():
                    for b, region_b in right_parts.items():
                        region = table.apply("diff", region_a & region_b, undefined)
                        if region == table.false:
                            continue
                        if op == "/" and b == 0:
                            undefined = undefined | region
                            continue
                        value = apply_operator(op, a, b)
                        result[value] = result[value] | region if value in result else region
                return result, undefined
        raise ValueError(f"Not an integer expression: {expr!r}")

    def partial_boolean(self, expr: Expr) -> tuple[NodeRef, NodeRef]:
        """Diagram of a Boolean expression and the region where evaluating it divides by zero.

        ``&`` and ``|`` evaluate their right operand only when the left one
        does not decide the result; every other operator evaluates both.
        """
        table = self.table
        match expr:
            case BoolLit(value):
                return (table.true if value else table.false), table.false
            case Unary("!", operand):
                f, undefined = self.partial_boolean(operand)
                return table.negate(f), undefined
            case Binary("&", left, right):
                f, left_undefined = self.partial_boolean(left)
                g, right_undefined = self.partial_boolean(right)
                return f & g, left_undefined | (f & right_undefined)
            case Binary("|", left, right):
                f, left_undefined = self.partial_boolean(left)
                g, right_undefined = self.partial_boolean(right)
                return f | g, left_undefined | table.apply("diff", right_undefined, f)
            case Binary("=>", left, right):
                f, left_undefined = self.partial_boolean(left)
                g, right_undefined = self.partial_boolean(right)
                return table.negate(f) | g, left_undefined | right_undefined
            case Binary(op, left, right) if op in ("=", "!=") and _is_boolean(left):
                f, left_undefined = self.partial_boolean(left)
                g, right_undefined = self.partial_boolean(right)
                same = table.negate(f ^ g)
                return (same if op == "=" else table.negate(same)), left_undefined | right_undefined
            case Binary(op, left, right) if op in RELATIONAL_OPS:
                left_parts, left_undefined = self.partial_partition(left)
                right_parts, right_undefined = self.partial_partition(right)
                result = table.false
                for a, region_a in left_parts.items():
                    for b, region_b in right_parts.items():
                        if apply_operator(op, a, b):
                            result = result | (region_a & region_b)
                return result, left_undefined | right_undefined
        raise ValueError(f"Not a Boolean expression: {expr!r}")

    def _require_defined(self, expr: Expr, undefined: NodeRef) -> None:
        if undefined & self.all_ranges() != self.table.false:
            raise EvaluationError(f"Division by zero is possible in {expr!r}")

    def partition(self, expr: Expr) -> Partition:
        """Value partition of an integer expression defined on every in-range encoding.

        Raises:
            EvaluationError: if some in-range encoding divides by zero.
        """
        parts, undefined = self.partial_partition(expr)
        self._require_defined(expr, undefined)
        return parts

    def boolean(self, expr: Expr) -> NodeRef:
        """Diagram of a Boolean expression, without range constraints.

        Raises:
            EvaluationError: if some in-range encoding divides by zero.
        """
        f, undefined = self.partial_boolean(expr)
        self._require_defined(expr, undefined)
        return f

    def expr_to_bdd(self, expr: Expr) -> NodeRef:
        """Encodings satisfying ``expr`` with every variable in range."""
        return self.boolean(expr) & self.all_ranges()


def _is_boolean(expr: Expr) -> bool:
    match expr:
        case BoolLit() | Unary("!", _):
            return True
        case Binary(op, _, _):
            return op not in ARITHMETIC_OPS
    return False


def expr_to_bdd(table: NodeTable, encoding: Encoding, expr: Expr, side: Side = Side.ROW) -> NodeRef:
    """One-off translation of a Boolean expression, range constraints included."""
    return Translator(table, encoding, side).expr_to_bdd(expr)
