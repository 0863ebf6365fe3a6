"""Concrete expression semantics over a single evaluation."""

from __future__ import annotations

from helpers.exceptions import EvaluationError
from processes.subprocesses.program.model import Binary, BoolLit, Evaluation, Expr, IntLit, Unary, VarRef


def int_div(a: int, b: int) -> int:
    """Integer division truncating toward zero."""
    if b == 0:
        raise EvaluationError(f"Division by zero in {a} / {b}")
    quotient = abs(a) // abs(b)
    return quotient if (a >= 0) == (b > 0) else -quotient


def apply_operator(op: str, a: int | bool, b: int | bool) -> int | bool:
    """Binary operator on already evaluated operands."""
    match op:
        case "+":
            return a + b
        case "-":
            return a - b
        case "*":
            return a * b
        case "/":
            return int_div(a, b)
        case "=":
            return a == b
        case "!=":
            return a != b
        case "<":
            return a < b
        case "<=":
            return a <= b
        case ">":
            return a > b
        case ">=":
            return a >= b
        case "&":
            return bool(a and b)
        case "|":
            return bool(a or b)
        case "=>":
            return bool((not a) or b)
    raise ValueError(f"Unknown operator {op!r}")


def eval_expr(expr: Expr, env: Evaluation) -> int | bool:
    """Evaluate ``expr`` under ``env``.

    Raises:
        EvaluationError: on division by zero or a variable missing from ``env``.
    """
    match expr:
        case IntLit(value) | BoolLit(value):
            return value
        case VarRef(name):
            try:
                return env[name]
            except KeyError as e:
                raise EvaluationError(f"Variable {name!r} has no value") from e
        case Unary("!", operand):
            return not eval_expr(operand, env)
        case Unary("-", operand):
            return -eval_expr(operand, env)
        case Binary("&", left, right):
            return bool(eval_expr(left, env)) and bool(eval_expr(right, env))
        case Binary("|", left, right):
            return bool(eval_expr(left, env)) or bool(eval_expr(right, env))
        case Binary(op, left, right):
            return apply_operator(op, eval_expr(left, env), eval_expr(right, env))
    raise ValueError(f"Not an expression: {expr!r}")
