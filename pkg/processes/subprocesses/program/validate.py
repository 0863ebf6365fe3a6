"""Static checks run on every parsed or generated program."""

from __future__ import annotations

from fractions import Fraction

from helpers import config
from helpers.exceptions import ValidationError
from processes.subprocesses.program.model import (
    ARITHMETIC_OPS,
    BOOLEAN_OPS,
    RELATIONAL_OPS,
    Binary,
    BoolLit,
    Expr,
    IntLit,
    Program,
    Unary,
    VarRef,
)

INT = "int"
BOOL = "bool"


def type_of(expr: Expr, program: Program) -> str:
    """Type of ``expr``, ``"int"`` or ``"bool"``.

    Raises:
        ValidationError: on an undeclared variable or an ill-typed operand.
    """
    match expr:
        case IntLit():
            return INT
        case BoolLit():
            return BOOL
        case VarRef(name):
            if not program.declares(name):
                raise ValidationError(f"Undeclared variable {name!r}")
            return INT
        case Unary("!", operand):
            _expect(operand, BOOL, "!", program)
            return BOOL
        case Unary("-", operand):
            _expect(operand, INT, "-", program)
            return INT
        case Binary(op, left, right) if op in ARITHMETIC_OPS:
            _expect(left, INT, op, program)
            _expect(right, INT, op, program)
            return INT
        case Binary(op, left, right) if op in ("=", "!="):
            left_type = type_of(left, program)
            if type_of(right, program) != left_type:
                raise ValidationError(f"Operands of {op!r} must have the same type")
            return BOOL
        case Binary(op, left, right) if op in RELATIONAL_OPS:
            _expect(left, INT, op, program)
            _expect(right, INT, op, program)
            return BOOL
        case Binary(op, left, right) if op in BOOLEAN_OPS:
            _expect(left, BOOL, op, program)
            _expect(right, BOOL, op, program)
            return BOOL
    raise ValidationError(f"Unsupported expression {expr!r}")


def _expect(expr: Expr, wanted: str, op: str, program: Program) -> None:
    found = type_of(expr, program)
    if found != wanted:
        raise ValidationError(f"Operator {op!r} expects {wanted} operands, got {found}")


def validate(program: Program) -> None:
    """Raise ValidationError unless ``program`` is well-formed."""
    seen: set[str] = set()
    for decl in program.declarations:
        if decl.name in seen:
            raise ValidationError(f"Duplicate declaration of {decl.name!r}")
        seen.add(decl.name)
        if decl.domain.lower > decl.domain.upper:
            raise ValidationError(f"Empty domain [{decl.domain.lower}..{decl.domain.upper}] for {decl.name!r}")
        if decl.initial is not None and decl.initial not in decl.domain:
            raise ValidationError(f"Initial value {decl.initial} of {decl.name!r} lies outside its domain")

    if type_of(program.init, program) != BOOL:
        raise ValidationError("The init expression must be Boolean")

    for number, command in enumerate(program.commands):
        where = f"command {number}" + (f" [{command.label}]" if command.label else "")
        if type_of(command.guard, program) != BOOL:
            raise ValidationError(f"Guard of {where} must be Boolean")
        if not command.branches:
            raise ValidationError(f"{where} has no branches")
        total = Fraction(0)
        for branch in command.branches:
            if not 0 < branch.probability <= 1:
                raise ValidationError(f"Probability {branch.probability} in {where} lies outside (0, 1]")
            total += branch.probability
            assigned: set[str] = set()
            for name, expr in branch.update.assignments:
                if not program.declares(name):
                    raise ValidationError(f"Update in {where} assigns undeclared variable {name!r}")
                if name in assigned:
                    raise ValidationError(f"Update in {where} assigns {name!r} twice")
                assigned.add(name)
                if type_of(expr, program) != INT:
                    raise ValidationError(f"Update of {name!r} in {where} must be an integer expression")
        if abs(total - 1) > config.PROBABILITY_TOLERANCE:
            raise ValidationError(f"Branch probabilities of {where} must sum to 1, got {float(total)}")
