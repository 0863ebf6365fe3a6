"""Render programs back to source text that reparses to the same tree."""

from __future__ import annotations

from fractions import Fraction

from processes.subprocesses.program.model import Binary, BoolLit, Command, Expr, IntLit, Program, Unary, Update, VarRef


def format_expr(expr: Expr) -> str:
    """Fully parenthesised rendering of ``expr``."""
    match expr:
        case IntLit(value):
            return str(value)
        case BoolLit(value):
            return "true" if value else "false"
        case VarRef(name):
            return name
        case Unary(op, operand):
            return f"{op}({format_expr(operand)})"
        case Binary(op, left, right):
            return f"({format_expr(left)} {op} {format_expr(right)})"
    raise ValueError(f"Not an expression: {expr!r}")


def format_probability(probability: Fraction) -> str:
    """Exact decimal when the denominator allows it, ``n/d`` otherwise."""
    rest, twos, fives = probability.denominator, 0, 0
    while rest % 2 == 0:
        rest //= 2
        twos += 1
    while rest % 5 == 0:
        rest //= 5
        fives += 1
    if rest != 1:
        return f"{probability.numerator}/{probability.denominator}"
    places = max(twos, fives)
    if places == 0:
        return str(probability.numerator)
    digits = str(probability.numerator * 10**places // probability.denominator).rjust(places + 1, "0")
    return f"{digits[:-places]}.{digits[-places:]}"


def format_update(update: Update) -> str:
    if not update.assignments:
        return "true"
    return " & ".join(f"({name}'={format_expr(expr)})" for name, expr in update.assignments)


def format_command(command: Command) -> str:
    label = command.label or ""
    branches = " + ".join(
        f"{format_probability(branch.probability)}:{format_update(branch.update)}" for branch in command.branches
    )
    return f"[{label}] {format_expr(command.guard)} -> {branches};"


def format_program(program: Program) -> str:
    """Source text of ``program``; the init block is emitted only when it has one."""
    lines = ["dtmc", ""]
    for decl in program.declarations:
        initial = "" if decl.initial is None else f" init {decl.initial}"
        lines.append(f"var {decl.name} : [{decl.domain.lower}..{decl.domain.upper}]{initial};")
    if program.commands:
        lines.append("")
        lines.extend(format_command(command) for command in program.commands)
    if program.has_init_block:
        lines.extend(["", "init", f"    {format_expr(program.init)}", "endinit"])
    return "\n".join(lines) + "\n"
