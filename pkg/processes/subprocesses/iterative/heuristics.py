"""Evaluation domains and the variable selection heuristics that grow them."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from enum import StrEnum

from helpers.exceptions import EmptyInit, InvalidConfig
from processes.subprocesses.bdd.engine import NodeRef, NodeTable
from processes.subprocesses.bdd.reorder import VarOrder
from processes.subprocesses.program.model import Binary, Expr, IntLit, Program, VarRef, conjunction, disjunction
from processes.subprocesses.symbolic.encoding import Encoding, Side
from processes.subprocesses.symbolic.expressions import Translator

EvaluationDomain = dict[str, frozenset[int]]


class Selection(StrEnum):
    PI_MIN = "pi-min"
    RHO_MIN = "rho-min"
    RHO_MAX = "rho-max"


@dataclass(frozen=True)
class Heuristic:
    """Variable selection and number of growth sub-steps per iteration."""

    selection: Selection = Selection.PI_MIN
    step: int = 1

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "selection", Selection(self.selection))
        except ValueError as e:
            raise InvalidConfig(f"Unknown selection {self.selection!r}") from e
        if self.step < 1:
            raise InvalidConfig(f"Step size must be at least 1, got {self.step}")

    def __str__(self) -> str:
        return f"{self.selection.value}/{self.step}"


def _init_diagram(
    program: Program, encoding: Encoding, node_limit: int | None = None
) -> tuple[NodeTable, Translator, NodeRef]:
    table = encoding.new_table(node_limit)
    rows = Translator(table, encoding)
    return table, rows, rows.expr_to_bdd(program.init)


def goal_domain(program: Program, encoding: Encoding, node_limit: int | None = None) -> EvaluationDomain:
    """Per-variable projection of the init set: the values each variable takes in some initial state.

    Raises:
        EmptyInit: if the init expression is unsatisfiable.
    """
    table, rows, init = _init_diagram(program, encoding, node_limit)
    if init == table.false:
        raise EmptyInit("The init expression has no satisfying evaluation")
    row_bits = encoding.side_bits(Side.ROW)
    goal: EvaluationDomain = {}
    for var in encoding.variables:
        own = set(var.bits(Side.ROW))
        projection = table.exists_abstract(init, [bit for bit in row_bits if bit not in own])
        goal[var.name] = frozenset(
            value for value in var.domain.values() if projection & rows.value(var.name, value) != table.false
        )
    return goal


def minimal_evaluation(program: Program, encoding: Encoding, node_limit: int | None = None) -> dict[str, int]:
    """Initial evaluation that is lexicographically least under the encoding's order.

    Raises:
        EmptyInit: if the init expression is unsatisfiable.
    """
    table, rows, init = _init_diagram(program, encoding, node_limit)
    if init == table.false:
        raise EmptyInit("The init expression has no satisfying evaluation")
    evaluation: dict[str, int] = {}
    remaining = init
    for name in encoding.order:
        for value in encoding[name].domain.values():
            narrowed = remaining & rows.value(name, value)
            if narrowed != table.false:
                evaluation[name] = value
                remaining = narrowed
                break
    return evaluation


def cnf(domain: Mapping[str, frozenset[int]], order: VarOrder) -> Expr:
    """Conjunction over variables, in ``order``, of the disjunction of admitted values."""
    return conjunction(
        [
            disjunction([Binary("=", VarRef(name), IntLit(value)) for value in sorted(domain[name])])
            for name in order
        ]
    )


def pick_variable(
    selection: Selection,
    domain: Mapping[str, frozenset[int]],
    goal: Mapping[str, frozenset[int]],
    pi: VarOrder,
    rho: VarOrder,
) -> str:
    """Variable still short of its goal values that is least or greatest under the chosen order."""
    candidates = [name for name in pi if domain[name] != goal[name]]
    if not candidates:
        raise ValueError("Every variable already reached its goal values")
    match Selection(selection):
        case Selection.PI_MIN:
            return candidates[0]
        case Selection.RHO_MIN:
            return min(candidates, key=rho.position)
        case Selection.RHO_MAX:
            return max(candidates, key=rho.position)
    raise ValueError(f"Unknown selection {selection!r}")


def grow(domain: Mapping[str, frozenset[int]], goal: Mapping[str, frozenset[int]], name: str) -> EvaluationDomain:
    """Admit the least goal value of ``name`` not yet admitted."""
    missing = goal[name] - domain[name]
    if not missing:
        raise ValueError(f"Variable {name!r} already has all its goal values")
    grown = dict(domain)
    grown[name] = domain[name] | {min(missing)}
    return grown
