"""Iterative variable reordering.

Starting from the model of a single family member, the admitted evaluation
domain is grown toward the goal domain of the init expression. After every
growth step the restricted family model is constructed under the current
order and sifted, so each construction starts from an order that suited a
smaller family.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, replace
from typing import Any

from helpers import config
from helpers.context_handler import Scope
from helpers.exceptions import BudgetError, ConstructionFailed, InvalidConfig, TimeBudgetExceeded
from processes.subprocesses.bdd.reorder import SiftConfig, VarOrder, reorder
from processes.subprocesses.iterative.heuristics import (
    EvaluationDomain,
    Heuristic,
    cnf,
    goal_domain,
    grow,
    minimal_evaluation,
    pick_variable,
)
from processes.subprocesses.program.evaluate import eval_expr
from processes.subprocesses.program.model import Binary, Evaluation, Program, declared_init
from processes.subprocesses.symbolic.builder import Budget, SymbolicModel, construct
from processes.subprocesses.symbolic.encoding import Side, encode

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IterationStats:
    iteration: int
    combinations: int
    states: int
    nodes_before: int
    nodes_after: int
    model_seconds: float
    reorder_seconds: float

    def as_row(self) -> list[str]:
        """CSV cells: counts as decimal strings, times with two decimals."""
        return [
            str(self.iteration),
            str(self.combinations),
            str(self.states),
            str(self.nodes_before),
            str(self.nodes_after),
            f"{self.model_seconds:.2f}",
            f"{self.reorder_seconds:.2f}",
        ]

    def to_json(self) -> dict[str, Any]:
        return dict(zip(config.ITERATION_HEADER, self.as_row(), strict=True))


@dataclass
class IterationResult:
    order: VarOrder
    rows: list[IterationStats]
    domain: EvaluationDomain
    goal: EvaluationDomain
    truncated: bool = False
    model: SymbolicModel | None = None

    @property
    def completed(self) -> bool:
        return not self.truncated and self.domain == self.goal

    @property
    def iterations(self) -> int:
        """Completed growth iterations, row 0 excluded."""
        return len(self.rows) - 1


def pinned_program(program: Program, evaluation: Evaluation) -> Program:
    """The single-member program whose declared initializers are ``evaluation``, without init block."""
    declarations = tuple(replace(decl, initial=evaluation[decl.name]) for decl in program.declarations)
    return Program(declarations, program.commands, declared_init(declarations))


def _check_member(program: Program, evaluation: Evaluation) -> None:
    for name in program.names:
        if name not in evaluation:
            raise InvalidConfig(f"Initial evaluation gives no value for {name!r}")
        if evaluation[name] not in program.domain(name):
            raise InvalidConfig(f"Initial evaluation puts {name}={evaluation[name]} outside its domain")
    if not eval_expr(program.init, evaluation):
        raise InvalidConfig(f"Evaluation {dict(evaluation)} does not satisfy the init expression")


def _build_and_sift(
    program: Program,
    order: VarOrder,
    budget: Budget,
    sift: SiftConfig,
    iteration: int,
) -> tuple[SymbolicModel, VarOrder, IterationStats]:
    model = construct(program, order, budget)
    nodes_before = model.size()
    started = time.perf_counter()
    with Scope(phase="reorder"):
        rho = reorder(model.table, model.roots, order, sift)
    reorder_seconds = time.perf_counter() - started
    stats = IterationStats(
        iteration=iteration,
        combinations=model.table.sat_count(model.init, model.encoding.side_bits(Side.ROW)),
        states=model.stats.states,
        nodes_before=nodes_before,
        nodes_after=model.size(),
        model_seconds=model.stats.build_seconds,
        reorder_seconds=reorder_seconds,
    )
    return model, rho, stats


def iterate(
    program: Program,
    pi: VarOrder | None = None,
    eta: Evaluation | None = None,
    heuristic: Heuristic | None = None,
    budget: Budget | None = None,
    sift: SiftConfig | None = None,
    deadline: float | None = None,
) -> IterationResult:
    """Grow the admitted family member by member set, reordering after each construction.

    Args:
        program: the family program; its init expression defines the family.
        pi: initial variable order, declaration order by default.
        eta: initial evaluation of row 0, the least initial evaluation under
            ``pi`` by default.
        heuristic: variable selection and step size.
        budget: node and time limits of each construction.
        sift: sifting parameters.
        deadline: ``time.monotonic()`` value after which growth stops; the result
            is then flagged truncated. Row 0 always runs.

    Returns:
        The final order, one stats row per construction, and on completion
        the full family model rebuilt under the final order.

    Raises:
        ConstructionFailed: when a construction breaches the budget; carries
            the rows completed so far and the last good order.
        EmptyInit: if the init expression is unsatisfiable.
    """
    pi = pi or VarOrder(program.names)
    heuristic = heuristic or Heuristic()
    budget = budget or Budget()
    sift = sift or SiftConfig()
    encoding = encode(program, pi)
    rows: list[IterationStats] = []

    with Scope(iteration=0):
        try:
            with Scope(phase="init analysis"):
                goal = goal_domain(program, encoding, budget.node_limit)
                if eta is None:
                    eta = minimal_evaluation(program, encoding, budget.node_limit)
        except BudgetError as e:
            raise ConstructionFailed(0, e, rows, pi) from e
        _check_member(program, eta)
        logger.info("Iteration 0: single member %s under %s", dict(eta), list(pi.variables))
        try:
            model, rho, stats = _build_and_sift(pinned_program(program, eta), pi, budget, sift, 0)
        except BudgetError as e:
            raise ConstructionFailed(0, e, rows, pi) from e
    domain: EvaluationDomain = {name: frozenset({eta[name]}) for name in program.names}
    rows.append(stats)

    iteration = 0
    truncated = False
    while domain != goal:
        if deadline is not None and time.monotonic() >= deadline:
            truncated = True
            break
        iteration += 1
        grown = domain
        for _ in range(heuristic.step):
            if grown == goal:
                break
            grown = grow(grown, goal, pick_variable(heuristic.selection, grown, goal, pi, rho))

        restricted = program.with_init(Binary("&", program.init, cnf(grown, pi)))
        step_budget = budget
        if deadline is not None:
            remaining = max(deadline - time.monotonic(), 1e-3)
            if budget.time_limit is None or remaining < budget.time_limit:
                step_budget = replace(budget, time_limit=remaining)

        with Scope(iteration=iteration):
            logger.info("Iteration %d: constructing under %s", iteration, list(rho.variables))
            del model
            try:
                model, next_rho, stats = _build_and_sift(restricted, rho, step_budget, sift, iteration)
            except TimeBudgetExceeded as e:
                if deadline is not None and time.monotonic() >= deadline:
                    logger.warning("Deadline reached during iteration %d", iteration)
                    truncated = True
                    model = None
                    break
                raise ConstructionFailed(iteration, e, rows, rho) from e
            except BudgetError as e:
                raise ConstructionFailed(iteration, e, rows, rho) from e
        rho = next_rho
        domain = grown
        rows.append(stats)
        logger.info(
            "Iteration %d: %d combinations, %d states, %d -> %d nodes",
            iteration,
            stats.combinations,
            stats.states,
            stats.nodes_before,
            stats.nodes_after,
        )

    result = IterationResult(rho, rows, domain, goal, truncated=truncated)
    if result.completed and model is not None:
        with Scope(iteration=iteration, phase="rebuild"):
            try:
                result.model = model.rebuilt_under(rho)
            except BudgetError as e:
                raise ConstructionFailed(iteration, e, rows, rho) from e
    if truncated:
        logger.warning("Run truncated after %d iterations", result.iterations)
    return result
