"""Brute-force explicit semantics, the oracle for symbolic construction on small programs."""

from __future__ import annotations

import itertools
import logging
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from helpers import config
from helpers.exceptions import ExplicitBoundExceeded, OutOfDomainUpdate, OverlappingGuards
from processes.subprocesses.program.evaluate import eval_expr
from processes.subprocesses.program.model import Program

logger = logging.getLogger(__name__)

State = tuple[int, ...]


@dataclass(frozen=True)
class ExplicitModel:
    """Reachable state graph; states are value tuples in declaration order."""

    variables: tuple[str, ...]
    initial: frozenset[State]
    transitions: dict[State, dict[State, Fraction]]

    @property
    def states(self) -> list[State]:
        return sorted(self.transitions)

    @property
    def num_states(self) -> int:
        return len(self.transitions)

    def matrix(self) -> dict[tuple[State, State], float]:
        return {
            (source, target): float(probability)
            for source, row in self.transitions.items()
            for target, probability in row.items()
        }

    def row_sums(self) -> dict[State, Fraction]:
        return {source: sum(row.values(), Fraction(0)) for source, row in self.transitions.items()}

    def as_evaluation(self, state: State) -> dict[str, int]:
        return dict(zip(self.variables, state, strict=True))


def successors(program: Program, state: State) -> dict[State, Fraction]:
    """Outgoing distribution of ``state``.

    Raises:
        OverlappingGuards: if more than one command is enabled.
        OutOfDomainUpdate: if a branch leaves a variable's domain.
    """
    names = program.names
    env = dict(zip(names, state, strict=True))
    enabled = [number for number, command in enumerate(program.commands) if eval_expr(command.guard, env)]
    if len(enabled) > 1:
        raise OverlappingGuards(f"Commands {enabled} are all enabled in state {env}", state=env)
    if not enabled:
        return {state: Fraction(1)}

    number = enabled[0]
    row: dict[State, Fraction] = {}
    for branch in program.commands[number].branches:
        target = dict(env)
        for name, expr in branch.update.assignments:
            target[name] = eval_expr(expr, env)
        for name, value in target.items():
            if value not in program.domain(name):
                raise OutOfDomainUpdate(
                    f"Command {number} sets {name}={value} outside its domain in state {env}",
                    state=env,
                    command=number,
                )
        successor = tuple(target[name] for name in names)
        row[successor] = row.get(successor, Fraction(0)) + branch.probability
    return row


def initial_states(program: Program) -> list[State]:
    domains = [program.domain(name).values() for name in program.names]
    return [
        state
        for state in itertools.product(*domains)
        if eval_expr(program.init, dict(zip(program.names, state, strict=True)))
    ]


def explicit_semantics(program: Program, bound: int | None = None) -> ExplicitModel:
    """Enumerate the states reachable from every initial evaluation.

    Args:
        program: a validated program.
        bound: largest admissible product of domain sizes.

    Raises:
        ExplicitBoundExceeded: if the state space estimate exceeds ``bound``.
        OverlappingGuards, OutOfDomainUpdate: on ill-formed reachable states.
    """
    bound = config.EXPLICIT_BOUND if bound is None else bound
    estimate = math.prod(program.domain(name).size for name in program.names)
    if estimate > bound:
        raise ExplicitBoundExceeded(f"State space estimate {estimate} exceeds the explicit bound {bound}")

    initial = initial_states(program)
    transitions: dict[State, dict[State, Fraction]] = {}
    queue = deque(initial)
    seen = set(initial)
    while queue:
        state = queue.popleft()
        row = successors(program, state)
        transitions[state] = row
        for target in row:
            if target not in seen:
                seen.add(target)
                queue.append(target)
    logger.debug("Explicit enumeration: %d initial, %d reachable states", len(initial), len(transitions))
    return ExplicitModel(program.names, frozenset(initial), transitions)
