"""Construction of the symbolic family model: initial states, transition matrix, reachable states."""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass, field, replace
from typing import Any

from helpers import config
from helpers.context_handler import Scope
from helpers.exceptions import EvaluationError, InvalidConfig, OutOfDomainUpdate, OverlappingGuards
from processes.subprocesses.bdd.engine import NodeRef, NodeTable
from processes.subprocesses.bdd.reorder import VarOrder, rebuild_under
from processes.subprocesses.program.model import Expr, Program, Update
from processes.subprocesses.symbolic.encoding import Encoding, Side, VarEncoding, encode
from processes.subprocesses.symbolic.expressions import Translator

logger = logging.getLogger(__name__)

State = tuple[int, ...]


@dataclass(frozen=True)
class Budget:
    """Resource limits of one construction."""

    node_limit: int = field(default_factory=lambda: config.NODE_LIMIT)
    time_limit: float | None = field(default_factory=lambda: config.TIME_LIMIT)

    def __post_init__(self) -> None:
        if self.node_limit < 1:
            raise InvalidConfig(f"Node limit must be positive, got {self.node_limit}")
        if self.time_limit is not None and self.time_limit <= 0:
            raise InvalidConfig(f"Time limit must be positive, got {self.time_limit}")


@dataclass(frozen=True)
class ModelStats:
    states: int
    init_nodes: int
    trans_nodes: int
    reach_nodes: int
    model_nodes: int
    peak_nodes: int
    build_seconds: float
    iterations: int

    def to_json(self) -> dict[str, Any]:
        return {
            "states": str(self.states),
            "trans_nodes": self.trans_nodes,
            "init_nodes": self.init_nodes,
            "reach_nodes": self.reach_nodes,
            "model_nodes": self.model_nodes,
            "peak_nodes": self.peak_nodes,
            "build_seconds": round(self.build_seconds, 2),
            "iterations": self.iterations,
        }


@dataclass
class SymbolicModel:
    """Symbolic representation of a program under one variable order."""

    program: Program
    encoding: Encoding
    table: NodeTable
    init: NodeRef
    trans: NodeRef
    reach: NodeRef
    stats: ModelStats

    @property
    def order(self) -> VarOrder:
        return self.encoding.order

    @property
    def roots(self) -> list[NodeRef]:
        return [self.trans, self.reach, self.init]

    def size(self) -> int:
        """Shared node count of the transition matrix, reachable set and init set."""
        return self.table.shared_size(self.roots)

    def rebuilt_under(self, order: VarOrder) -> SymbolicModel:
        """Same model copied into a fresh table laid out by ``order``."""
        table, (trans, reach, init) = rebuild_under(self.table, self.roots, order)
        model = SymbolicModel(self.program, encode(self.program, order), table, init, trans, reach, self.stats)
        model.stats = replace(
            self.stats,
            init_nodes=table.size(init),
            trans_nodes=table.size(trans),
            reach_nodes=table.size(reach),
            model_nodes=model.size(),
            peak_nodes=table.peak_nodes,
        )
        return model


def _identity(table: NodeTable, var: VarEncoding) -> NodeRef:
    result = table.true
    for row, column in reversed(list(zip(var.bits(Side.ROW), var.bits(Side.COLUMN), strict=True))):
        result = table.negate(table.var(row) ^ table.var(column)) & result
    return result


def _assignment(program: Program, rows: Translator, columns: Translator, name: str, expr: Expr) -> NodeRef:
    """Relation of ``name' = expr`` on the encodings where the new value is defined and in the domain."""
    table = rows.table
    parts, _ = rows.partial_partition(expr)
    relation = table.false
    for value, region in parts.items():
        if value in program.domain(name):
            relation = relation | (region & columns.value(name, value))
    return relation


def _image(program: Program, rows: Translator, columns: Translator, source: NodeRef, update: Update) -> NodeRef:
    """Row states reached from ``source`` by ``update``; unassigned variables keep their bits."""
    assigned = update.as_dict()
    if not assigned:
        return source
    table, encoding = rows.table, rows.encoding
    relation = table.true
    for name in reversed(encoding.order.variables):
        if name in assigned:
            relation = _assignment(program, rows, columns, name, assigned[name]) & relation
    moved = [encoding[name] for name in assigned]
    image = table.and_abstract(source, relation, [bit for var in moved for bit in var.bits(Side.ROW)])
    back = {
        column: row
        for var in moved
        for column, row in zip(var.bits(Side.COLUMN), var.bits(Side.ROW), strict=True)
    }
    return table.rename(image, back)


def _explore(program: Program, rows: Translator, columns: Translator, init: NodeRef) -> tuple[NodeRef, int]:
    """Frontier fixpoint from ``init``, taking the image of each command branch separately."""
    table = rows.table
    reach = frontier = init
    steps = 0
    while frontier != table.false:
        steps += 1
        image = table.false
        for command in program.commands:
            guard, undefined = rows.partial_boolean(command.guard)
            source = table.apply("diff", frontier & guard, undefined)
            if source == table.false:
                continue
            for branch in command.branches:
                image = image | _image(program, rows, columns, source, branch.update)
        frontier = table.apply("diff", image, reach)
        reach = reach | frontier
        logger.debug("Reachability step %d: %d nodes", steps, table.size(reach))
    return reach, steps


def _witness(table: NodeTable, encoding: Encoding, region: NodeRef) -> dict[str, int] | None:
    if region == table.false:
        return None
    assignment = next(table.iter_assignments(region, encoding.side_bits(Side.ROW)))
    return encoding.decode_evaluation(assignment)


def _check_commands(program: Program, rows: Translator, care: NodeRef) -> NodeRef:
    """Reject ill-formed ``care`` states; returns the care states that enable no command.

    Raises:
        EvaluationError: if a guard or an update divides by zero.
        OverlappingGuards: if two commands are enabled in one state.
        OutOfDomainUpdate: if an update leaves a variable's domain.
    """
    table, encoding = rows.table, rows.encoding
    enabled = table.false
    for number, command in enumerate(program.commands):
        guard, undefined = rows.partial_boolean(command.guard)
        if (state := _witness(table, encoding, undefined & care)) is not None:
            raise EvaluationError(f"Guard of command {number} divides by zero in state {state}")
        guard = guard & care
        if guard == table.false:
            logger.debug("Command %d is never enabled", number)
            continue
        if (state := _witness(table, encoding, enabled & guard)) is not None:
            raise OverlappingGuards(f"Several commands are enabled in state {state}", state=state)
        enabled = enabled | guard
        for branch in command.branches:
            for name, expr in branch.update.as_dict().items():
                parts, undefined = rows.partial_partition(expr)
                if (state := _witness(table, encoding, undefined & guard)) is not None:
                    raise EvaluationError(f"Update of {name} in command {number} divides by zero in state {state}")
                leaving = table.false
                for value, region in parts.items():
                    if value not in program.domain(name):
                        leaving = leaving | region
                if (state := _witness(table, encoding, leaving & guard)) is not None:
                    raise OutOfDomainUpdate(
                        f"Command {number} moves {name} out of its domain in state {state}",
                        state=state,
                        command=number,
                    )
    return table.apply("diff", care, enabled)


def _matrix(program: Program, rows: Translator, columns: Translator, care: NodeRef, deadlocks: NodeRef) -> NodeRef:
    """Transition matrix with rows restricted to ``care``, self-loops on ``deadlocks``."""
    table, encoding = rows.table, rows.encoding
    matrix = table.const(0.0)
    for number, command in enumerate(program.commands):
        guard, _ = rows.partial_boolean(command.guard)
        source = guard & care
        if source == table.false:
            continue
        for branch in command.branches:
            assigned = branch.update.as_dict()
            relation = source
            for name in reversed(encoding.order.variables):
                if name in assigned:
                    relation = relation & _assignment(program, rows, columns, name, assigned[name])
                else:
                    relation = relation & _identity(table, encoding[name])
            weighted = table.apply("times", table.const(float(branch.probability)), table.to_real(relation))
            matrix = table.apply("plus", matrix, weighted)
        logger.debug("Command %d added, matrix has %d nodes", number, table.size(matrix))
    if deadlocks == table.false:
        return matrix
    loops = deadlocks
    for var in encoding.variables:
        loops = loops & _identity(table, var)
    logger.debug("Closing %d deadlock states with self-loops", table.sat_count(deadlocks, encoding.side_bits(Side.ROW)))
    return table.apply("plus", matrix, table.to_real(loops))


def build_init(program: Program, encoding: Encoding, table: NodeTable) -> NodeRef:
    """Initial states: encodings satisfying the init expression, all variables in range."""
    return Translator(table, encoding).expr_to_bdd(program.init)


def build_transition(program: Program, encoding: Encoding, table: NodeTable, care: NodeRef | None = None) -> NodeRef:
    """Transition-probability matrix over row and column bits.

    Args:
        program: a validated program.
        encoding: its encoding; ``table`` must be laid out for it.
        table: table to build in.
        care: row states whose guards and updates are checked and whose
            matrix rows are built; all in-range states by default.

    Raises:
        EvaluationError: if a guard or update divides by zero in a care state.
        OverlappingGuards: if two commands are enabled in a care state.
        OutOfDomainUpdate: if an update leaves a domain from a care state.
    """
    rows = Translator(table, encoding)
    columns = Translator(table, encoding, Side.COLUMN)
    care = rows.all_ranges() if care is None else care
    deadlocks = _check_commands(program, rows, care)
    return _matrix(program, rows, columns, care, deadlocks)


def reachable(table: NodeTable, encoding: Encoding, init: NodeRef, trans: NodeRef) -> tuple[NodeRef, int, int]:
    """Least fixpoint of the image operator of a built matrix from ``init``.

    Returns:
        The reachable set, its exact state count and the number of image steps.
    """
    row_bits = encoding.side_bits(Side.ROW)
    relation = table.greater_than_zero(trans)
    reach = frontier = init
    steps = 0
    while frontier != table.false:
        steps += 1
        image = table.rename(table.and_abstract(frontier, relation, row_bits), encoding.column_to_row)
        frontier = table.apply("diff", image, reach)
        reach = reach | frontier
    return reach, table.sat_count(reach, row_bits), steps


def construct(program: Program, order: VarOrder | None = None, budget: Budget | None = None) -> SymbolicModel:
    """Build the symbolic model of ``program`` under ``order`` within ``budget``.

    Reachable states are explored first, one command branch at a time, and
    the transition matrix is built for them only.

    Raises:
        NodeLimitExceeded, TimeBudgetExceeded: tagged with the phase in which
            the budget ran out.
        EvaluationError, OverlappingGuards, OutOfDomainUpdate: on ill-formed
            reachable states.
    """
    order = order or VarOrder(program.names)
    budget = budget or Budget()
    started = time.perf_counter()

    with Scope(phase="encode"):
        encoding = encode(program, order)
        table = encoding.new_table(budget.node_limit, budget.time_limit)
    rows = Translator(table, encoding)
    columns = Translator(table, encoding, Side.COLUMN)
    with Scope(phase="init"):
        init = rows.expr_to_bdd(program.init)
    with Scope(phase="reachability"):
        reach, steps = _explore(program, rows, columns, init)
        states = table.sat_count(reach, encoding.side_bits(Side.ROW))
    with Scope(phase="well-formedness"):
        deadlocks = _check_commands(program, rows, reach)
    with Scope(phase="transition"):
        trans = _matrix(program, rows, columns, reach, deadlocks)

    del rows, columns, deadlocks
    table.collect_garbage()
    stats = ModelStats(
        states=states,
        init_nodes=table.size(init),
        trans_nodes=table.size(trans),
        reach_nodes=table.size(reach),
        model_nodes=table.shared_size([trans, reach, init]),
        peak_nodes=table.peak_nodes,
        build_seconds=time.perf_counter() - started,
        iterations=steps,
    )
    model = SymbolicModel(program, encoding, table, init, trans, reach, stats)
    logger.info(
        "Built model under %s: %d states, %d nodes in %.2f s",
        list(order.variables),
        states,
        model.stats.model_nodes,
        model.stats.build_seconds,
    )
    return model


def check_stochastic(model: SymbolicModel) -> float:
    """Largest deviation from 1 of a reachable row sum."""
    table = model.table
    row_sums = table.sum_abstract(model.trans, model.encoding.side_bits(Side.COLUMN))
    restricted = table.ite(model.reach, row_sums, table.const(1.0))
    return max(abs(value - 1.0) for value in table.terminal_values(restricted))


def reachable_states(model: SymbolicModel) -> list[State]:
    """Decoded reachable states, value tuples in declaration order."""
    bits = model.encoding.side_bits(Side.ROW)
    return sorted(model.encoding.decode(a) for a in model.table.iter_assignments(model.reach, bits))


def transition_entries(model: SymbolicModel) -> dict[tuple[State, State], float]:
    """Non-zero matrix entries with a reachable source, for comparison with explicit semantics."""
    table, encoding = model.table, model.encoding
    masked = table.apply("times", table.to_real(model.reach), model.trans)
    bits = encoding.side_bits(Side.ROW) + encoding.side_bits(Side.COLUMN)
    entries: dict[tuple[State, State], float] = {}
    for cube, value in table.iter_paths(masked):
        free = [bit for bit in bits if bit not in cube]
        for values in itertools.product((False, True), repeat=len(free)):
            full = {**cube, **dict(zip(free, values, strict=True))}
            entries[(encoding.decode(full, Side.ROW), encoding.decode(full, Side.COLUMN))] = float(value)
    return entries
