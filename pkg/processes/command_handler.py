"""Module to handle the gen, build and iterate commands"""

import argparse
import logging
import time
from dataclasses import dataclass
from pathlib import Path

from helpers import config
from helpers.exceptions import ConstructionFailed
from processes.report_handler import build_report, iteration_report, render_json, write_output
from processes.subprocesses.bdd.reorder import SiftConfig, VarOrder
from processes.subprocesses.family.generator import GenConfig, generate
from processes.subprocesses.iterative.algorithm import iterate
from processes.subprocesses.iterative.heuristics import Heuristic
from processes.subprocesses.program.explicit import explicit_semantics
from processes.subprocesses.program.model import Program
from processes.subprocesses.program.parser import parse
from processes.subprocesses.symbolic.builder import Budget, check_stochastic, construct

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    """Settings of one command-line run."""

    command: str
    input: str | None = None
    heuristic: str = config.DEFAULT_HEURISTIC
    step: int = config.DEFAULT_STEP
    node_limit: int = config.NODE_LIMIT
    time_limit: float | None = config.TIME_LIMIT
    deadline: float | None = None
    fmt: str = "csv"
    out: str | None = None
    workers: int = config.WORKERS
    passes: int = config.SIFT_PASSES
    order: str | None = None
    order_out: str | None = None
    explicit_bound: int | None = None
    selections: tuple[str, ...] = config.COMPARE_SELECTIONS
    steps: tuple[int, ...] = config.COMPARE_STEPS
    blocks: int = 1
    p: float = 0.01
    mechanisms: tuple[str, ...] = config.MECHANISMS
    seed: int = 0
    jitter: float = 0.0

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        known = cls.__dataclass_fields__
        return cls(**{key: value for key, value in vars(args).items() if key in known and value is not None})

    @property
    def budget(self) -> Budget:
        return Budget(node_limit=self.node_limit, time_limit=self.time_limit)

    @property
    def sift(self) -> SiftConfig:
        return SiftConfig(passes=self.passes)


def read_program(path: str) -> Program:
    """Parse the UTF-8 program file at ``path``."""
    logger.info("Reading program from %s", path)
    return parse(Path(path).read_text(encoding="utf-8"))


def load_order(cfg: RunConfig, program: Program) -> VarOrder:
    """Order from ``--order``, declaration order otherwise."""
    if cfg.order is None:
        return VarOrder(program.names)
    order = VarOrder.from_json(Path(cfg.order).read_text(encoding="utf-8"))
    order.check_covers(program.names)
    return order


def cmd_gen(cfg: RunConfig) -> int:
    """Generate a benchmark family and its metadata sidecar."""
    family = generate(
        GenConfig(
            blocks=cfg.blocks,
            p=cfg.p,
            mechanisms=cfg.mechanisms,
            seed=cfg.seed,
            jitter=cfg.jitter,
        )
    )
    write_output(family.source, cfg.out)
    if cfg.out is not None:
        path = Path(cfg.out)
        write_output(render_json(family.metadata), str(path.with_name(f"{path.stem}.meta.json")))
    else:
        logger.info("Family size %s", family.metadata["family_size"])
    return config.EXIT_OK


def cmd_build(cfg: RunConfig) -> int:
    """Construct the model under one order and report its statistics."""
    program = read_program(cfg.input)
    order = load_order(cfg, program)
    model = construct(program, order, cfg.budget)
    stats = model.stats.to_json()
    stats["order"] = list(order.variables)
    stats["max_row_deviation"] = check_stochastic(model)
    if cfg.explicit_bound is not None:
        stats["explicit_states"] = str(explicit_semantics(program, cfg.explicit_bound).num_states)
    write_output(build_report(stats, cfg.fmt), cfg.out)
    return config.EXIT_OK


def cmd_iterate(cfg: RunConfig) -> int:
    """Run iterative reordering and report one row per construction."""
    program = read_program(cfg.input)
    pi = load_order(cfg, program)
    heuristic = Heuristic(cfg.heuristic, cfg.step)
    deadline = time.monotonic() + cfg.deadline if cfg.deadline is not None else None
    try:
        result = iterate(program, pi, heuristic=heuristic, budget=cfg.budget, sift=cfg.sift, deadline=deadline)
    except ConstructionFailed as e:
        order = e.order.variables if e.order is not None else pi.variables
        write_output(iteration_report(e.rows, cfg.fmt, order, "failed", e.iteration), cfg.out)
        _write_order(cfg, order)
        raise

    status = "completed" if result.completed else "truncated"
    write_output(iteration_report(result.rows, cfg.fmt, result.order.variables, status), cfg.out)
    _write_order(cfg, result.order.variables)
    logger.info("Final order: %s", list(result.order.variables))
    return config.EXIT_OK


def _write_order(cfg: RunConfig, order: tuple[str, ...]) -> None:
    if cfg.order_out is None:
        return
    write_output(VarOrder(order).to_json() + "\n", cfg.order_out)
