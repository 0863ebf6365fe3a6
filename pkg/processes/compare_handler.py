"""Module to handle the heuristic comparison fan-out"""

import asyncio
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import Any

from helpers import config
from helpers.context_handler import Scope
from helpers.exceptions import ConstructionFailed
from processes.command_handler import RunConfig
from processes.report_handler import compare_report, write_output
from processes.subprocesses.bdd.reorder import SiftConfig
from processes.subprocesses.iterative.algorithm import IterationStats, iterate
from processes.subprocesses.iterative.heuristics import Heuristic
from processes.subprocesses.program.parser import parse
from processes.subprocesses.symbolic.builder import Budget

logger = logging.getLogger(__name__)


def _cell(selection: str, step: int, rows: list[IterationStats], status: str) -> dict[str, Any]:
    last = rows[-1] if rows else None
    return {
        "selection": selection,
        "step": step,
        "iterations": last.iteration if last else 0,
        "combinations": str(last.combinations) if last else "0",
        "states": str(last.states) if last else "0",
        "nodes": last.nodes_after if last else 0,
        "status": status,
    }


def run_cell(
    source: str,
    selection: str,
    step: int,
    node_limit: int,
    time_limit: float | None,
    passes: int,
    deadline: float | None,
) -> dict[str, Any]:
    """One comparison cell, run in a worker process with its own engine instance.

    Args:
        source: program text; parsed again in the worker.
        selection: variable selection heuristic.
        step: growth sub-steps per iteration.
        node_limit: node limit of each construction.
        time_limit: time limit of each construction.
        passes: sifting passes.
        deadline: shared ``time.monotonic()`` snapshot deadline.

    Returns:
        dict: The table row plus a ``status`` entry.
    """
    program = parse(source)
    with Scope(fresh=True, selection=selection, step=step):
        try:
            result = iterate(
                program,
                heuristic=Heuristic(selection, step),
                budget=Budget(node_limit, time_limit),
                sift=SiftConfig(passes=passes),
                deadline=deadline,
            )
        except ConstructionFailed as e:
            return _cell(selection, step, e.rows, f"failed at iteration {e.iteration}: {e.cause}")
    return _cell(selection, step, result.rows, "completed" if result.completed else "truncated")


async def compare(cfg: RunConfig, source: str) -> list[dict[str, Any]]:
    """
    Run every selection and step size concurrently, bounded by the worker count.

    Args:
        cfg (RunConfig): Run settings; ``deadline`` is in seconds from now.
        source (str): Program text.

    Returns:
        list[dict]: One row per cell, in selection-major order.
    """
    deadline = time.monotonic() + (cfg.deadline if cfg.deadline is not None else config.COMPARE_DEADLINE)
    sem = asyncio.Semaphore(cfg.workers)
    loop = asyncio.get_running_loop()

    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:

        async def run_one(selection: str, step: int) -> dict[str, Any]:
            job = partial(run_cell, source, selection, step, cfg.node_limit, cfg.time_limit, cfg.passes, deadline)
            async with sem:
                logger.info("Starting %s with step %d", selection, step)
                try:
                    cell = await loop.run_in_executor(pool, job)
                except Exception as e:
                    logger.warning("Cell %s/%d failed: %s", selection, step, e)
                    return _cell(selection, step, [], f"failed: {e}")
            if cell["status"] != "completed":
                logger.warning("Cell %s/%d %s", selection, step, cell["status"])
            else:
                logger.info("Cell %s/%d completed after %d iterations", selection, step, cell["iterations"])
            return cell

        cells = await asyncio.gather(*(run_one(s, n) for s in cfg.selections for n in cfg.steps))

    completed = sum(1 for cell in cells if cell["status"] == "completed")
    logger.info("Summary: %d completed, %d not completed out of %d", completed, len(cells) - completed, len(cells))
    return list(cells)


def cmd_compare(cfg: RunConfig) -> int:
    """Fan out the heuristic comparison and write the table."""
    source = Path(cfg.input).read_text(encoding="utf-8")
    parse(source)
    cells = asyncio.run(compare(cfg, source))
    write_output(compare_report(cells, cfg.fmt), cfg.out)
    return config.EXIT_OK
