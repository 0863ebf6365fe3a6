"""Module for rendering and writing run reports"""

import csv
import io
import json
import logging
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from helpers import config
from processes.subprocesses.iterative.algorithm import IterationStats

logger = logging.getLogger(__name__)


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """CSV text with ``header`` and ``rows``, newline terminated."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def render_json(data: Any) -> str:
    return json.dumps(data, indent=2) + "\n"


def totals(rows: Sequence[IterationStats]) -> dict[str, str]:
    """Summed model and reorder times."""
    return {
        "model_time_s": f"{sum(row.model_seconds for row in rows):.2f}",
        "reorder_time_s": f"{sum(row.reorder_seconds for row in rows):.2f}",
    }


def iteration_report(
    rows: Sequence[IterationStats],
    fmt: str,
    order: Sequence[str],
    status: str = "completed",
    failed_iteration: int | None = None,
) -> str:
    """Per-iteration statistics followed by a totals line.

    A failed run adds a trailing ``failed`` line holding the iteration that
    could not be built.
    """
    summed = totals(rows)
    if fmt == "csv":
        trailer = [["total", "", "", "", "", summed["model_time_s"], summed["reorder_time_s"]]]
        if failed_iteration is not None:
            trailer.append(["failed", str(failed_iteration), "", "", "", "", ""])
        return render_csv(config.ITERATION_HEADER, [*(row.as_row() for row in rows), *trailer])
    return render_json(
        {
            "rows": [row.to_json() for row in rows],
            "totals": summed,
            "order": list(order),
            "status": status,
            "failed_iteration": failed_iteration,
        }
    )


def build_report(stats: dict[str, Any], fmt: str) -> str:
    if fmt == "csv":
        return render_csv(list(stats), [[_cell(value) for value in stats.values()]])
    return render_json(stats)


def compare_report(cells: Sequence[dict[str, Any]], fmt: str) -> str:
    """Comparison table; the CSV keeps the fixed header, JSON adds each cell's status."""
    if fmt == "csv":
        return render_csv(config.COMPARE_HEADER, [[cell[key] for key in config.COMPARE_HEADER] for cell in cells])
    return render_json({"cells": list(cells)})


def _cell(value: Any) -> str:
    if isinstance(value, list | dict):
        return json.dumps(value)
    return str(value)


def write_output(text: str, out: str | None) -> None:
    """Write ``text`` to ``out``, or to standard output when no path is given."""
    if out is None:
        print(text, end="")
        return
    path = Path(out)
    path.write_text(text, encoding="utf-8")
    logger.info("Wrote %s", path)
