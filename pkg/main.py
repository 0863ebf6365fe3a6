"""
This is the main entry point for the toolkit
"""

import argparse
import logging
import sys
from collections.abc import Callable

from mbu_rpa_core.exceptions import BusinessError, ProcessError

from helpers import config
from helpers.context_handler import Scope
from helpers.log_functions import init_logger
from processes.command_handler import RunConfig, cmd_build, cmd_gen, cmd_iterate
from processes.compare_handler import cmd_compare
from processes.error_handling import ErrorContext, handle_error

logger = logging.getLogger(__name__)

COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    "gen": cmd_gen,
    "build": cmd_build,
    "iterate": cmd_iterate,
    "compare": cmd_compare,
}


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _non_negative_float(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text}")
    return value


def _names(choices: tuple[str, ...]) -> Callable[[str], tuple[str, ...]]:
    def parse(text: str) -> tuple[str, ...]:
        names = tuple(name.strip() for name in text.split(",") if name.strip())
        unknown = set(names) - set(choices)
        if not names or unknown:
            raise argparse.ArgumentTypeError(f"expected a comma-separated subset of {', '.join(choices)}")
        return names

    return parse


def _steps(text: str) -> tuple[int, ...]:
    return tuple(_positive_int(part) for part in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="family-reorder", description="Iterative variable reordering for family models")
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    sub = parser.add_subparsers(dest="command", required=True)

    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument("--node-limit", type=_positive_int, help="live node limit of the engine")
    budget.add_argument("--time-limit", type=_positive_float, help="seconds per construction")
    budget.add_argument("--out", help="output path, standard output by default")

    gen = sub.add_parser("gen", parents=[budget], help="generate a redundancy family")
    gen.add_argument("-m", "--blocks", type=_positive_int, required=True)
    gen.add_argument("-p", "--p", type=float, required=True, help="fault probability per replica execution")
    gen.add_argument("--mechanisms", type=_names(config.MECHANISMS))
    gen.add_argument("--seed", type=int)
    gen.add_argument("--jitter", type=_non_negative_float, help="relative per-block probability jitter")

    build = sub.add_parser("build", parents=[budget], help="construct the model under one order")
    build.add_argument("input")
    build.add_argument("--order", help="JSON array of variable names")
    build.add_argument("--explicit-bound", type=_positive_int, help="also count states explicitly")
    build.add_argument("--format", dest="fmt", choices=("csv", "json"), default="json")

    iterate = sub.add_parser("iterate", parents=[budget], help="run iterative reordering")
    iterate.add_argument("input")
    iterate.add_argument("--heuristic", choices=config.COMPARE_SELECTIONS)
    iterate.add_argument("--step", type=_positive_int)
    iterate.add_argument("--deadline", type=_non_negative_float, help="seconds before growth stops")
    iterate.add_argument("--passes", type=_positive_int, help="sifting passes")
    iterate.add_argument("--order", help="JSON array of variable names")
    iterate.add_argument("--order-out", help="write the final order as JSON")
    iterate.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")

    compare = sub.add_parser("compare", parents=[budget], help="compare selection heuristics and step sizes")
    compare.add_argument("input")
    compare.add_argument("--selections", type=_names(config.COMPARE_SELECTIONS))
    compare.add_argument("--steps", type=_steps)
    compare.add_argument("--deadline", type=_non_negative_float, help="snapshot deadline in seconds")
    compare.add_argument("--workers", type=_positive_int)
    compare.add_argument("--passes", type=_positive_int, help="sifting passes")
    compare.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    return parser


def run(argv: list[str] | None = None) -> int:
    """Parse ``argv``, run the command and return its exit code."""
    args = build_parser().parse_args(argv)
    init_logger(args.verbose)
    cfg = RunConfig.from_args(args)
    context = ErrorContext(command=cfg.command, source=cfg.input)

    try:
        with Scope(fresh=True, command=cfg.command):
            return COMMANDS[cfg.command](cfg)

    except BusinessError as e:
        return handle_error(error=e, log=logger.error, context=context)

    except ProcessError as e:
        return handle_error(error=e, log=logger.error, context=context)

    except Exception as e:
        pe = ProcessError(str(e))
        logger.exception("Unexpected error")
        return handle_error(error=pe, log=logger.error, context=context)


if __name__ == "__main__":
    sys.exit(run())
