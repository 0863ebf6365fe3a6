"""Helper module for logger setup"""

import logging

from helpers import config


def init_logger(verbose: bool = False) -> None:
    """Initialize the root logger."""
    level = logging.DEBUG if verbose else getattr(logging, config.LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)s] %(module)s.%(funcName)s:%(lineno)d — %(message)s",
        datefmt="%H:%M:%S",
        force=True,
    )
