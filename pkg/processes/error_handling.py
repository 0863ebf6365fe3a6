"""Module for handling errors"""

import json
import logging
from dataclasses import dataclass

from mbu_rpa_core.exceptions import BusinessError, ProcessError

from helpers import config
from helpers.exceptions import (
    ConstructionFailed,
    NodeLimitExceeded,
    ParseError,
    TimeBudgetExceeded,
    ValidationError,
)

logger = logging.getLogger(__name__)


@dataclass
class ErrorContext:
    """Context for error handling"""

    command: str | None = None
    source: str | None = None


def exit_code_for(error: BaseException) -> int:
    """Exit code documented for ``error``."""
    if isinstance(error, ParseError | ValidationError):
        return config.EXIT_PARSE_ERROR
    if isinstance(error, NodeLimitExceeded):
        return config.EXIT_NODE_LIMIT
    if isinstance(error, TimeBudgetExceeded):
        return config.EXIT_TIME_LIMIT
    if isinstance(error, ConstructionFailed):
        return config.EXIT_CONSTRUCTION_FAILED
    if isinstance(error, BusinessError):
        return config.EXIT_BUSINESS_ERROR
    return config.EXIT_PROCESS_ERROR


def handle_error(
    error: ProcessError | BusinessError,
    log,
    context: ErrorContext | None = None,
) -> int:
    """
    Function to log error and resolve the exit code.
    Args:
        error (ProcessError | BusinessError): The error to handle.
        log (function): Logging function to log messages.
        context (ErrorContext): Context object containing additional parameters.
    Returns:
        int: The exit code for the error.
    """
    if context is None:
        context = ErrorContext()
    error_json = json.dumps(error.__dictinfo__(), default=str)
    log_msg = f"Error: {error}"
    if context.command:
        target = f" for {context.source}" if context.source else ""
        log_msg = f"{repr(error)} raised in {context.command}{target}. " + log_msg
    where = getattr(error, "where", None) or getattr(getattr(error, "cause", None), "where", None)
    if where:
        log_msg += f" [{where}]"
    log(log_msg)
    logger.debug("Error details: %s", error_json)
    return exit_code_for(error)
