"""Run context held in a context variable.

The builder records the construction phase, the iterative loop the iteration
index and the compare fan-out its cell, so budget errors raised deep inside
the engine can say where they happened.
"""

from __future__ import annotations

from contextvars import ContextVar
from typing import Any

KEYS = ("command", "selection", "step", "iteration", "phase")

_run: ContextVar[dict[str, Any] | None] = ContextVar("run_context", default=None)


def current(key: str, default: Any = None) -> Any:
    """Value of ``key`` in the innermost scope."""
    return (_run.get() or {}).get(key, default)


def describe() -> str:
    """``key=value`` pairs of the known keys that are set, outermost first."""
    ctx = _run.get() or {}
    return " ".join(f"{key}={ctx[key]}" for key in KEYS if ctx.get(key) is not None)


class Scope:
    """Context manager layering values over the enclosing run context.

    ``fresh`` starts from an empty context, as a command or a compare cell does.
    """

    def __init__(self, fresh: bool = False, **values: Any) -> None:
        self.fresh = fresh
        self.values = values
        self._token = None

    def __enter__(self) -> dict[str, Any]:
        base = {} if self.fresh else _run.get() or {}
        ctx = {**base, **self.values}
        self._token = _run.set(ctx)
        return ctx

    def __exit__(self, *exc_info: object) -> None:
        if self._token is not None:
            _run.reset(self._token)
            self._token = None
