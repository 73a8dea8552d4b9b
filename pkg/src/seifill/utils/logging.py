"""Logging utilities for seifill.

Every CLI invocation and every survey record runs under a short run id so
that interleaved log lines from the survey fan-out can be told apart.
"""

from __future__ import annotations

import logging
import time
import uuid
from contextvars import ContextVar
from typing import Any

log = logging.getLogger("seifill")

_run_id: ContextVar[str | None] = ContextVar("run_id", default=None)


def get_run_id() -> str:
    """Get or create the run id of the current context."""
    run_id = _run_id.get()
    if run_id is None:
        run_id = uuid.uuid4().hex[:8]
        _run_id.set(run_id)
    return run_id


def set_run_id(run_id: str) -> None:
    _run_id.set(run_id)


def clear_run_id() -> None:
    _run_id.set(None)


def configure_logging(debug: bool = False) -> None:
    """Send seifill logs to stderr; reports own stdout."""
    if log.handlers:
        log.setLevel(logging.DEBUG if debug else logging.WARNING)
        return
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.DEBUG if debug else logging.WARNING)


class RunContext:
    """Context manager tagging log lines with a run id and key/value context.

    Example:
        with RunContext(command="decide") as ctx:
            ctx.info("Translated presentation", holes=9)
    """

    def __init__(self, run_id: str | None = None, **initial_context: Any):
        self.run_id = run_id or uuid.uuid4().hex[:8]
        self.context = initial_context
        self.start_time = time.perf_counter()
        self._previous_id: str | None = None

    def __enter__(self) -> RunContext:
        self._previous_id = _run_id.get()
        _run_id.set(self.run_id)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        _run_id.set(self._previous_id)
        return False

    async def __aenter__(self) -> RunContext:
        return self.__enter__()

    async def __aexit__(self, exc_type, exc_val, exc_tb):
        return self.__exit__(exc_type, exc_val, exc_tb)

    @property
    def elapsed(self) -> float:
        """Seconds since the context was created."""
        return time.perf_counter() - self.start_time

    def _format_message(self, msg: str, **extra: Any) -> str:
        all_context = {**self.context, **extra}
        if all_context:
            context_str = " ".join(f"{k}={v}" for k, v in all_context.items())
            return f"[{self.run_id}] {msg} | {context_str}"
        return f"[{self.run_id}] {msg}"

    def debug(self, msg: str, **extra: Any) -> None:
        log.debug(self._format_message(msg, **extra))

    def info(self, msg: str, **extra: Any) -> None:
        log.info(self._format_message(msg, **extra))

    def warning(self, msg: str, **extra: Any) -> None:
        log.warning(self._format_message(msg, **extra))

    def error(self, msg: str, **extra: Any) -> None:
        log.error(self._format_message(msg, **extra))

    def exception(self, msg: str, **extra: Any) -> None:
        log.exception(self._format_message(msg, **extra))
