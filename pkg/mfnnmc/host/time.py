"""Timestamps for run artifacts and per-phase process timers for the cost ledger."""

import time
from contextlib import contextmanager
from datetime import datetime, timezone
from typing import Iterator


def now_iso() -> str:
    """Current UTC time as an ISO 8601 string (``created_at`` in result.json)."""
    return datetime.now(timezone.utc).isoformat()


class PhaseTimer:
    """Accumulates process time per named phase.

    Phases are the cost-ledger terms (lf_solves, hf_solves, train_nn1, ...)
    plus "pilot", which is timed but kept out of the ledger.

    Usage:
        timer = PhaseTimer()
        with timer.phase("lf_solves"):
            ...
        timer.seconds["lf_solves"]
    """

    def __init__(self) -> None:
        self.seconds: dict[str, float] = {}

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        start = time.process_time()
        try:
            yield
        finally:
            elapsed = time.process_time() - start
            self.seconds[name] = self.seconds.get(name, 0.0) + max(elapsed, 0.0)

    def get(self, name: str) -> float:
        return self.seconds.get(name, 0.0)
