from __future__ import annotations

import time
from dataclasses import dataclass, field

# Wall-clock checks happen once per this many OPEN pops.
POLL_EVERY = 1024


class PlannerTimeout(RuntimeError):
    pass


@dataclass
class PlannerStats:
    expansions: int = 0
    pops: int = 0
    deletes: int = 0
    generated: int = 0

    def snapshot(self) -> "PlannerStats":
        return PlannerStats(self.expansions, self.pops, self.deletes, self.generated)

    def since(self, before: "PlannerStats") -> "PlannerStats":
        return PlannerStats(
            self.expansions - before.expansions,
            self.pops - before.pops,
            self.deletes - before.deletes,
            self.generated - before.generated,
        )


@dataclass
class Deadline:
    """Cooperative time budget polled from inside planner loops."""

    at: float | None = None
    _ticks: int = field(default=0, repr=False)

    @classmethod
    def after(cls, seconds: float | None) -> "Deadline":
        return cls(None if seconds is None else time.perf_counter() + seconds)

    def tick(self) -> None:
        if self.at is None:
            return
        self._ticks += 1
        if self._ticks % POLL_EVERY == 0 and time.perf_counter() > self.at:
            raise PlannerTimeout("planning task exceeded its time limit")
