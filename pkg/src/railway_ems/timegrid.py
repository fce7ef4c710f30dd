"""Uniform time discretization used by every profile and schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timedelta

from .errors import DataError

HOURS_PER_DAY = 24.0
_DAY_TOL = 1e-9


@dataclass(frozen=True)
class TimeGrid:
    """A uniform grid of `steps` intervals of `dt_hours`, starting at `start`.

    Step t covers the half-open interval [start + t*dt, start + (t+1)*dt).
    Daily grids (the normal case) must cover exactly 24 hours; shorter
    grids are allowed for small test instances.
    """

    start: datetime
    steps: int
    dt_hours: float

    def __post_init__(self):
        if self.steps <= 0:
            raise DataError(f"TimeGrid needs a positive number of steps, got {self.steps}")
        if not (self.dt_hours > 0 and math.isfinite(self.dt_hours)):
            raise DataError(f"TimeGrid needs a positive finite dt_hours, got {self.dt_hours}")

    @classmethod
    def daily(cls, start: datetime, dt_minutes: float = 15.0) -> "TimeGrid":
        """Build a grid covering exactly one day at the given resolution."""
        dt_hours = dt_minutes / 60.0
        steps = round(HOURS_PER_DAY / dt_hours)
        grid = cls(start=start, steps=steps, dt_hours=dt_hours)
        if not grid.is_daily:
            raise DataError(f"{dt_minutes} min does not divide a 24 h day evenly")
        return grid

    @property
    def is_daily(self) -> bool:
        return abs(self.steps * self.dt_hours - HOURS_PER_DAY) <= _DAY_TOL

    @property
    def dt_minutes(self) -> float:
        return self.dt_hours * 60.0

    @property
    def span_hours(self) -> float:
        return self.steps * self.dt_hours

    @property
    def end(self) -> datetime:
        return self.start + timedelta(hours=self.span_hours)

    def time_at(self, t: int) -> datetime:
        """Start timestamp of step t."""
        return self.start + timedelta(hours=t * self.dt_hours)

    def times(self) -> list[datetime]:
        return [self.time_at(t) for t in range(self.steps)]

    def floor_index(self, ts: datetime) -> int:
        """Index of the step containing ts (floor to the step start)."""
        offset = (ts - self.start).total_seconds() / 3600.0
        return math.floor(offset / self.dt_hours + 1e-9)

    def ceil_index(self, ts: datetime) -> int:
        """Smallest step index whose start is at or after ts."""
        offset = (ts - self.start).total_seconds() / 3600.0
        return math.ceil(offset / self.dt_hours - 1e-9)

    def contains(self, ts: datetime) -> bool:
        return self.start <= ts <= self.end

    def require_daily(self, context: str = "") -> None:
        if not self.is_daily:
            where = f" ({context})" if context else ""
            raise DataError(
                f"grid covers {self.span_hours} h but a daily 24 h grid is required{where}"
            )
