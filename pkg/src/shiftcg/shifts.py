"""Driver shift candidate enumeration.

Shifts all share one duration and start on a fixed step grid inside the
operating horizon. When the horizon slack is not a multiple of the step, the
final candidate's start is clamped so its end never overruns the horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Shift:
    index: int
    start: int
    end: int

    @property
    def duration(self) -> int:
        return self.end - self.start


def enumerate_shifts(earliest: int, latest: int, duration: int, step: int) -> list[Shift]:
    """All candidate shifts of the given duration, starts stepped from earliest.

    Candidate k starts at ``earliest + k*step`` for k = 0..ceil(slack/step)
    where slack = latest - earliest - duration; the last start is clamped to
    ``latest - duration``.
    """
    if step <= 0:
        raise ValueError("step must be > 0")
    if duration <= 0:
        raise ValueError("duration must be > 0")
    slack = latest - earliest - duration
    if slack < 0:
        raise ValueError("duration exceeds the operating horizon")
    k_max = math.ceil(slack / step)
    shifts = []
    for k in range(k_max + 1):
        start = min(earliest + k * step, latest - duration)
        shifts.append(Shift(index=k, start=start, end=start + duration))
    return shifts


def shifts_for(instance) -> list[Shift]:
    """Candidate set for an instance's horizon parameters."""
    return enumerate_shifts(
        instance.shift_earliest,
        instance.shift_latest,
        instance.shift_duration,
        instance.shift_step,
    )
