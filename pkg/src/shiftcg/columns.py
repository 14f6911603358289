"""Route columns: one vehicle's full schedule under a chosen shift."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .shifts import Shift


@dataclass(frozen=True)
class StopTime:
    arrival: int
    service_start: int
    departure: int


@dataclass(frozen=True)
class Column:
    """A feasible depot-to-depot route plus its shift and served requests.

    ``reduced_cost_at_birth`` is the pricing cost when the column was found;
    it is bookkeeping only and never re-used by the master problem.
    """

    id: int
    shift: Shift
    stops: tuple[int, ...]
    stop_times: tuple[StopTime, ...]
    served_requests: frozenset[int]
    reduced_cost_at_birth: float = 0.0

    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self.stops, self.stops[1:]))

    def signature(self) -> tuple:
        """Identity for pool dedup: same stops under the same shift."""
        return (self.shift.index, self.shift.start, self.stops)

    def with_id(self, new_id: int) -> "Column":
        return replace(self, id=new_id)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "shift": {"index": self.shift.index, "start": self.shift.start, "end": self.shift.end},
            "stops": list(self.stops),
            "stop_times": [
                [st.arrival, st.service_start, st.departure] for st in self.stop_times
            ],
            "served_requests": sorted(self.served_requests),
        }


def column_from_dict(data: dict) -> Column:
    sh = data["shift"]
    return Column(
        id=int(data["id"]),
        shift=Shift(index=int(sh["index"]), start=int(sh["start"]), end=int(sh["end"])),
        stops=tuple(int(x) for x in data["stops"]),
        stop_times=tuple(StopTime(int(a), int(s), int(d)) for a, s, d in data["stop_times"]),
        served_requests=frozenset(int(r) for r in data["served_requests"]),
    )
