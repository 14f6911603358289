"""Problem input model: riders, trip requests, fleet and shift parameters.

An instance is a set of riders, each owning one or more trip requests.
Serving a rider is all-or-nothing: either every one of their requests is
scheduled or none is. Times are integer minutes from midnight throughout,
which keeps window comparisons exact.

This module also provides a seeded synthetic generator (real dispatch data
is not shipped) and the JSON (de)serialization used by every CLI command.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geo import drive_minutes

FORMAT_VERSION = 1

GeoPoint = tuple[float, float]


class InstanceError(ValueError):
    """Raised when an instance file or config violates a documented invariant."""


@dataclass(frozen=True)
class TripRequest:
    id: int
    rider_id: int
    origin: GeoPoint
    destination: GeoPoint
    pickup_window: tuple[int, int]
    dropoff_window: tuple[int, int]
    service_time: int = 0
    demand: int = 1


@dataclass(frozen=True)
class Rider:
    id: int
    request_ids: tuple[int, ...]


@dataclass(frozen=True)
class Instance:
    riders: tuple[Rider, ...]
    requests: tuple[TripRequest, ...]
    depot: GeoPoint
    capacity: int
    fleet_size: int
    omega: int
    shift_earliest: int
    shift_latest: int
    shift_duration: int
    shift_step: int
    speed: float
    seed: int = 0

    @property
    def n(self) -> int:
        return len(self.requests)

    def request(self, request_id: int) -> TripRequest:
        return self.requests[request_id - 1]

    def rider_of(self, request_id: int) -> Rider:
        return next(u for u in self.riders if request_id in u.request_ids)

    def validate(self) -> None:
        """Check every structural invariant; raise InstanceError naming the field."""
        if self.n < 1:
            raise InstanceError("requests: at least one trip request is required")
        if self.capacity < 1:
            raise InstanceError("capacity: must be >= 1")
        if self.shift_step <= 0:
            raise InstanceError("shift_step: must be > 0")
        if self.shift_duration <= 0:
            raise InstanceError("shift_duration: must be > 0")
        if self.shift_earliest + self.shift_duration > self.shift_latest:
            raise InstanceError(
                "shift_duration: shift_earliest + shift_duration exceeds shift_latest"
            )
        if self.omega < 1:
            raise InstanceError("omega: must be >= 1")
        if self.fleet_size < 1:
            raise InstanceError("fleet_size: must be >= 1")
        if self.speed <= 0:
            raise InstanceError("speed: must be > 0")

        ids = [r.id for r in self.requests]
        if ids != list(range(1, self.n + 1)):
            raise InstanceError("requests: ids must be exactly 1..n in order")
        owners: dict[int, int] = {}
        for u in self.riders:
            if not u.request_ids:
                raise InstanceError(f"rider {u.id}: request_ids must be nonempty")
            for rid in u.request_ids:
                if rid in owners:
                    raise InstanceError(
                        f"request {rid}: owned by riders {owners[rid]} and {u.id}"
                    )
                owners[rid] = u.id
        for r in self.requests:
            if r.id not in owners:
                raise InstanceError(f"request {r.id}: not owned by any rider")
            if owners[r.id] != r.rider_id:
                raise InstanceError(f"request {r.id}: rider_id does not match owner")
            if r.pickup_window[0] > r.pickup_window[1]:
                raise InstanceError(f"request {r.id}: pickup_window start exceeds end")
            if r.dropoff_window[0] > r.dropoff_window[1]:
                raise InstanceError(f"request {r.id}: dropoff_window start exceeds end")
            if r.service_time < 0:
                raise InstanceError(f"request {r.id}: service_time must be >= 0")
            if r.demand < 1:
                raise InstanceError(f"request {r.id}: demand must be >= 1")
            if r.demand > self.capacity:
                raise InstanceError(
                    f"request {r.id}: demand {r.demand} exceeds capacity {self.capacity}"
                )

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "depot": list(self.depot),
            "capacity": self.capacity,
            "fleet_size": self.fleet_size,
            "omega": self.omega,
            "shift_earliest": self.shift_earliest,
            "shift_latest": self.shift_latest,
            "shift_duration": self.shift_duration,
            "shift_step": self.shift_step,
            "speed": self.speed,
            "seed": self.seed,
            "riders": [
                {"id": u.id, "request_ids": list(u.request_ids)} for u in self.riders
            ],
            "requests": [
                {
                    "id": r.id,
                    "rider_id": r.rider_id,
                    "origin": list(r.origin),
                    "destination": list(r.destination),
                    "pickup_window": list(r.pickup_window),
                    "dropoff_window": list(r.dropoff_window),
                    "service_time": r.service_time,
                    "demand": r.demand,
                }
                for r in self.requests
            ],
        }

    def to_json(self) -> str:
        return canonical_dumps(self.to_dict())


def canonical_dumps(obj) -> str:
    """Stable JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"


def instance_from_dict(data: dict) -> Instance:
    try:
        version = data["format_version"]
        if version != FORMAT_VERSION:
            raise InstanceError(f"format_version: unsupported value {version!r}")
        riders = tuple(
            Rider(id=int(u["id"]), request_ids=tuple(int(x) for x in u["request_ids"]))
            for u in data["riders"]
        )
        requests = tuple(
            TripRequest(
                id=int(r["id"]),
                rider_id=int(r["rider_id"]),
                origin=(float(r["origin"][0]), float(r["origin"][1])),
                destination=(float(r["destination"][0]), float(r["destination"][1])),
                pickup_window=(int(r["pickup_window"][0]), int(r["pickup_window"][1])),
                dropoff_window=(int(r["dropoff_window"][0]), int(r["dropoff_window"][1])),
                service_time=int(r.get("service_time", 0)),
                demand=int(r.get("demand", 1)),
            )
            for r in data["requests"]
        )
        fleet_raw = data["fleet_size"]
        if fleet_raw == "auto":
            fleet = fleet_size(len(requests), int(data["omega"]))
        else:
            fleet = int(fleet_raw)
        inst = Instance(
            riders=riders,
            requests=requests,
            depot=(float(data["depot"][0]), float(data["depot"][1])),
            capacity=int(data["capacity"]),
            fleet_size=fleet,
            omega=int(data["omega"]),
            shift_earliest=int(data["shift_earliest"]),
            shift_latest=int(data["shift_latest"]),
            shift_duration=int(data["shift_duration"]),
            shift_step=int(data["shift_step"]),
            speed=float(data["speed"]),
            seed=int(data.get("seed", 0)),
        )
    except KeyError as exc:
        raise InstanceError(f"missing field {exc.args[0]!r}") from exc
    inst.validate()
    return inst


def load_instance(path: str | Path) -> Instance:
    """Load and validate an instance JSON file."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: not valid JSON ({exc})") from exc
    return instance_from_dict(data)


def save_instance(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(instance.to_json())


def fleet_size(n_requests: int, omega: int) -> int:
    """Driver count from request volume: ceil(n_requests / omega)."""
    if n_requests < 0 or omega < 1:
        raise ValueError("n_requests must be >= 0 and omega >= 1")
    return -(-n_requests // omega)


def singleton_feasible(
    depot: GeoPoint, trip: TripRequest, shift_start: int, shift_end: int, speed: float
) -> bool:
    """Can depot -> pickup -> dropoff -> depot be driven inside one shift?

    Earliest-departure propagation with waiting allowed: arrival must not
    pass the latest service start nor the shift end at any stop.
    """
    t_in = drive_minutes(depot, trip.origin, speed)
    t_od = drive_minutes(trip.origin, trip.destination, speed)
    t_out = drive_minutes(trip.destination, depot, speed)
    ta = shift_start + t_in
    if ta > trip.pickup_window[1] or ta > shift_end:
        return False
    td = max(ta, trip.pickup_window[0]) + trip.service_time
    ta = td + t_od
    if ta > trip.dropoff_window[1] or ta > shift_end:
        return False
    td = max(ta, trip.dropoff_window[0]) + trip.service_time
    return td + t_out <= shift_end


def servable_in_some_shift(instance: Instance, trip: TripRequest) -> bool:
    from .shifts import shifts_for

    return any(
        singleton_feasible(instance.depot, trip, s.start, s.end, instance.speed)
        for s in shifts_for(instance)
    )


@dataclass(frozen=True)
class GeneratorConfig:
    """Parameters for the synthetic instance generator.

    ``fraction_paired_riders`` controls how many riders get an outbound plus
    a later return trip (the return's pickup window opens only after the
    outbound's drop-off window closes), exercising all-or-nothing service.
    """

    n_requests: int
    seed: int = 0
    fraction_paired_riders: float = 0.0
    bbox: tuple[float, float, float, float] = (31.9, 32.15, -81.25, -81.0)
    window_width_range: tuple[int, int] = (30, 60)
    capacity: int = 3
    omega: int = 16
    fleet_size: int | str = "auto"
    shift_earliest: int = 5 * 60
    shift_latest: int = 22 * 60
    shift_duration: int = 8 * 60
    shift_step: int = 60
    speed: float = 0.6
    service_time: int = 2
    demand: int = 1
    max_draw_attempts: int = 200


def generate_instance(config: GeneratorConfig) -> Instance:
    """Build a deterministic synthetic instance from a seeded config.

    Raises InstanceError if the config cannot yield a window layout in which
    every request is individually servable (the layout is reported, never
    silently clamped into feasibility).
    """
    if config.n_requests < 1:
        raise InstanceError("n_requests: must be >= 1")
    if not 0.0 <= config.fraction_paired_riders <= 1.0:
        raise InstanceError("fraction_paired_riders: must lie in [0, 1]")

    from .shifts import enumerate_shifts

    rng = np.random.default_rng(config.seed)
    lat_lo, lat_hi, lon_lo, lon_hi = config.bbox
    depot = ((lat_lo + lat_hi) / 2.0, (lon_lo + lon_hi) / 2.0)
    try:
        candidate_shifts = enumerate_shifts(
            config.shift_earliest, config.shift_latest, config.shift_duration, config.shift_step
        )
    except ValueError as exc:
        raise InstanceError(f"generator: {exc}") from exc

    n = config.n_requests
    f = config.fraction_paired_riders
    # 2p + s = n and p/(p+s) ~= f  =>  p = f*n/(1+f)
    n_paired = min(n // 2, int(round(f * n / (1.0 + f))) if f > 0 else 0)

    def draw_point() -> GeoPoint:
        lat = float(rng.uniform(lat_lo, lat_hi))
        lon = float(rng.uniform(lon_lo, lon_hi))
        return (round(lat, 6), round(lon, 6))

    def draw_width() -> int:
        lo, hi = config.window_width_range
        return int(rng.integers(lo, hi + 1))

    def build_trip(
        rid: int, rider: int, origin: GeoPoint, dest: GeoPoint, earliest_pickup: int
    ) -> TripRequest | None:
        """One request whose depot->pickup->dropoff->depot chain fits a shift."""
        t_in = drive_minutes(depot, origin, config.speed)
        t_od = drive_minutes(origin, dest, config.speed)
        t_out = drive_minutes(dest, depot, config.speed)
        s = config.service_time
        w_p, w_d = draw_width(), draw_width()
        # Latest pickup-window start that still lets the whole chain finish by
        # shift_latest even when service begins at the end of the pickup window.
        latest_a = (
            config.shift_latest - t_out - s - t_od - s - w_p
        )
        lo = max(earliest_pickup, config.shift_earliest + t_in)
        if latest_a < lo:
            return None
        a_p = int(rng.integers(lo, latest_a + 1))
        b_p = a_p + w_p
        a_d = a_p + s + t_od
        b_d = min(a_d + w_d, config.shift_latest)
        if b_d < a_d:
            return None
        trip = TripRequest(
            id=rid,
            rider_id=rider,
            origin=origin,
            destination=dest,
            pickup_window=(a_p, b_p),
            dropoff_window=(a_d, b_d),
            service_time=s,
            demand=config.demand,
        )
        ok = any(
            singleton_feasible(depot, trip, sh.start, sh.end, config.speed)
            for sh in candidate_shifts
        )
        return trip if ok else None

    riders: list[Rider] = []
    requests: list[TripRequest] = []
    next_request = 1
    next_rider = 1

    def fail(kind: str) -> InstanceError:
        return InstanceError(
            f"generator: could not place a feasible {kind} trip within "
            f"[{config.shift_earliest}, {config.shift_latest}] after "
            f"{config.max_draw_attempts} attempts; widen windows, bbox, or horizon"
        )

    for _ in range(n_paired):
        for _attempt in range(config.max_draw_attempts):
            origin, dest = draw_point(), draw_point()
            out = build_trip(next_request, next_rider, origin, dest, config.shift_earliest)
            if out is None:
                continue
            gap = int(rng.integers(20, 121))
            back = build_trip(
                next_request + 1, next_rider, dest, origin, out.dropoff_window[1] + gap
            )
            if back is None:
                continue
            requests.extend([out, back])
            riders.append(Rider(next_rider, (next_request, next_request + 1)))
            next_request += 2
            next_rider += 1
            break
        else:
            raise fail("paired-rider return")

    while next_request <= n:
        for _attempt in range(config.max_draw_attempts):
            trip = build_trip(
                next_request, next_rider, draw_point(), draw_point(), config.shift_earliest
            )
            if trip is not None:
                requests.append(trip)
                riders.append(Rider(next_rider, (next_request,)))
                next_request += 1
                next_rider += 1
                break
        else:
            raise fail("single")

    requests.sort(key=lambda r: r.id)
    if config.fleet_size == "auto":
        fleet = fleet_size(n, config.omega)
    else:
        fleet = int(config.fleet_size)

    inst = Instance(
        riders=tuple(riders),
        requests=tuple(requests),
        depot=depot,
        capacity=config.capacity,
        fleet_size=fleet,
        omega=config.omega,
        shift_earliest=config.shift_earliest,
        shift_latest=config.shift_latest,
        shift_duration=config.shift_duration,
        shift_step=config.shift_step,
        speed=config.speed,
        seed=config.seed,
    )
    inst.validate()
    return inst
