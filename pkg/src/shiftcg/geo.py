"""Great-circle geometry helpers."""

import math

EARTH_RADIUS_KM = 6371.0


def haversine_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle distance in km between two (lat, lon) points in degrees."""
    lat1, lon1 = map(math.radians, a)
    lat2, lon2 = map(math.radians, b)
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(math.sqrt(h))


def drive_minutes(a: tuple[float, float], b: tuple[float, float], speed_km_per_min: float) -> int:
    """Integer travel time: haversine distance over speed, rounded up to whole minutes."""
    if a == b:
        return 0
    # 1e-9 guard: exact ratios like 12/0.6 must not ceil to 21 from float noise
    return math.ceil(haversine_km(a, b) / speed_km_per_min - 1e-9)
