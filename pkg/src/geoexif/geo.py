"""Coordinate normalization and great-circle geometry for zone filtering."""

from __future__ import annotations

import math
from dataclasses import dataclass

EARTH_RADIUS_KM = 6371.0

_HEMISPHERE_SIGNS = {"N": 1.0, "E": 1.0, "S": -1.0, "W": -1.0}


class InvalidCoordinateError(ValueError):
    """Raised for out-of-range positions or unknown hemisphere letters."""


@dataclass(frozen=True)
class DmsCoordinate:
    """One angular coordinate in degree/minute/second form plus hemisphere."""

    degrees: float
    minutes: float
    seconds: float
    hemisphere: str  # one of N, S, E, W

    @property
    def is_canonical(self) -> bool:
        """True when minutes and seconds sit in the usual [0, 60) range."""
        return (
            self.degrees >= 0
            and 0 <= self.minutes < 60
            and 0 <= self.seconds < 60
        )


@dataclass(frozen=True)
class GeoPoint:
    """Position in signed decimal degrees; bounds enforced at construction."""

    latitude: float
    longitude: float

    def __post_init__(self) -> None:
        if not (-90.0 <= self.latitude <= 90.0):
            raise InvalidCoordinateError(f"latitude out of range: {self.latitude}")
        if not (-180.0 <= self.longitude <= 180.0):
            raise InvalidCoordinateError(f"longitude out of range: {self.longitude}")


@dataclass(frozen=True)
class ZoneFilter:
    """Circular search zone: strict-inside radius around a center point."""

    center: GeoPoint
    radius_km: float

    def __post_init__(self) -> None:
        if not self.radius_km > 0:
            raise InvalidCoordinateError(f"radius must be positive: {self.radius_km}")


def dms_to_decimal(coord: DmsCoordinate) -> float:
    """Convert a DMS coordinate to signed decimal degrees.

    South and west hemispheres negate the magnitude. Non-canonical
    minute/second values (>= 60) are still converted arithmetically;
    callers should check ``is_canonical`` if they care.
    """
    try:
        sign = _HEMISPHERE_SIGNS[coord.hemisphere]
    except KeyError:
        raise InvalidCoordinateError(
            f"hemisphere must be one of N/S/E/W, got {coord.hemisphere!r}"
        ) from None
    return sign * (coord.degrees + coord.minutes / 60.0 + coord.seconds / 3600.0)


def great_circle_distance_km(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance on a 6371 km sphere (spherical law of cosines).

    The acos argument is clamped to [-1, 1]: floating arithmetic can push
    it fractionally outside for identical or antipodal points. Identical
    points short-circuit to 0.0; the clamp alone cannot guarantee that,
    because the argument may also land just below 1 (acos of which is a
    spurious ~0.1 mm-to-10 cm distance).
    """
    if a == b:
        return 0.0
    lat_a, lat_b = math.radians(a.latitude), math.radians(b.latitude)
    dlng = math.radians(b.longitude) - math.radians(a.longitude)
    arg = (
        math.cos(lat_a) * math.cos(lat_b) * math.cos(dlng)
        + math.sin(lat_a) * math.sin(lat_b)
    )
    arg = max(-1.0, min(1.0, arg))
    return EARTH_RADIUS_KM * math.acos(arg)


def within_zone(p: GeoPoint, zone: ZoneFilter) -> bool:
    """True iff p lies strictly inside the zone radius."""
    return great_circle_distance_km(p, zone.center) < zone.radius_km
