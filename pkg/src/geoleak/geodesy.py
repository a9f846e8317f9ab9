"""Coordinate types, great-circle distance, and a local tangent-plane projection.

All distances are meters on a sphere of radius 6,371,000 m. Planar attack
geometry (circle intersections, annulus rasterization) runs in a local
equirectangular tangent plane anchored at a per-scenario origin; within a few
kilometres of a mid-latitude origin the planar metric agrees with the
great-circle distance to better than 0.1%.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

EARTH_RADIUS_M = 6_371_000.0
METERS_PER_DEGREE_LAT = EARTH_RADIUS_M * math.pi / 180.0

# Small-area validity windows: project() accepts points within one degree of
# the origin, unproject() accepts offsets up to 120 km.
PROJECT_WINDOW_DEG = 1.0
UNPROJECT_WINDOW_M = 120_000.0


class OutOfProjectionRange(ValueError):
    """Point lies outside the small-area validity window of a projection."""


@dataclass(frozen=True)
class GeoPoint:
    """WGS84 coordinate pair in degrees."""

    lat: float
    lon: float

    def __post_init__(self):
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise ValueError(f"non-finite coordinates ({self.lat}, {self.lon})")
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude out of range: {self.lat}")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude out of range: {self.lon}")


@dataclass(frozen=True)
class LocalPoint:
    """Planar offset from a projection origin: meters east (x), north (y)."""

    x: float
    y: float

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


@dataclass(frozen=True)
class Projection:
    """Equirectangular tangent plane anchored at ``origin``.

    meters_per_degree_lon is evaluated at the origin latitude, so the plane is
    only valid for small areas (see PROJECT_WINDOW_DEG / UNPROJECT_WINDOW_M).
    """

    origin: GeoPoint
    meters_per_degree_lat: float
    meters_per_degree_lon: float

    @classmethod
    def at(cls, origin: GeoPoint) -> "Projection":
        if abs(origin.lat) > 85.0:
            raise OutOfProjectionRange(f"projection origin too close to a pole: {origin.lat}")
        return cls(
            origin=origin,
            meters_per_degree_lat=METERS_PER_DEGREE_LAT,
            meters_per_degree_lon=METERS_PER_DEGREE_LAT * math.cos(math.radians(origin.lat)),
        )


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance between two points, in meters.

    Args:
        a, b: valid geographic points.

    Returns:
        Non-negative, exactly symmetric distance on the R = 6,371,000 m sphere.
    """
    phi1 = math.radians(a.lat)
    phi2 = math.radians(b.lat)
    d_phi = math.radians(b.lat - a.lat)
    d_lam = math.radians(b.lon - a.lon)
    h = math.sin(d_phi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(d_lam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.atan2(math.sqrt(h), math.sqrt(1.0 - h))


def project(p: GeoPoint, proj: Projection) -> LocalPoint:
    """Map a geographic point onto the local tangent plane.

    Raises:
        OutOfProjectionRange: point more than PROJECT_WINDOW_DEG from the origin.
    """
    if (
        abs(p.lat - proj.origin.lat) >= PROJECT_WINDOW_DEG
        or abs(p.lon - proj.origin.lon) >= PROJECT_WINDOW_DEG
    ):
        raise OutOfProjectionRange(f"{p} too far from projection origin {proj.origin}")
    return LocalPoint(
        x=(p.lon - proj.origin.lon) * proj.meters_per_degree_lon,
        y=(p.lat - proj.origin.lat) * proj.meters_per_degree_lat,
    )


def unproject(q: LocalPoint, proj: Projection) -> GeoPoint:
    """Inverse of project(); exact up to floating-point rounding.

    Raises:
        OutOfProjectionRange: offset beyond UNPROJECT_WINDOW_M on either axis.
    """
    if abs(q.x) >= UNPROJECT_WINDOW_M or abs(q.y) >= UNPROJECT_WINDOW_M:
        raise OutOfProjectionRange(f"local offset ({q.x}, {q.y}) beyond plane validity")
    return GeoPoint(
        lat=proj.origin.lat + q.y / proj.meters_per_degree_lat,
        lon=proj.origin.lon + q.x / proj.meters_per_degree_lon,
    )
