"""Inter-zone distances, travel times, and the per-traveler cost formula.

The street network is abstracted away: distances are great-circle lengths
between zone centroids inflated by a circuity factor, and times follow
from a per-mode cruising speed unless a survey-grade override is supplied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping

import numpy as np

if TYPE_CHECKING:
    from .model import Mode

EARTH_RADIUS_MILES = 3958.7613


@dataclass(frozen=True)
class DistanceMatrix:
    """Pairwise zone distances in miles; zero diagonal."""

    miles: np.ndarray  # (N, N)

    def __post_init__(self):
        self.miles.setflags(write=False)

    def get(self, i: int, j: int) -> float:
        return float(self.miles[i, j])


def great_circle_miles(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Haversine distance between two WGS-84 points."""
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = math.radians(lat2 - lat1)
    dlam = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_MILES * math.asin(math.sqrt(a))


def compute_distance(zones, circuity: float = 1.3) -> DistanceMatrix:
    """Centroid-to-centroid great-circle distances scaled by circuity.

    Circuity >= 1 approximates street-network length from straight-line
    length; the diagonal stays exactly zero.
    """
    if circuity < 1.0:
        raise ValueError(f"circuity {circuity} must be >= 1")
    n = len(zones)
    dist = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            d = circuity * great_circle_miles(
                zones[a].latitude, zones[a].longitude, zones[b].latitude, zones[b].longitude
            )
            dist[a, b] = d
            dist[b, a] = d
    return DistanceMatrix(dist)


def compute_travel_time(
    distances: DistanceMatrix,
    mode: "Mode",
    overrides: Mapping[tuple[int, int, int], float] | None = None,
    mode_index: int | None = None,
) -> np.ndarray:
    """Hours to travel each OD pair by one mode.

    Overrides, keyed (origin, destination, mode index), win over the
    distance/speed estimate and are the entry point for asymmetric times.
    The diagonal is forced to zero even if an override says otherwise.
    """
    if mode.speed_mph <= 0:
        raise ValueError(f"mode {mode.name} speed must be > 0")
    idx = mode.id if mode_index is None else mode_index
    t = distances.miles / mode.speed_mph
    if overrides:
        for (i, j, m), hours in overrides.items():
            if m != idx:
                continue
            if hours < 0 or not math.isfinite(hours):
                raise ValueError(f"travel-time override ({i},{j},{m}) = {hours} must be finite and >= 0")
            t[i, j] = hours
    np.fill_diagonal(t, 0.0)
    return t
