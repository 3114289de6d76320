"""Positions, link distances, deployment region, and user placement."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        for name in ("x", "y", "z"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"coordinate {name} must be finite, got {v}")


@dataclass(frozen=True)
class DeploymentRegion:
    """Axis-aligned box of admissible relay positions."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    h_min: float
    h_max: float

    def __post_init__(self) -> None:
        for lo, hi, axis in (
            (self.x_min, self.x_max, "x"),
            (self.y_min, self.y_max, "y"),
            (self.h_min, self.h_max, "h"),
        ):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ValueError(f"region {axis} bounds invalid: [{lo}, {hi}]")

    def centroid(self) -> Point3:
        return Point3(
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
            0.5 * (self.h_min + self.h_max),
        )


@dataclass(frozen=True)
class PlacementDistribution:
    """Truncated-normal ground placement with a fixed antenna height."""

    mean_x: float
    sd_x: float
    lo_x: float
    hi_x: float
    mean_y: float
    sd_y: float
    lo_y: float
    hi_y: float
    fixed_height: float

    def __post_init__(self) -> None:
        for mean, sd, lo, hi, axis in (
            (self.mean_x, self.sd_x, self.lo_x, self.hi_x, "x"),
            (self.mean_y, self.sd_y, self.lo_y, self.hi_y, "y"),
        ):
            if sd <= 0.0:
                raise ValueError(f"sd_{axis} must be > 0, got {sd}")
            if not lo < hi:
                raise ValueError(f"truncation bounds on {axis} must satisfy lo < hi")
            if not lo <= mean <= hi:
                raise ValueError(f"mean_{axis}={mean} outside truncation [{lo}, {hi}]")


def distance(a: Point3, b: Point3) -> float:
    return math.hypot(a.x - b.x, a.y - b.y, a.z - b.z)


def e2e_distance(qbs: Point3, ris: Point3, user: Point3) -> float:
    """Two-hop path length through the relay."""
    return distance(qbs, ris) + distance(ris, user)


def contains(region: DeploymentRegion, p: Point3) -> bool:
    return (
        region.x_min <= p.x <= region.x_max
        and region.y_min <= p.y <= region.y_max
        and region.h_min <= p.z <= region.h_max
    )


def clamp_to_region(region: DeploymentRegion, p: Point3) -> Point3:
    return Point3(
        min(max(p.x, region.x_min), region.x_max),
        min(max(p.y, region.y_min), region.y_max),
        min(max(p.z, region.h_min), region.h_max),
    )


def region_distance(region: DeploymentRegion, p: Point3) -> float:
    """Distance from p to the nearest point of the region box (0 if inside)."""
    dx = max(region.x_min - p.x, 0.0, p.x - region.x_max)
    dy = max(region.y_min - p.y, 0.0, p.y - region.y_max)
    dz = max(region.h_min - p.z, 0.0, p.z - region.h_max)
    return math.hypot(dx, dy, dz)


def _truncated_normal(
    rng: np.random.Generator, mean: float, sd: float, lo: float, hi: float
) -> float:
    # bounds sit within a few sigma in every scenario we build, so plain
    # rejection terminates fast and is exact
    while True:
        v = float(rng.normal(mean, sd))
        if lo <= v <= hi:
            return v


def sample_users(
    dist: PlacementDistribution, n: int, rng: np.random.Generator
) -> list[Point3]:
    if n < 1:
        raise ValueError(f"need at least one user, got n={n}")
    out = []
    for _ in range(n):
        x = _truncated_normal(rng, dist.mean_x, dist.sd_x, dist.lo_x, dist.hi_x)
        y = _truncated_normal(rng, dist.mean_y, dist.sd_y, dist.lo_y, dist.hi_y)
        out.append(Point3(x, y, dist.fixed_height))
    return out
