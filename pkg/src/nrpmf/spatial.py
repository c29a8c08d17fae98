"""UE placement and LoS blockage.

UEs are uniform over a disc of radius ``d_e`` around the BS, so the 2-D
distance has density ``2x/d_e**2``; 3-D distances add the BS/UE height
offset.  Blockage by human-body cylinders is the stationary per-location
probability, averaged over the placement law for the cell-wide value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mathcore import DomainError, integrate
from .scenario import Scenario

__all__ = [
    "CellGeometry",
    "distance2d_pdf",
    "distance3d_cdf",
    "distance3d_pdf",
    "distance3d_from_uniform",
    "sample_distance3d",
    "blockage_prob_at",
    "blockage_prob_avg",
]


@dataclass(frozen=True)
class CellGeometry:
    d_e: float  # 2-D cell radius, m
    h_a: float
    h_u: float

    def __post_init__(self):
        if not self.d_e > 0:
            raise DomainError(f"cell radius must be > 0, got {self.d_e!r}")
        if not self.h_a > self.h_u:
            raise DomainError("BS must be higher than the UE")

    @property
    def height_offset(self) -> float:
        return self.h_a - self.h_u

    @property
    def d3_min(self) -> float:
        return self.height_offset

    @property
    def d3_max(self) -> float:
        return math.hypot(self.d_e, self.height_offset)

    @classmethod
    def from_scenario(cls, s: Scenario, d_e: float) -> "CellGeometry":
        return cls(d_e, s.h_a_m, s.h_u_m)


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def distance2d_pdf(g: CellGeometry, x):
    x = np.asarray(x, dtype=float)
    inside = (x >= 0) & (x <= g.d_e)
    return _out(np.where(inside, 2.0 * x / g.d_e**2, 0.0))


def distance3d_cdf(g: CellGeometry, x):
    x = np.asarray(x, dtype=float)
    h2 = g.height_offset**2
    inner = (x * x - h2) / g.d_e**2
    out = np.where(x <= g.d3_min, 0.0, np.where(x >= g.d3_max, 1.0, inner))
    return _out(out)


def distance3d_pdf(g: CellGeometry, y):
    """Density of the 3-D distance; the 2-D density pushed through ``hypot``."""
    y = np.asarray(y, dtype=float)
    inside = (y > g.d3_min) & (y < g.d3_max)
    return _out(np.where(inside, 2.0 * y / g.d_e**2, 0.0))


def distance3d_from_uniform(g: CellGeometry, u):
    """Inverse-transform map from U(0,1) to the 3-D distance."""
    r = g.d_e * np.sqrt(np.asarray(u, dtype=float))
    return _out(np.hypot(r, g.height_offset))


def sample_distance3d(g: CellGeometry, rng: np.random.Generator, size=None):
    return distance3d_from_uniform(g, rng.random(size))


def blockage_prob_at(s: Scenario, x):
    """Probability that the LoS of a UE at 2-D distance ``x`` is blocked."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("2-D distance must be non-negative")
    slope = (s.h_b_m - s.h_u_m) / (s.h_a_m - s.h_u_m)
    rate = 2.0 * s.lambda_b_per_m2 * s.r_b_m * (x * slope + s.r_b_m)
    return _out(-np.expm1(-rate))


def blockage_prob_avg(s: Scenario, g: CellGeometry, tol: float = 1e-12) -> float:
    """Blockage probability averaged over uniform placement in the cell."""
    if s.lambda_b_per_m2 == 0:
        return 0.0
    val = integrate(
        lambda x: blockage_prob_at(s, x) * distance2d_pdf(g, x), 0.0, g.d_e, tol
    )
    return min(max(val, 0.0), 1.0)
