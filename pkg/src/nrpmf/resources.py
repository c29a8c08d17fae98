"""MCS selection probabilities and the per-session PRB-demand pmf."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .mathcore import DomainError
from .scenario import McsTable

__all__ = [
    "Conditioning",
    "ResourcePmf",
    "mcs_probabilities",
    "prbs_needed",
    "resource_pmf",
    "pmf_moments",
]


class Conditioning(str, enum.Enum):
    """How the outage atom enters PRB-demand moments."""

    SERVED = "condition-on-served"  # moments of the pmf restricted to served sessions
    ZERO = "include-outage-as-zero"  # outage counted as demanding 0 PRBs


def mcs_probabilities(cdf, table: McsTable) -> np.ndarray:
    """Probability of each CQI, outage included.

    Index 0 is the outage mass ``W(s_1)``; index ``j`` (1..K) is
    ``W(s_{j+1}) - W(s_j)``, with ``s_{K+1} = +inf``.
    """
    thr = np.asarray(table.thresholds_db, dtype=float)
    if np.any(np.diff(thr) <= 0):
        raise DomainError("MCS thresholds must be strictly increasing")
    w = np.clip(np.asarray(cdf(thr), dtype=float), 0.0, 1.0)
    # a valid CDF is monotone; enforce it against round-off
    w = np.maximum.accumulate(w)
    m = np.empty(thr.size + 1)
    m[0] = w[0]
    m[1:-1] = np.diff(w)
    m[-1] = 1.0 - w[-1]
    return m


def prbs_needed(rate_bps: float, efficiency: float, w_prb_hz: float) -> int:
    """PRBs needed to carry ``rate_bps`` at ``efficiency`` bit/s/Hz.

    ``ceil(R / (e W))``, at least 1.  An efficiency exactly equal to
    ``R / (i W)`` maps to ``i``.
    """
    if not (rate_bps > 0 and efficiency > 0 and w_prb_hz > 0):
        raise DomainError("rate, efficiency and PRB bandwidth must be positive")
    q = rate_bps / (efficiency * w_prb_hz)
    nearest = round(q)
    if nearest >= 1 and abs(q - nearest) <= 1e-12 * q:
        return int(nearest)
    return max(1, math.ceil(q))


@dataclass(frozen=True)
class ResourcePmf:
    """PRB-demand distribution with an explicit outage atom."""

    probs: dict[int, float]
    outage: float
    rate_bps: float
    w_prb_hz: float
    mcs: tuple[float, ...] = field(default=(), compare=False)

    def __post_init__(self):
        total = self.outage + sum(self.probs.values())
        if abs(total - 1.0) > 1e-9:
            raise DomainError(f"pmf masses sum to {total!r}, expected 1")
        if self.outage < 0 or any(v < 0 for v in self.probs.values()):
            raise DomainError("pmf masses must be non-negative")
        if any(i < 1 for i in self.probs):
            raise DomainError("PRB counts start at 1")

    @property
    def served(self) -> float:
        return sum(self.probs.values())

    def support(self) -> list[int]:
        return sorted(i for i, p in self.probs.items() if p > 0)

    def mean(self, conditioning: Conditioning | str = Conditioning.SERVED) -> float:
        return pmf_moments(self, conditioning)[0]

    def std(self, conditioning: Conditioning | str = Conditioning.SERVED) -> float:
        return pmf_moments(self, conditioning)[1]

    def variance(self, conditioning: Conditioning | str = Conditioning.SERVED) -> float:
        return self.std(conditioning) ** 2


def resource_pmf(cdf, table: McsTable, rate_bps: float, w_prb_hz: float) -> ResourcePmf:
    m = mcs_probabilities(cdf, table)
    probs: dict[int, float] = {}
    for mass, e in zip(m[1:], table.efficiencies):
        i = prbs_needed(rate_bps, e, w_prb_hz)
        probs[i] = probs.get(i, 0.0) + float(mass)
    probs = {i: p for i, p in sorted(probs.items()) if p > 0}
    return ResourcePmf(probs, float(m[0]), float(rate_bps), float(w_prb_hz), tuple(m))


def pmf_moments(
    pmf: ResourcePmf, conditioning: Conditioning | str = Conditioning.SERVED
) -> tuple[float, float]:
    """``(mean, std)`` of the PRB demand under the chosen outage convention."""
    conditioning = Conditioning(conditioning)
    i = np.array(list(pmf.probs), dtype=float)
    p = np.array(list(pmf.probs.values()), dtype=float)
    if conditioning is Conditioning.SERVED:
        served = p.sum()
        if served <= 0:
            raise DomainError("no served mass; moments undefined when conditioning on service")
        p = p / served
    mean = float(np.sum(p * i))
    var = max(float(np.sum(p * i * i)) - mean * mean, 0.0)
    return mean, math.sqrt(var)
