"""End-to-end evaluation of one scenario."""

from __future__ import annotations

from functools import cached_property

from .linkbudget import resolve
from .resources import ResourcePmf, resource_pmf
from .scenario import Scenario
from .snrmodel import (
    SnrCdf,
    SnrMoments,
    branch_cdfs,
    normal_approximation,
    snr_cdf_mixture,
    snr_moments,
)
from .spatial import blockage_prob_avg

VARIANTS = ("fading", "no-fading", "approx", "approx-no-fading")


class Analysis:
    """Lazily evaluated SNR distributions, moments and PMFs for a scenario.

    Variants: ``fading`` (exact mixture with shadow fading), ``no-fading``,
    ``approx`` (two-Normal approximation) and ``approx-no-fading``.
    """

    def __init__(self, scenario: Scenario, method: str = "closed-form"):
        self.scenario = scenario
        self.method = method
        self.lb, self.coverage, self.geometry = resolve(scenario)
        self._moments: dict[str, SnrMoments] = {}

    @cached_property
    def p_b(self) -> float:
        return blockage_prob_avg(self.scenario, self.geometry)

    def branches(self, fading: bool = True) -> tuple[SnrCdf, SnrCdf]:
        """``(blocked, non_blocked)`` CDFs."""
        return branch_cdfs(self.scenario, self.lb, self.geometry, fading, self.method)

    @cached_property
    def _cdfs(self) -> dict[str, SnrCdf]:
        s, lb, g, pb = self.scenario, self.lb, self.geometry, self.p_b
        return {
            "fading": snr_cdf_mixture(s, lb, g, True, self.method, pb),
            "no-fading": snr_cdf_mixture(s, lb, g, False, self.method, pb),
            "approx": normal_approximation(s, lb, g, True, pb),
            "approx-no-fading": normal_approximation(s, lb, g, False, pb),
        }

    def cdf(self, variant: str = "fading") -> SnrCdf:
        return self._cdfs[variant]

    def moments(self, variant: str = "fading") -> SnrMoments:
        if variant not in self._moments:
            self._moments[variant] = snr_moments(self.cdf(variant))
        return self._moments[variant]

    def pmf(self, variant: str = "fading", rate_bps: float | None = None) -> ResourcePmf:
        s = self.scenario
        rate = s.rate_bps if rate_bps is None else rate_bps
        return resource_pmf(self.cdf(variant), s.mcs_table, rate, s.w_prb_hz)
