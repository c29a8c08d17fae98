"""PRB-demand distribution of a millimetre-wave NR cell.

Link budget and coverage radius, the SNR distribution of a uniformly placed
UE (placement, shadow fading, LoS blockage), its two-Normal approximation,
the MCS-to-PRB mapping and a Monte Carlo oracle.
"""

__version__ = "0.1.0"

from .linkbudget import LinkBudget, link_budget, resolve, solve_coverage
from .pipeline import Analysis
from .resources import Conditioning, ResourcePmf, resource_pmf
from .scenario import Scenario, ScenarioError, load_scenario, bundled_scenario_path
from .simulator import SimConfig, simulate
from .snrmodel import snr_cdf_mixture, snr_moments

__all__ = [
    "Analysis",
    "Conditioning",
    "LinkBudget",
    "ResourcePmf",
    "Scenario",
    "ScenarioError",
    "SimConfig",
    "link_budget",
    "load_scenario",
    "resolve",
    "resource_pmf",
    "simulate",
    "snr_cdf_mixture",
    "snr_moments",
    "solve_coverage",
    "bundled_scenario_path",
]
