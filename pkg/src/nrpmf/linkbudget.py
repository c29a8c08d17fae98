"""Path loss, link budget and coverage radius.

All quantities are in dB/dBm.  SNR excludes the shadow-fading margin; the
fading itself is handled distributionally in :mod:`nrpmf.snrmodel`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mathcore import DomainError, erfc_inv
from .scenario import McsTable, Scenario
from .spatial import CellGeometry

__all__ = [
    "InfeasibleCoverageError",
    "LinkBudget",
    "Coverage",
    "noise_power_dbm",
    "path_loss_db",
    "link_budget",
    "snr_db_at",
    "fading_margin",
    "solve_coverage",
    "coverage_for_radius",
    "anchored_link_budget",
    "resolve",
]

_PL_INTERCEPT_DB = 32.4


class InfeasibleCoverageError(ValueError):
    pass


@dataclass(frozen=True)
class LinkBudget:
    """Aggregate gain constants ``A`` per LoS state.

    ``snr_db_at`` is ``A - 10*zeta*log10(y)``.  ``offset_db`` is non-zero only
    for anchored budgets and records how far the anchoring moved ``A`` away
    from the sum of the scenario's gains and losses.
    """

    a_nb_db: float
    a_b_db: float
    zeta: float
    noise_dbm: float
    offset_db: float = 0.0

    def a_db(self, blocked: bool) -> float:
        return self.a_b_db if blocked else self.a_nb_db

    @property
    def blockage_loss_db(self) -> float:
        return self.a_nb_db - self.a_b_db


@dataclass(frozen=True)
class Coverage:
    d3_max: float
    d_e: float
    m_sb_db: float
    s_min_db: float


def noise_power_dbm(s: Scenario) -> float:
    """Thermal noise over one PRB plus the noise figure."""
    return s.n_0_dbm_per_hz + 10.0 * math.log10(s.w_prb_hz) + s.n_f_db


def path_loss_db(s: Scenario, y, blocked: bool = False):
    """UMi street-canyon LoS path loss with the blockage intercept.

    The distance slope is ``10*zeta`` (21 dB/decade at the default zeta).
    """
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise DomainError("3-D distance must be positive")
    pl = _PL_INTERCEPT_DB + 10.0 * s.zeta * np.log10(y) + 20.0 * math.log10(s.f_c_ghz)
    if blocked:
        pl = pl + s.l_b_db
    return float(pl) if pl.ndim == 0 else pl


def link_budget(s: Scenario) -> LinkBudget:
    noise = noise_power_dbm(s)
    a_nb = (
        s.p_t_dbm + s.g_b_dbi + s.g_u_dbi
        - _PL_INTERCEPT_DB - 20.0 * math.log10(s.f_c_ghz)
        - noise - s.c_o_db - s.c_l_db - s.m_i_db
    )
    return LinkBudget(a_nb, a_nb - s.l_b_db, s.zeta, noise)


def snr_db_at(lb: LinkBudget, y, blocked: bool = False):
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise DomainError("3-D distance must be positive")
    out = lb.a_db(blocked) - 10.0 * lb.zeta * np.log10(y)
    return float(out) if out.ndim == 0 else out


def fading_margin(sigma: float, p_c: float) -> float:
    """Shadow-fading margin keeping cell-edge outage at ``p_c``."""
    if not 0 < p_c <= 0.5:
        raise DomainError(f"p_C must lie in (0, 0.5], got {p_c!r}")
    if sigma < 0:
        raise DomainError(f"sigma must be >= 0, got {sigma!r}")
    if sigma == 0 or p_c == 0.5:
        return 0.0
    return math.sqrt(2.0) * sigma * erfc_inv(2.0 * p_c)


def solve_coverage(s: Scenario, lb: LinkBudget, table: McsTable | None = None) -> Coverage:
    """Largest cell whose blocked cell-edge UE still reaches the lowest MCS.

    The budget inversion yields the maximum 3-D distance; the 2-D radius
    follows from the height offset.
    """
    table = table or s.mcs_table
    s_min = table.s_min_db
    m_sb = fading_margin(s.sigma_b_db, s.p_c)
    d3_max = 10.0 ** ((lb.a_b_db - m_sb - s_min) / (10.0 * lb.zeta))
    h = s.h_a_m - s.h_u_m
    if d3_max <= h:
        raise InfeasibleCoverageError(
            f"coverage smaller than height offset (d3_max={d3_max:.6g} m <= {h:.6g} m)"
        )
    return Coverage(d3_max, math.sqrt(d3_max**2 - h**2), m_sb, s_min)


def coverage_for_radius(s: Scenario, d_e: float, table: McsTable | None = None) -> Coverage:
    table = table or s.mcs_table
    return Coverage(
        math.hypot(d_e, s.h_a_m - s.h_u_m), d_e, fading_margin(s.sigma_b_db, s.p_c),
        table.s_min_db,
    )


def anchored_link_budget(s: Scenario, d_e: float, table: McsTable | None = None) -> LinkBudget:
    """Link budget implied by a given cell radius.

    Sets ``A_B`` so that the blocked cell-edge SNR equals ``S_min + M_SB``
    exactly, i.e. the coverage relation holds at ``d_e``; ``A_nB`` is
    ``A_B + L_B``.
    """
    cov = coverage_for_radius(s, d_e, table)
    a_b = cov.s_min_db + cov.m_sb_db + 10.0 * s.zeta * math.log10(cov.d3_max)
    base = link_budget(s)
    return LinkBudget(a_b + s.l_b_db, a_b, s.zeta, base.noise_dbm, a_b - base.a_b_db)


def resolve(s: Scenario, table: McsTable | None = None) -> tuple[LinkBudget, Coverage, CellGeometry]:
    """Budget, coverage and geometry for a scenario.

    Uses the anchored budget when the scenario pins ``r_a_m``; otherwise
    solves the coverage radius from the link budget.
    """
    if s.r_a_m is not None:
        lb = anchored_link_budget(s, s.r_a_m, table)
        cov = coverage_for_radius(s, s.r_a_m, table)
    else:
        lb = link_budget(s)
        cov = solve_coverage(s, lb, table)
    return lb, cov, CellGeometry.from_scenario(s, cov.d_e)
