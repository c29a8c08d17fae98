"""Monte Carlo oracle: UE drops, Bernoulli blockage, Gaussian shadow fading.

Random numbers come from Philox-4x64-10 (numpy's ``Philox`` bit generator)
keyed by the 64-bit seed.  Samples are processed in fixed-size blocks; block
``b`` uses the stream jumped ``b * 2**128`` draws ahead, so the output is
bitwise identical for any number of workers.  Within a block, three
uniform/normal vectors are drawn in a fixed order (placement, blockage,
fading) whether or not the corresponding effect is enabled.

Blockage is drawn per drop either from the location-dependent probability
``p_B(x_2d)`` (``blockage_sampling="location"``, the physical model) or
from the cell-averaged probability independently of the drop location
(``"independent"``).  The analytic blockage mixture treats the LoS state
as independent of the distance, so only the second mode samples exactly
the law it describes.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .linkbudget import LinkBudget, snr_db_at
from .resources import prbs_needed
from .scenario import McsTable, Scenario
from .snrmodel import EmpiricalCdf
from .spatial import CellGeometry, blockage_prob_at, blockage_prob_avg

__all__ = ["SimConfig", "SimReport", "simulate", "block_rng"]

BLOCK_SIZE = 1 << 16
_STATES = ("mixture", "blocked", "nonblocked")
_SAMPLING = ("location", "independent")


@dataclass(frozen=True)
class SimConfig:
    n_samples: int
    seed: int = 0
    fading: bool = True
    blockage: bool = True
    # "mixture" draws blockage per drop; "blocked"/"nonblocked" pin the LoS state
    state: str = "mixture"
    blockage_sampling: str = "location"
    workers: int = 1
    rate_bps: float | None = None  # defaults to the scenario's rate

    def __post_init__(self):
        if int(self.n_samples) < 1:
            raise ValueError("n_samples must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.state not in _STATES:
            raise ValueError(f"state must be one of {_STATES}")
        if self.blockage_sampling not in _SAMPLING:
            raise ValueError(f"blockage_sampling must be one of {_SAMPLING}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class SimReport:
    seed: int
    n_samples: int
    snr_db: np.ndarray
    distance3d_m: np.ndarray
    blocked: np.ndarray
    cqi: np.ndarray
    prbs: np.ndarray  # 0 marks outage
    n_cqi: int = 16  # CQI levels including outage
    cqi_counts: np.ndarray = field(init=False)
    prb_counts: dict[int, int] = field(init=False)

    def __post_init__(self):
        self.cqi_counts = np.bincount(self.cqi, minlength=self.n_cqi)
        vals, counts = np.unique(self.prbs, return_counts=True)
        self.prb_counts = {int(v): int(c) for v, c in zip(vals, counts)}

    @property
    def blockage_frequency(self) -> float:
        return float(np.mean(self.blocked))

    @property
    def cqi_frequencies(self) -> np.ndarray:
        return self.cqi_counts / self.n_samples

    def ecdf(self) -> EmpiricalCdf:
        return EmpiricalCdf(self.snr_db)

    def dkw_bound(self, alpha: float = 0.0027) -> float:
        """Dvoretzky-Kiefer-Wolfowitz band half-width at level ``alpha``."""
        return float(np.sqrt(np.log(2.0 / alpha) / (2.0 * self.n_samples)))

    def dump(self, path: str | Path) -> None:
        """Write one record per sample: index, distance3d_m, blocked, snr_db, cqi, prbs."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "distance3d_m", "blocked", "snr_db", "cqi", "prbs"])
            for k in range(self.n_samples):
                w.writerow([
                    k, repr(float(self.distance3d_m[k])), int(self.blocked[k]),
                    repr(float(self.snr_db[k])), int(self.cqi[k]), int(self.prbs[k]),
                ])


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed)).jumped(int(block)))


def _run_block(s, lb, g, cfg, table, prb_of_cqi, p_b_avg, block, n):
    rng = block_rng(cfg.seed, block)
    u_pos = rng.random(n)
    u_blk = rng.random(n)
    z = rng.standard_normal(n)

    r2d = g.d_e * np.sqrt(u_pos)
    d3 = np.hypot(r2d, g.height_offset)
    if cfg.state == "blocked":
        blocked = np.ones(n, dtype=bool)
    elif cfg.state == "nonblocked" or not cfg.blockage:
        blocked = np.zeros(n, dtype=bool)
    elif cfg.blockage_sampling == "independent":
        blocked = u_blk < p_b_avg
    else:
        blocked = u_blk < blockage_prob_at(s, r2d)

    snr = np.where(blocked, snr_db_at(lb, d3, True), snr_db_at(lb, d3, False))
    if cfg.fading:
        snr = snr + z * np.where(blocked, s.sigma_b_db, s.sigma_nb_db)
    cqi = np.searchsorted(np.asarray(table.thresholds_db), snr, side="right")
    return snr, d3, blocked, cqi, prb_of_cqi[cqi]


def simulate(
    s: Scenario, lb: LinkBudget, g: CellGeometry, cfg: SimConfig,
    table: McsTable | None = None,
) -> SimReport:
    table = table or s.mcs_table
    rate = cfg.rate_bps if cfg.rate_bps is not None else s.rate_bps
    prb_of_cqi = np.array(
        [0] + [prbs_needed(rate, e, s.w_prb_hz) for e in table.efficiencies], dtype=np.int64
    )
    p_b_avg = blockage_prob_avg(s, g) if cfg.blockage_sampling == "independent" else None
    n = int(cfg.n_samples)
    blocks = [(b, min(BLOCK_SIZE, n - b * BLOCK_SIZE)) for b in range(-(-n // BLOCK_SIZE))]

    def work(item):
        return _run_block(s, lb, g, cfg, table, prb_of_cqi, p_b_avg, *item)

    if cfg.workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(work, blocks))
    else:
        parts = [work(item) for item in blocks]
    snr, d3, blocked, cqi, prbs = (np.concatenate(col) for col in zip(*parts))
    return SimReport(int(cfg.seed), n, snr, d3, blocked, cqi, prbs, len(table) + 1)
