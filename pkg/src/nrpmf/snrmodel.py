"""SNR distribution of a uniformly placed UE.

Every distribution here is an :class:`SnrCdf`: a callable, vectorised CDF
in dB with support bounds outside which it is 0 or 1 (within 1e-9).

Building blocks, per LoS state:

* :class:`NoFadingCdf` - placement only.  With ``d(x) = 10**((A - x)/(10 zeta))``
  the 3-D distance giving SNR ``x``, ``W(x) = 1 - (d(x)**2 - h**2) / d_e**2``
  between the cell-edge and boresight SNRs.
* shadow fading - the placement CDF convolved with ``N(0, sigma)``, either in
  closed form (:class:`ConvolvedCdf`) or by quadrature
  (:class:`QuadratureConvolvedCdf`).  The two are kept as mutual checks.
* :class:`MixtureCdf` - blocked/non-blocked mixture with the cell-averaged
  blockage probability.
* :class:`NormalMixtureCdf` - the two-Normal approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linkbudget import LinkBudget
from .mathcore import DomainError, integrate, norm_cdf, norm_sf, segment_rule
from .scenario import Scenario
from .spatial import CellGeometry, blockage_prob_avg

__all__ = [
    "SnrCdf",
    "SnrMoments",
    "NoFadingCdf",
    "ConvolvedCdf",
    "QuadratureConvolvedCdf",
    "MixtureCdf",
    "NormalMixtureCdf",
    "EmpiricalCdf",
    "snr_cdf_no_fading",
    "snr_cdf_with_fading",
    "snr_cdf_with_fading_closed_form",
    "branch_cdfs",
    "snr_cdf_mixture",
    "snr_moments",
    "normal_approximation",
]

# convolved supports extend this many sigmas past the base support
TAIL_SIGMAS = 8.0
_LN10 = math.log(10.0)


def _ret(x, out):
    return float(out) if np.ndim(x) == 0 else out


class SnrCdf:
    """Common evaluation contract for all SNR distributions."""

    kind: str = ""
    support_lo: float
    support_hi: float

    def cdf(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.cdf(x)

    def breakpoints(self) -> tuple[float, ...]:
        """Abscissae where the CDF may have a kink or jump."""
        return ()


@dataclass(frozen=True)
class SnrMoments:
    mean: float
    std: float

    @property
    def variance(self) -> float:
        return self.std**2


@dataclass(frozen=True)
class NoFadingCdf(SnrCdf):
    a_db: float
    zeta: float
    geometry: CellGeometry
    kind = "no-fading"

    @property
    def support_lo(self) -> float:
        """Cell-edge SNR."""
        return self.a_db - 10.0 * self.zeta * math.log10(self.geometry.d3_max)

    @property
    def support_hi(self) -> float:
        """SNR straight below the BS."""
        return self.a_db - 10.0 * self.zeta * math.log10(self.geometry.d3_min)

    def cdf(self, x):
        xa = np.asarray(x, dtype=float)
        g = self.geometry
        with np.errstate(over="ignore"):
            d2 = np.power(10.0, (self.a_db - xa) / (5.0 * self.zeta))
        inner = 1.0 - (d2 - g.height_offset**2) / g.d_e**2
        out = np.where(
            xa < self.support_lo, 0.0,
            np.where(xa >= self.support_hi, 1.0, np.clip(inner, 0.0, 1.0)),
        )
        return _ret(x, out)

    def pdf(self, x):
        xa = np.asarray(x, dtype=float)
        c = _LN10 / (5.0 * self.zeta)
        d2 = np.power(10.0, (self.a_db - xa) / (5.0 * self.zeta))
        inside = (xa > self.support_lo) & (xa < self.support_hi)
        return _ret(x, np.where(inside, c * d2 / self.geometry.d_e**2, 0.0))

    def breakpoints(self):
        return (self.support_lo, self.support_hi)


def _interval_prob(a, b):
    """``Phi(b) - Phi(a)`` for a <= b without cancellation in either tail."""
    upper = (a + b) > 0
    return np.where(upper, norm_sf(a) - norm_sf(b), norm_cdf(b) - norm_cdf(a))


@dataclass(frozen=True)
class ConvolvedCdf(SnrCdf):
    """Placement CDF convolved with Gaussian shadow fading, in closed form.

    Writing ``lo``/``hi`` for the base support, ``c = ln(10)/(5 zeta)`` and
    ``B = d_e**2 + h**2``::

        W(x) = Q((hi-x)/s)
             + B/d_e**2 * [Phi((hi-x)/s) - Phi((lo-x)/s)]
             - exp(c(A-x) + c**2 s**2/2)/d_e**2
               * [Phi((hi-x)/s + c s) - Phi((lo-x)/s + c s)]

    The first term is the mass pushed above ``hi``, the others integrate the
    base CDF against the Gaussian over ``[lo, hi]`` (the exponential term is
    the Gaussian moment generating function of the ``d(x)**2`` factor).
    """

    base: NoFadingCdf
    sigma: float
    kind = "convolved-exact"

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError("closed-form convolution needs sigma > 0")

    @property
    def support_lo(self) -> float:
        return self.base.support_lo - TAIL_SIGMAS * self.sigma

    @property
    def support_hi(self) -> float:
        return self.base.support_hi + TAIL_SIGMAS * self.sigma

    def cdf(self, x):
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        base, s = self.base, self.sigma
        g = base.geometry
        lo, hi = base.support_lo, base.support_hi
        c = _LN10 / (5.0 * base.zeta)
        a = (lo - xa) / s
        b = (hi - xa) / s
        upper = norm_sf(b)
        flat = (g.d_e**2 + g.height_offset**2) / g.d_e**2 * _interval_prob(a, b)
        tilt_p = _interval_prob(a + c * s, b + c * s)
        with np.errstate(divide="ignore"):
            log_tilt = c * (base.a_db - xa) + 0.5 * (c * s) ** 2 + np.log(tilt_p)
        tilt = np.where(tilt_p > 0, np.exp(np.minimum(log_tilt, 700.0)), 0.0) / g.d_e**2
        out = np.clip(upper + flat - tilt, 0.0, 1.0)
        # far outside the support the Gaussian tails are below double precision
        out = np.where(xa < lo - 40.0 * s, 0.0, np.where(xa > hi + 40.0 * s, 1.0, out))
        return _ret(x, out.reshape(np.shape(x)) if np.ndim(x) else out[0])

    def breakpoints(self):
        return self.base.breakpoints()


@dataclass(frozen=True)
class QuadratureConvolvedCdf(SnrCdf):
    """Same convolution as :class:`ConvolvedCdf`, by numerical quadrature.

    ``W(x) = integral of W_base(x + u) * N(u; 0, sigma) du`` over
    ``|u| <= 8 sigma``.  The window is split per ``x`` at the base support
    edges so every piece has a smooth integrand; each piece gets a composite
    Gauss-Legendre rule.
    """

    base: NoFadingCdf
    sigma: float
    panels: int = 16
    order: int = 16
    chunk: int = 1024
    kind = "convolved-quadrature"

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError("quadrature convolution needs sigma > 0")

    @property
    def support_lo(self) -> float:
        return self.base.support_lo - TAIL_SIGMAS * self.sigma

    @property
    def support_hi(self) -> float:
        return self.base.support_hi + TAIL_SIGMAS * self.sigma

    def _piece(self, x, u_lo, u_hi):
        s = self.sigma
        nodes, weights = segment_rule(u_lo, u_hi, self.panels, self.order)
        dens = np.exp(-0.5 * (nodes / s) ** 2) / (math.sqrt(2.0 * math.pi) * s)
        return np.sum(self.base.cdf(x[:, None] + nodes) * dens * weights, axis=1)

    def cdf(self, x):
        xa = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        w = TAIL_SIGMAS * self.sigma
        lo, hi = self.base.support_lo, self.base.support_hi
        out = np.empty_like(xa)
        for start in range(0, xa.size, self.chunk):
            xc = xa[start:start + self.chunk]
            # u ranges where the base CDF is on its curved part / equal to 1
            mid_lo = np.clip(lo - xc, -w, w)
            mid_hi = np.clip(hi - xc, -w, w)
            out[start:start + self.chunk] = (
                self._piece(xc, mid_lo, mid_hi) + self._piece(xc, mid_hi, np.full_like(xc, w))
            )
        out = np.clip(out, 0.0, 1.0)
        return _ret(x, out.reshape(np.shape(x)) if np.ndim(x) else out[0])

    def breakpoints(self):
        return self.base.breakpoints()


@dataclass(frozen=True)
class MixtureCdf(SnrCdf):
    weights: tuple[float, ...]
    components: tuple[SnrCdf, ...]
    kind = "mixture"

    def __post_init__(self):
        w = tuple(float(v) for v in self.weights)
        if len(w) != len(self.components) or not w:
            raise DomainError("one weight per component required")
        if any(v < 0 for v in w) or abs(sum(w) - 1.0) > 1e-12:
            raise DomainError("mixture weights must be non-negative and sum to 1")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", tuple(self.components))

    def _active(self):
        return [c for w, c in zip(self.weights, self.components) if w > 0]

    @property
    def support_lo(self) -> float:
        return min(c.support_lo for c in self._active())

    @property
    def support_hi(self) -> float:
        return max(c.support_hi for c in self._active())

    def cdf(self, x):
        total = 0.0
        for w, c in zip(self.weights, self.components):
            if w > 0:
                total = total + w * np.asarray(c.cdf(x), dtype=float)
        return _ret(x, np.asarray(total, dtype=float))

    def breakpoints(self):
        pts: set[float] = set()
        for c in self._active():
            pts.update(c.breakpoints())
        return tuple(sorted(pts))


@dataclass(frozen=True)
class NormalMixtureCdf(SnrCdf):
    """Weighted sum of Normal CDFs; a zero std component is a point mass."""

    weights: tuple[float, ...]
    means: tuple[float, ...]
    stds: tuple[float, ...]
    kind = "normal-approx"

    def __post_init__(self):
        n = len(self.weights)
        if not n or len(self.means) != n or len(self.stds) != n:
            raise DomainError("weights, means and stds must have equal length")
        if any(s < 0 for s in self.stds):
            raise DomainError("stds must be >= 0")
        if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > 1e-12:
            raise DomainError("weights must be non-negative and sum to 1")
        for name in ("weights", "means", "stds"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))

    def _active(self):
        return [(m, s) for w, m, s in zip(self.weights, self.means, self.stds) if w > 0]

    @property
    def support_lo(self) -> float:
        return min(m - TAIL_SIGMAS * s for m, s in self._active())

    @property
    def support_hi(self) -> float:
        return max(m + TAIL_SIGMAS * s for m, s in self._active())

    def cdf(self, x):
        xa = np.asarray(x, dtype=float)
        total = np.zeros_like(xa)
        for w, m, s in zip(self.weights, self.means, self.stds):
            if w == 0:
                continue
            if s == 0:
                total = total + w * (xa >= m)
            else:
                total = total + w * norm_cdf((xa - m) / s)
        return _ret(x, total)

    def breakpoints(self):
        return tuple(sorted({m for m, s in self._active() if s == 0}))


class EmpiricalCdf(SnrCdf):
    """Right-continuous step CDF of a sample."""

    kind = "empirical"

    def __init__(self, samples):
        xs = np.sort(np.asarray(samples, dtype=float).ravel())
        if xs.size == 0:
            raise DomainError("empirical CDF needs at least one sample")
        self.samples = xs
        self.support_lo = float(xs[0])
        self.support_hi = float(xs[-1])

    def cdf(self, x):
        idx = np.searchsorted(self.samples, np.asarray(x, dtype=float), side="right")
        return _ret(x, idx / self.samples.size)

    def breakpoints(self):
        return tuple(np.unique(self.samples))


def snr_cdf_no_fading(lb: LinkBudget, g: CellGeometry, blocked: bool) -> NoFadingCdf:
    return NoFadingCdf(lb.a_db(blocked), lb.zeta, g)


def snr_cdf_with_fading(base: NoFadingCdf, sigma: float) -> SnrCdf:
    """Shadow-faded CDF by quadrature; ``sigma == 0`` returns ``base``."""
    if sigma < 0:
        raise DomainError("sigma must be >= 0")
    if sigma == 0:
        return base
    return QuadratureConvolvedCdf(base, float(sigma))


def snr_cdf_with_fading_closed_form(
    lb: LinkBudget, g: CellGeometry, sigma: float, blocked: bool = False
) -> SnrCdf:
    if sigma < 0:
        raise DomainError("sigma must be >= 0")
    base = snr_cdf_no_fading(lb, g, blocked)
    if sigma == 0:
        return base
    return ConvolvedCdf(base, float(sigma))


def branch_cdfs(
    s: Scenario, lb: LinkBudget, g: CellGeometry, fading: bool = True,
    method: str = "closed-form",
) -> tuple[SnrCdf, SnrCdf]:
    """``(blocked, non_blocked)`` SNR CDFs."""
    out = []
    for blocked, sigma in ((True, s.sigma_b_db), (False, s.sigma_nb_db)):
        sigma = sigma if fading else 0.0
        if method == "closed-form":
            out.append(snr_cdf_with_fading_closed_form(lb, g, sigma, blocked))
        elif method == "quadrature":
            out.append(snr_cdf_with_fading(snr_cdf_no_fading(lb, g, blocked), sigma))
        else:
            raise ValueError(f"unknown convolution method {method!r}")
    return out[0], out[1]


def snr_cdf_mixture(
    s: Scenario, lb: LinkBudget, g: CellGeometry, fading: bool = True,
    method: str = "closed-form", p_b: float | None = None,
) -> MixtureCdf:
    """SNR CDF over placement, blockage and (optionally) shadow fading.

    ``p_b`` overrides the cell-averaged blockage probability.
    """
    if p_b is None:
        p_b = blockage_prob_avg(s, g)
    blocked, clear = branch_cdfs(s, lb, g, fading, method)
    return MixtureCdf((p_b, 1.0 - p_b), (blocked, clear))


def snr_moments(cdf: SnrCdf, tol: float = 1e-9) -> SnrMoments:
    """Mean and std of the SNR, by Stieltjes integration against the CDF.

    ``E[X] = lo + int (1 - F)`` and ``E[(X - lo)**2] = int 2 (x - lo)(1 - F)``
    over ``[lo, hi]``, split at the CDF's breakpoints.
    """
    if isinstance(cdf, EmpiricalCdf):
        # the Stieltjes integral against a step function is the sample sum
        return SnrMoments(float(np.mean(cdf.samples)), float(np.std(cdf.samples)))
    lo, hi = float(cdf.support_lo), float(cdf.support_hi)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError("moments need finite support bounds")
    if hi <= lo:
        return SnrMoments(lo, 0.0)
    cuts = [lo] + [p for p in cdf.breakpoints() if lo < p < hi] + [hi]
    m1 = 0.0
    m2 = 0.0
    for a, b in zip(cuts, cuts[1:]):
        if b <= a:
            continue
        m1 += integrate(lambda x: 1.0 - cdf(x), a, b, tol)
        m2 += integrate(lambda x: 2.0 * (x - lo) * (1.0 - cdf(x)), a, b, tol)
    var = max(m2 - m1 * m1, 0.0)
    return SnrMoments(lo + m1, math.sqrt(var))


def normal_approximation(
    s: Scenario, lb: LinkBudget, g: CellGeometry, fading: bool = True,
    p_b: float | None = None,
) -> NormalMixtureCdf:
    """Two-Normal approximation of the blockage mixture.

    Each LoS state becomes ``N(mu, sqrt(sigma_SF**2 + var))`` where ``mu`` and
    ``var`` are the moments of that state's placement-only SNR.
    """
    if p_b is None:
        p_b = blockage_prob_avg(s, g)
    means, stds = [], []
    for blocked, sigma in ((True, s.sigma_b_db), (False, s.sigma_nb_db)):
        mom = snr_moments(snr_cdf_no_fading(lb, g, blocked))
        sf = sigma if fading else 0.0
        means.append(mom.mean)
        stds.append(math.sqrt(sf**2 + mom.variance))
    return NormalMixtureCdf((p_b, 1.0 - p_b), tuple(means), tuple(stds))
