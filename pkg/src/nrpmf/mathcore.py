"""Numerical primitives shared by the pipeline.

Error function family, dB conversions, quadrature (adaptive Simpson and a
batched composite Gauss-Legendre rule), evaluation grids and the grid-based
Kolmogorov distance between two CDFs (grid-based, or exact against a sample).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "DomainError",
    "IntegrationError",
    "to_db",
    "to_linear",
    "erf",
    "erfc",
    "erfc_inv",
    "norm_cdf",
    "norm_sf",
    "integrate",
    "segment_rule",
    "Grid",
    "default_grid",
    "ks_distance",
    "ks_sample",
]

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_INV_SQRT_PI = 1.0 / math.sqrt(math.pi)
_SQRT2 = math.sqrt(2.0)

# Series is used below this |x|, the continued fraction above it.
_SERIES_CUTOFF = 2.5
# (upper |x| bound, terms) and (lower x bound, depth): about 20% above what
# 1e-18 relative truncation error needs at the worst point of each band.
_SERIES_BANDS = ((0.5, 18), (1.0, 24), (1.5, 32), (2.0, 40), (_SERIES_CUTOFF, 48))
_CF_BANDS = ((10.0, 14), (6.0, 20), (4.0, 28), (3.0, 40), (_SERIES_CUTOFF, 48))


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class IntegrationError(RuntimeError):
    """Quadrature did not reach the requested tolerance.

    ``estimate`` holds the best value obtained before giving up.
    """

    def __init__(self, message: str, estimate: float):
        super().__init__(f"{message} (best estimate {estimate!r})")
        self.estimate = estimate


def to_db(x):
    """Linear power ratio to decibels."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("linear power ratio must be non-negative")
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(x)
    return out if out.ndim else float(out)


def to_linear(x_db):
    """Decibels to linear power ratio."""
    out = np.power(10.0, np.asarray(x_db, dtype=float) / 10.0)
    return out if out.ndim else float(out)


def _erf_series_n(x: np.ndarray, terms: int) -> np.ndarray:
    # erf(x) = 2/sqrt(pi) exp(-x^2) sum_n 2^n x^(2n+1) / (2n+1)!!
    # All terms share the sign of x, so there is no cancellation.
    x2 = x * x
    term = x.copy()
    total = x.copy()
    for n in range(1, terms):
        term = term * (2.0 * x2) / (2 * n + 1)
        total = total + term
    return _TWO_OVER_SQRT_PI * np.exp(-x2) * total


def _erfc_cf_n(x: np.ndarray, depth: int) -> np.ndarray:
    # erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), x > 0
    t = x.copy()
    for k in range(depth, 0, -1):
        t = x + (0.5 * k) / t
    return _INV_SQRT_PI * np.exp(-x * x) / t


# The truncation depth depends only on the element's own band, so a value is
# bitwise the same whatever array it is evaluated in.
def _erf_series(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    ax = np.abs(x)
    lo = -1.0
    for hi, terms in _SERIES_BANDS:
        sel = (ax > lo) & (ax <= hi) if lo >= 0 else ax <= hi
        if np.any(sel):
            out[sel] = _erf_series_n(x[sel], terms)
        lo = hi
    return out


def _erfc_cf(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    taken = np.zeros(x.shape, dtype=bool)
    for bound, depth in _CF_BANDS:
        sel = (x >= bound) & ~taken
        if np.any(sel):
            out[sel] = _erfc_cf_n(x[sel], depth)
        taken |= sel
    return out


def _as_float_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def erf(x):
    """Error function, absolute error below 1e-15 on the reals."""
    arr, scalar = _as_float_array(x)
    a = np.atleast_1d(arr)
    out = np.empty_like(a)
    small = np.abs(a) < _SERIES_CUTOFF
    out[small] = _erf_series(a[small])
    big = ~small
    if np.any(big):
        ab = np.abs(a[big])
        out[big] = np.sign(a[big]) * (1.0 - _erfc_cf(ab))
    nan = np.isnan(a)
    out[nan] = np.nan
    return float(out[0]) if scalar else out.reshape(arr.shape)


def erfc(x):
    """Complementary error function with good relative accuracy in the upper tail."""
    arr, scalar = _as_float_array(x)
    a = np.atleast_1d(arr)
    out = np.empty_like(a)
    hi = a >= _SERIES_CUTOFF
    lo = a <= -_SERIES_CUTOFF
    mid = ~(hi | lo)
    out[mid] = 1.0 - _erf_series(a[mid])
    if np.any(hi):
        out[hi] = _erfc_cf(a[hi])
    if np.any(lo):
        out[lo] = 2.0 - _erfc_cf(-a[lo])
    out[np.isnan(a)] = np.nan
    return float(out[0]) if scalar else out.reshape(arr.shape)


def erfc_inv(p: float) -> float:
    """Inverse of :func:`erfc` on (0, 2), by safeguarded Newton iteration."""
    p = float(p)
    if not 0.0 < p < 2.0:
        raise DomainError(f"erfc_inv requires 0 < p < 2, got {p!r}")
    if p == 1.0:
        return 0.0
    if p > 1.0:
        return -erfc_inv(2.0 - p)
    # root lies in (0, hi); erfc is decreasing
    lo, hi = 0.0, 1.0
    while erfc(hi) > p:
        lo, hi = hi, 2.0 * hi
    x = 0.5 * (lo + hi)
    for _ in range(200):
        fx = erfc(x) - p
        if fx > 0:
            lo = x
        else:
            hi = x
        deriv = -_TWO_OVER_SQRT_PI * math.exp(-x * x)
        step = fx / deriv if deriv != 0.0 else 0.0
        x_new = x - step
        if not lo < x_new < hi or deriv == 0.0:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 1e-15 * max(1.0, abs(x)):
            return x_new
        x = x_new
    return x


def norm_cdf(z):
    """Standard normal CDF via :func:`erfc`."""
    return 0.5 * erfc(-np.asarray(z, dtype=float) / _SQRT2)


def norm_sf(z):
    """Standard normal survival function, accurate in the upper tail."""
    return 0.5 * erfc(np.asarray(z, dtype=float) / _SQRT2)


def _vectorize(f, vectorized: bool):
    if vectorized:
        return lambda x: np.asarray(f(x), dtype=float) * np.ones_like(x)
    vf = np.vectorize(lambda t: float(f(t)), otypes=[float])
    return vf


def integrate(
    f: Callable,
    a: float,
    b: float,
    tol: float = 1e-10,
    *,
    max_depth: int = 60,
    min_depth: int = 4,
    vectorized: bool = True,
    max_evals: int = 5_000_000,
) -> float:
    """Adaptive Simpson quadrature of ``f`` over ``[a, b]``.

    Classic recursive Simpson (accept when ``|S_l + S_r - S| <= 15 tol``,
    halve the tolerance on subdivision) run breadth-first, so each
    refinement level is one call of ``f`` on an array of abscissae.  The
    first ``min_depth`` levels always subdivide, which guards against early
    acceptance on integrands that vanish at the first few samples.  Set
    ``vectorized=False`` for scalar-only integrands.

    Raises :class:`IntegrationError` carrying the best estimate if some
    interval still fails after ``max_depth`` halvings.
    """
    a = float(a)
    b = float(b)
    if not a < b:
        raise DomainError(f"integrate requires a < b, got [{a!r}, {b!r}]")
    g = _vectorize(f, vectorized)

    fa, fm, fb = g(np.array([a, 0.5 * (a + b), b]))
    lo = np.array([a])
    hi = np.array([b])
    f_lo = np.array([fa])
    f_mid = np.array([fm])
    f_hi = np.array([fb])
    whole = (b - a) / 6.0 * (f_lo + 4.0 * f_mid + f_hi)
    eps = np.array([tol])

    total = 0.0
    evals = 3
    failed = False
    for depth in range(max_depth + 1):
        mid = 0.5 * (lo + hi)
        vals = g(np.concatenate([0.5 * (lo + mid), 0.5 * (mid + hi)]))
        evals += vals.size
        n = lo.size
        f_lm, f_rm = vals[:n], vals[n:]
        half = 0.5 * (hi - lo)
        left = half / 6.0 * (f_lo + 4.0 * f_lm + f_mid)
        right = half / 6.0 * (f_mid + 4.0 * f_rm + f_hi)
        delta = left + right - whole
        ok = (np.abs(delta) <= 15.0 * eps) & (depth >= min_depth)
        # intervals that can no longer be split are taken as they are
        ok |= (mid <= lo) | (mid >= hi)
        refined = left + right + delta / 15.0
        total += float(np.sum(refined[ok]))
        rest = ~ok
        if not rest.any():
            break
        if depth == max_depth or evals > max_evals:
            total += float(np.sum(refined[rest]))
            failed = True
            break
        lo_r, mid_r, hi_r = lo[rest], mid[rest], hi[rest]
        lo = np.concatenate([lo_r, mid_r])
        hi = np.concatenate([mid_r, hi_r])
        f_lo, f_mid, f_hi = (
            np.concatenate([f_lo[rest], f_mid[rest]]),
            np.concatenate([f_lm[rest], f_rm[rest]]),
            np.concatenate([f_mid[rest], f_hi[rest]]),
        )
        whole = np.concatenate([left[rest], right[rest]])
        eps = np.concatenate([eps[rest], eps[rest]]) * 0.5
    if failed:
        raise IntegrationError(
            f"adaptive Simpson did not converge on [{a}, {b}] at tol {tol}", total
        )
    return total


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def segment_rule(lo, hi, panels: int = 16, order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights for a batch of intervals.

    ``lo`` and ``hi`` are arrays of equal shape ``(n,)``; each interval is cut
    into ``panels`` equal panels with an ``order``-point rule.  Returns
    ``(nodes, weights)`` of shape ``(n, panels * order)``.  Empty or reversed
    intervals get zero weights.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    width = np.maximum(hi - lo, 0.0)
    t, w = _gauss_legendre(order)
    # reference nodes on [0, 1] for all panels
    k = np.arange(panels)[:, None]
    ref = ((k + 0.5 * (t[None, :] + 1.0)) / panels).ravel()
    ref_w = np.tile(w / (2.0 * panels), panels)
    nodes = lo[:, None] + width[:, None] * ref[None, :]
    weights = width[:, None] * ref_w[None, :]
    return nodes, weights


@dataclass(frozen=True)
class Grid:
    """Strictly increasing abscissae with optional values of equal length."""

    points: np.ndarray
    values: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise DomainError("grid points must be a non-empty 1-D array")
        if np.any(np.diff(pts) <= 0):
            raise DomainError("grid points must be strictly increasing")
        object.__setattr__(self, "points", pts)
        if self.values is not None:
            vals = np.asarray(self.values, dtype=float)
            if vals.shape != pts.shape:
                raise DomainError("grid values and points differ in length")
            object.__setattr__(self, "values", vals)

    @classmethod
    def linspace(cls, lo: float, hi: float, n: int = 20_001) -> "Grid":
        return cls(np.linspace(lo, hi, n))

    def evaluate(self, fn: Callable) -> "Grid":
        return Grid(self.points, np.asarray(fn(self.points), dtype=float))

    def __len__(self) -> int:
        return self.points.size


def default_grid(*cdfs, n: int = 20_001, pad_db: float = 30.0) -> Grid:
    """Grid over the union of the supports, padded by ``pad_db`` on each side."""
    lo = min(c.support_lo for c in cdfs) - pad_db
    hi = max(c.support_hi for c in cdfs) + pad_db
    return Grid.linspace(lo, hi, n)


def ks_distance(F, G, grid: Grid | None = None) -> float:
    """Kolmogorov distance ``max |F(x) - G(x)|`` evaluated on ``grid``."""
    if grid is None:
        grid = default_grid(F, G)
    x = grid.points
    d = np.max(np.abs(np.asarray(F(x), dtype=float) - np.asarray(G(x), dtype=float)))
    return float(min(max(d, 0.0), 1.0))


def ks_sample(samples, F) -> float:
    """Exact Kolmogorov distance between the ECDF of ``samples`` and ``F``.

    The supremum is attained at a sample point, on one side of its jump.
    """
    xs = np.sort(np.asarray(samples, dtype=float).ravel())
    n = xs.size
    if n == 0:
        raise DomainError("need at least one sample")
    f = np.asarray(F(xs), dtype=float)
    # ties: the ECDF after a run of equal values is the count up to its last member
    upper = np.searchsorted(xs, xs, side="right") / n
    lower = np.searchsorted(xs, xs, side="left") / n
    d = max(np.max(upper - f), np.max(f - lower))
    return float(min(max(d, 0.0), 1.0))
