"""Estimation of the connection probability from observed statistics.

The estimator treats the s observed statistics as independent draws from
the tabulated sampling distribution, maximizes the product likelihood over
the grid, and refines the argmax with the vertex of the quadratic through
the three neighboring likelihood values.  Interpolation operates on
likelihood values, not log-likelihoods; numerical stability comes from
exponentiating log-likelihood differences from the peak, which leaves the
parabola vertex unchanged.  Confidence intervals come from the
likelihood-ratio drop against the chi-squared(1) quantile, with linear
interpolation of the log-likelihood between grid points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .diagnostics import chi2_quantile
from .distfit import LOG_EPS_FLOOR, SamplingDistributionTable, log_density
from .errors import ParameterError
from .stats import StatisticKind

FLAG_BOUNDARY = "boundary"
FLAG_DEGENERATE = "degenerate"
FLAG_CLIPPED = "clipped"
FLAG_FLOOR = "floor"


@dataclass(frozen=True)
class Observation:
    kind: StatisticKind
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if len(self.values) < 1:
            raise ParameterError("observation needs at least one value")
        if not np.all(np.isfinite(self.values)):
            raise ParameterError("observation values must be finite")

    @property
    def s(self) -> int:
        return len(self.values)


@dataclass
class Estimate:
    p_tilde: float
    p_hat: float
    loglik: np.ndarray  # shape (G, 2): grid p, log-likelihood
    method: str
    flags: tuple[str, ...] = ()
    ci: tuple[float, float, float] | None = None  # (lo, hi, level)

    def with_ci(self, lo: float, hi: float, level: float, clipped: bool) -> "Estimate":
        flags = self.flags + ((FLAG_CLIPPED,) if clipped else ())
        return replace(self, ci=(lo, hi, level), flags=flags)


class PeakResult(NamedTuple):
    x: float
    degenerate: bool


def log_likelihood(
    table: SamplingDistributionTable,
    p_index: int,
    obs: Observation,
    estimator: str,
) -> float:
    """Sum of log densities of the observed values at one grid point."""
    if obs.kind is not table.kind:
        raise ParameterError(
            f"observation kind {obs.kind.value} does not match table {table.kind.value}"
        )
    fit = table.fit_at(p_index, estimator)
    return float(sum(log_density(fit, float(v)) for v in obs.values))


def loglik_curve(
    table: SamplingDistributionTable, obs: Observation, estimator: str
) -> np.ndarray:
    return np.array(
        [log_likelihood(table, i, obs, estimator) for i in range(len(table))]
    )


def grid_argmax(
    table: SamplingDistributionTable, obs: Observation, estimator: str
) -> int:
    """Index of the maximal log-likelihood; ties break toward the smallest p."""
    return int(np.argmax(loglik_curve(table, obs, estimator)))


def quadratic_peak(
    x1: float, y1: float, x2: float, y2: float, x3: float, y3: float
) -> PeakResult:
    """Abscissa of the vertex of the parabola through three points.

    Requires x1 < x2 < x3 with the middle ordinate largest (y2 >= y1, y3).
    Collinear points have no vertex; x2 is returned with the degenerate flag.
    """
    if not (x1 < x2 < x3):
        raise ParameterError("abscissas must be strictly increasing")
    if y2 < y1 or y2 < y3:
        raise ParameterError("middle ordinate must be the largest")
    d1 = y1 * (x3 - x2)
    d2 = y2 * (x3 - x1)
    d3 = y3 * (x2 - x1)
    denom = 2.0 * (d1 - d2 + d3)
    if denom == 0.0:
        return PeakResult(x2, True)
    x_max = (d1 * (x2 + x3) - d2 * (x1 + x3) + d3 * (x1 + x2)) / denom
    return PeakResult(min(max(x_max, x1), x3), False)


def estimate_p(
    table: SamplingDistributionTable, obs: Observation, estimator: str
) -> Estimate:
    """Grid argmax plus quadratic refinement of the likelihood values.

    The three likelihood values around the argmax are exp(logL - logL_max),
    a positive rescaling that the vertex is invariant to.  A boundary argmax
    is returned unrefined with the boundary flag.
    """
    grid = table.grid
    if len(grid) < 3:
        raise ParameterError("estimation needs a grid of >= 3 points")
    ll = loglik_curve(table, obs, estimator)
    imax = int(np.argmax(ll))
    p_tilde = float(grid[imax])
    flags: tuple[str, ...] = ()
    if ll[imax] <= obs.s * LOG_EPS_FLOOR * 0.999999:
        # every observation sat on the density floor even at the peak
        flags += (FLAG_FLOOR,)

    method = f"{table.kind.value}_{estimator}"
    curve = np.column_stack([grid, ll])
    if imax == 0 or imax == len(grid) - 1:
        return Estimate(
            p_tilde=p_tilde,
            p_hat=p_tilde,
            loglik=curve,
            method=method,
            flags=flags + (FLAG_BOUNDARY,),
        )

    y = np.exp(ll[imax - 1 : imax + 2] - ll[imax])
    peak = quadratic_peak(
        grid[imax - 1], y[0], grid[imax], y[1], grid[imax + 1], y[2]
    )
    if peak.degenerate:
        flags += (FLAG_DEGENERATE,)
    return Estimate(
        p_tilde=p_tilde, p_hat=peak.x, loglik=curve, method=method, flags=flags
    )


def _interp_loglik(grid: np.ndarray, ll: np.ndarray, p: float) -> float:
    return float(np.interp(p, grid, ll))


def confidence_interval(
    table: SamplingDistributionTable,
    obs: Observation,
    estimator: str,
    level: float,
    estimate: Estimate | None = None,
) -> tuple[float, float, bool]:
    """Likelihood-ratio interval {p : logL(p) >= logL(p_hat) - x_level/2}.

    The log-likelihood between grid points is linearly interpolated; the
    returned interval is the connected component containing p_hat, clipped
    to the grid range (third return value flags clipping).
    """
    if not 0.0 < level < 1.0:
        raise ParameterError(f"level must be in (0, 1), got {level}")
    if estimate is None:
        estimate = estimate_p(table, obs, estimator)
    grid = estimate.loglik[:, 0]
    ll = estimate.loglik[:, 1]
    p_hat = estimate.p_hat
    threshold = _interp_loglik(grid, ll, p_hat) - 0.5 * chi2_quantile(level, 1)

    # walk left from p_hat to the first downward crossing of the threshold
    lo, lo_clipped = _walk(grid, ll, p_hat, threshold, direction=-1)
    hi, hi_clipped = _walk(grid, ll, p_hat, threshold, direction=+1)
    return lo, hi, lo_clipped or hi_clipped


def _walk(
    grid: np.ndarray, ll: np.ndarray, p_hat: float, threshold: float, direction: int
) -> tuple[float, bool]:
    """Boundary of the level set along one direction from p_hat."""
    k = int(np.searchsorted(grid, p_hat))
    if direction < 0:
        idx = range(min(k, len(grid) - 1), -1, -1)
    else:
        idx = range(max(k - 1, 0), len(grid))
    prev_p, prev_ll = p_hat, _interp_loglik(grid, ll, p_hat)
    for i in idx:
        p_i, ll_i = float(grid[i]), float(ll[i])
        if direction < 0 and p_i >= p_hat:
            continue
        if direction > 0 and p_i <= p_hat:
            continue
        if ll_i < threshold:
            # crossing between prev and this grid point: linear solve
            t = (threshold - prev_ll) / (ll_i - prev_ll)
            return prev_p + t * (p_i - prev_p), False
        prev_p, prev_ll = p_i, ll_i
    return (float(grid[0]), True) if direction < 0 else (float(grid[-1]), True)


def optimal_reconstruction_mae(s: int, p: float) -> float:
    """Mean absolute error floor of the pair-counting graph estimator.

    With the true number of connected ordered pairs among s neurons known,
    the estimate N_c/(s(s-1)) has binomial error
    2 * sum_{k < ceil(s(s-1)p)} C(s(s-1), k) p^k (1-p)^(s(s-1)-k) (p - k/(s(s-1))).
    """
    if s < 2:
        raise ParameterError(f"s must be >= 2, got {s}")
    if not 0.0 < p < 1.0:
        raise ParameterError(f"p must be in (0, 1), got {p}")
    m = s * (s - 1)
    kmax = math.ceil(m * p)
    total = 0.0
    for k in range(kmax):
        total += math.comb(m, k) * p**k * (1.0 - p) ** (m - k) * (p - k / m)
    return 2.0 * total


def optimal_reconstruction_se(s: int, p: float) -> float:
    """Standard error floor sqrt(p(1-p)/(s(s-1))) of the same estimator."""
    if s < 2:
        raise ParameterError(f"s must be >= 2, got {s}")
    m = s * (s - 1)
    return math.sqrt(p * (1.0 - p) / m)
