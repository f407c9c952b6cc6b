"""Empirical checks of the independence and Gaussianity working assumptions.

Pairwise statistic correlations (random pairs and synaptically related
pairs), squared Mahalanobis distances against the chi-squared law, and Q-Q
plot data.  The chi-squared quantile function lives here and is shared with
the inference module's interval construction.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaincinv

from .dynamics import SpikeTrainRecord
from .errors import (
    DegenerateSample,
    NoEdges,
    NumericError,
    ParameterError,
    SingularCovariance,
)
from .graph import DirectedGraph
from .rng import RngState, next_uniform
from .stats import StatisticKind, compute_statistic


class PairSampleMode(enum.Enum):
    RANDOM = "random"
    POST_SYNAPTIC = "post_synaptic_relation"


@dataclass(frozen=True)
class QqData:
    empirical: np.ndarray
    theoretical: np.ndarray


def chi2_quantile(q: float, df: int) -> float:
    """Quantile of the chi-squared law via the inverse regularized incomplete gamma."""
    if not 0.0 < q < 1.0:
        raise ParameterError(f"q must be in (0, 1), got {q}")
    if df < 1:
        raise ParameterError(f"df must be >= 1, got {df}")
    return float(2.0 * gammaincinv(df / 2.0, q))


def _draw_index(n: int, rng: RngState) -> tuple[int, RngState]:
    u, rng = next_uniform(rng)
    return min(int(u * n), n - 1), rng


class StatisticCache:
    """Lazily computed per-neuron statistic over one full-record simulation."""

    def __init__(self, record: SpikeTrainRecord, kind: StatisticKind):
        self.record = record
        self.kind = kind
        self._values: dict[int, float | None] = {}

    def value(self, i: int) -> float | None:
        """Statistic of neuron i, or None when it is not computable."""
        if i not in self._values:
            try:
                self._values[i] = compute_statistic(
                    self.kind, self.record.spike_times(i), self.record.T
                )
            except NumericError:
                self._values[i] = None
        return self._values[i]


def sample_statistic_pair(
    g: DirectedGraph,
    cache: StatisticCache,
    mode: PairSampleMode,
    rng: RngState,
    max_retries: int = 100,
) -> tuple[tuple[float, float], RngState]:
    """One (statistic_i, statistic_j) pair under the requested sampling mode.

    Random mode draws two distinct uniform indices; post-synaptic mode draws
    i among neurons with outgoing edges and j among i's targets.  Pairs
    whose statistic is not computable are resampled, up to max_retries.
    """
    post_indptr, post_indices = g.postsynaptic()
    if mode is PairSampleMode.POST_SYNAPTIC:
        sources = np.nonzero(np.diff(post_indptr) > 0)[0]
        if len(sources) == 0:
            raise NoEdges("post-synaptic pair sampling on an edgeless graph")

    for _ in range(max_retries):
        if mode is PairSampleMode.RANDOM:
            i, rng = _draw_index(g.n, rng)
            j, rng = _draw_index(g.n - 1, rng)
            if j >= i:
                j += 1
        else:
            k, rng = _draw_index(len(sources), rng)
            i = int(sources[k])
            targets = post_indices[post_indptr[i] : post_indptr[i + 1]]
            k, rng = _draw_index(len(targets), rng)
            j = int(targets[k])
        xi = cache.value(i)
        xj = cache.value(j)
        if xi is not None and xj is not None:
            return (xi, xj), rng
    raise NumericError(
        f"no computable statistic pair found in {max_retries} attempts"
    )


def correlation(pairs: np.ndarray) -> float:
    """Pearson sample correlation of an array of (x, y) pairs."""
    pairs = np.asarray(pairs, dtype=np.float64)
    if pairs.ndim != 2 or pairs.shape[1] != 2 or pairs.shape[0] < 2:
        raise ParameterError("need an (N, 2) array with N >= 2")
    x, y = pairs[:, 0], pairs[:, 1]
    sx, sy = np.std(x), np.std(y)
    if sx == 0 or sy == 0:
        raise DegenerateSample("zero variance in one pair coordinate")
    return float(np.mean((x - x.mean()) * (y - y.mean())) / (sx * sy))


def mahalanobis_sq(vectors: np.ndarray) -> np.ndarray:
    """Squared Mahalanobis distance of each row to the sample mean.

    Uses the unbiased sample covariance; the values sum to (m-1)*s, which
    the tests assert as the covariance-plumbing self-check.
    """
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2:
        raise ParameterError("need an (m, s) array")
    m, s = vectors.shape
    if m < s + 2:
        raise ParameterError(f"need at least s+2={s + 2} vectors, got {m}")
    centered = vectors - vectors.mean(axis=0)
    cov = centered.T @ centered / (m - 1)
    try:
        solved = np.linalg.solve(cov, centered.T)
    except np.linalg.LinAlgError as exc:
        raise SingularCovariance(str(exc)) from exc
    return np.einsum("ij,ji->i", centered, solved)


def qq_data(samples: np.ndarray, theoretical_quantile: Callable) -> QqData:
    """Sorted samples against theoretical quantiles at levels (k - 0.5)/m."""
    samples = np.sort(np.asarray(samples, dtype=np.float64))
    m = len(samples)
    if m < 2:
        raise ParameterError("need >= 2 samples")
    levels = (np.arange(1, m + 1) - 0.5) / m
    theo = np.array([theoretical_quantile(q) for q in levels])
    return QqData(empirical=samples, theoretical=theo)
