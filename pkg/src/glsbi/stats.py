"""Scalar spike-train statistics: spike frequency and Gamma-moment ISI shape.

Gamma moments use the method of moments with the unbiased variance,
alpha = mean^2 / var and beta = mean / var.  Because inter-spike intervals
are integer step counts, both moments are computed from exact integer sums;
the streaming path over `TrainSummaries` and the per-train path over
explicit interval lists therefore produce bit-identical values.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .dynamics import TrainSummaries
from .errors import DegenerateIsi, InsufficientSpikes, ParameterError


class StatisticKind(enum.Enum):
    SPIKE_FREQ = "spikefreq"
    GAMMA_ALPHA = "alpha"

    @classmethod
    def from_label(cls, label: str) -> "StatisticKind":
        for kind in cls:
            if kind.value == label:
                return kind
        raise ParameterError(f"unknown statistic kind {label!r}")


# excluded_reason codes used in dumps and table bookkeeping
EXCL_INSUFFICIENT = "insufficient_spikes"
EXCL_DEGENERATE = "degenerate_isi"


@dataclass(frozen=True)
class IsiSample:
    intervals: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "intervals", np.asarray(self.intervals, dtype=np.int64)
        )
        if len(self.intervals) and np.any(self.intervals < 1):
            raise ParameterError("inter-spike intervals must be >= 1")


@dataclass(frozen=True)
class GammaMoments:
    alpha: float
    beta: float


def spike_frequency(spike_times: np.ndarray, T: int) -> float:
    """Empirical spikes per time step: count / T."""
    if T < 1:
        raise ParameterError(f"T must be >= 1, got {T}")
    spike_times = np.asarray(spike_times)
    if len(spike_times) and (spike_times[0] < 1 or spike_times[-1] > T):
        raise ParameterError("spike times outside [1, T]")
    return len(spike_times) / T


def extract_isis(spike_times: np.ndarray) -> IsiSample:
    """Successive differences of the spike times; empty when < 2 spikes."""
    spike_times = np.asarray(spike_times, dtype=np.int64)
    if len(spike_times) >= 2 and np.any(np.diff(spike_times) <= 0):
        raise ParameterError("spike times must be strictly increasing")
    return IsiSample(np.diff(spike_times))


def _gamma_from_sums(m: int, s: int, ss: int) -> GammaMoments:
    """Moments from exact integer sums: m intervals, sum s, sum of squares ss."""
    if m < 2:
        raise InsufficientSpikes(f"need >= 2 inter-spike intervals, got {m}")
    num = m * ss - s * s
    if num == 0:
        raise DegenerateIsi("inter-spike intervals have zero variance")
    # float conversions mirror the vectorized summary path exactly
    var = float(num) / float(m * (m - 1))
    mean = float(s) / float(m)
    return GammaMoments(alpha=mean * mean / var, beta=mean / var)


def gamma_moments(isis: IsiSample) -> GammaMoments:
    """Method-of-moments Gamma fit with the m-1 variance divisor."""
    iv = isis.intervals
    return _gamma_from_sums(len(iv), int(iv.sum()), int((iv * iv).sum()))


def compute_statistic(kind: StatisticKind, spike_times: np.ndarray, T: int) -> float:
    if kind is StatisticKind.SPIKE_FREQ:
        return spike_frequency(spike_times, T)
    return gamma_moments(extract_isis(spike_times)).alpha


def statistics_from_summaries(
    kind: StatisticKind, summaries: TrainSummaries
) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Per-neuron statistic values from streaming accumulators.

    Returns (values, valid mask, excluded_reason per neuron, "" when valid).
    SpikeFreq is defined for every train; GammaAlpha excludes trains with
    fewer than 2 intervals or zero interval variance.
    """
    n = summaries.n
    reasons = [""] * n
    if kind is StatisticKind.SPIKE_FREQ:
        values = summaries.spike_count / summaries.T
        return values, np.ones(n, dtype=bool), reasons

    m = summaries.isi_count
    s = summaries.isi_sum
    ss = summaries.isi_sumsq
    num = m * ss - s * s
    enough = m >= 2
    spread = num > 0
    valid = enough & spread
    values = np.full(n, np.nan)
    if np.any(valid):
        mv = m[valid].astype(np.float64)
        var = num[valid] / (m[valid] * (m[valid] - 1))
        mean = s[valid] / mv
        values[valid] = mean * mean / var
    for i in np.nonzero(~enough)[0]:
        reasons[i] = EXCL_INSUFFICIENT
    for i in np.nonzero(enough & ~spread)[0]:
        reasons[i] = EXCL_DEGENERATE
    return values, valid, reasons
