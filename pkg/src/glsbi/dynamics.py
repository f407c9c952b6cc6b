"""Galves-Löcherbach membrane-potential chain and spike-train recording.

The update is a two-phase synchronous step.  Phase 1 draws one uniform per
neuron in index order and decides spikes from the *current* potentials:
neuron i fires iff u < clamp(v_i, 0, 1).  The strict inequality makes a
zero potential exactly silent and a potential >= 1 fire with certainty,
which the clamp's endpoints require; for every other value the spike
probability differs from clamp(v) by at most 2^-53.  Phase 2 resets firing
neurons to 0 and adds w per presynaptic spike to the others.

`step` is the plain-numpy reference path; `simulate` and
`simulate_summaries` run the numba kernel and are tested to be
trajectory-identical to repeated `step` calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import ParameterError
from .graph import DirectedGraph
from .rng import RngState, next_uniform, state_from_array, state_to_array


def phi(v: float) -> float:
    """Spiking probability function: clamp to [0, 1]."""
    if math.isnan(v):
        raise ValueError("phi is undefined for NaN")
    return max(0.0, min(float(v), 1.0))


@dataclass
class NetworkState:
    v: np.ndarray
    t: int = 0

    def __post_init__(self) -> None:
        self.v = np.asarray(self.v, dtype=np.float64)
        if np.any(self.v < 0) or np.any(np.isnan(self.v)):
            raise ParameterError("membrane potentials must be non-negative")


@dataclass(frozen=True)
class SimConfig:
    T: int
    v0: float = 0.01
    record_set: Sequence[int] | str = "all"

    def __post_init__(self) -> None:
        if self.T < 1:
            raise ParameterError(f"T must be >= 1, got {self.T}")
        if self.v0 < 0:
            raise ParameterError(f"v0 must be non-negative, got {self.v0}")
        if not isinstance(self.record_set, str) and len(self.record_set) == 0:
            raise ParameterError("record_set must be non-empty")

    def record_mask(self, n: int) -> np.ndarray:
        mask = np.zeros(n, dtype=np.uint8)
        if isinstance(self.record_set, str):
            if self.record_set != "all":
                raise ParameterError(f"unknown record_set {self.record_set!r}")
            mask[:] = 1
        else:
            idx = np.asarray(self.record_set, dtype=np.int64)
            if np.any((idx < 0) | (idx >= n)):
                raise ParameterError("record_set index out of range")
            mask[idx] = 1
        return mask


@dataclass
class SpikeTrainRecord:
    """Spike times (1-based, strictly increasing, within [1, T]) per recorded neuron."""

    trains: dict[int, np.ndarray]
    T: int

    def spike_times(self, i: int) -> np.ndarray:
        return self.trains[i]

    @property
    def neurons(self) -> list[int]:
        return sorted(self.trains)


@dataclass
class TrainSummaries:
    """Streaming per-neuron accumulators from one simulation.

    Enough to recover the spike frequency and the Gamma moment statistics of
    every neuron without storing spike times: counts plus integer ISI sums.
    """

    spike_count: np.ndarray
    isi_count: np.ndarray
    isi_sum: np.ndarray
    isi_sumsq: np.ndarray
    T: int
    n: int = field(init=False)

    def __post_init__(self) -> None:
        self.n = int(len(self.spike_count))


def step(
    state: NetworkState, g: DirectedGraph, rng: RngState
) -> tuple[NetworkState, np.ndarray, RngState]:
    """One synchronous update; returns (new state, spike indicators, rng).

    Reference implementation: consumes exactly n uniforms in index order and
    matches the simulation kernel bit for bit.
    """
    n = g.n
    v = state.v
    x = np.zeros(n, dtype=bool)
    for i in range(n):
        u, rng = next_uniform(rng)
        x[i] = u < phi(v[i])
    post_indptr, post_indices = g.postsynaptic()
    cnt = np.zeros(n, dtype=np.int64)
    for j in np.nonzero(x)[0]:
        cnt[post_indices[post_indptr[j] : post_indptr[j + 1]]] += 1
    v_new = np.where(x, 0.0, v + g.w * cnt)
    return NetworkState(v_new, state.t + 1), x, rng


def _run_kernel(g: DirectedGraph, cfg: SimConfig, rng: RngState, mask: np.ndarray):
    post_indptr, post_indices = g.postsynaptic()
    state = state_to_array(rng)
    out = _kernels.gl_simulate(
        state, g.n, cfg.T, cfg.v0, g.w, post_indptr, post_indices, mask
    )
    return out, state_from_array(state)


def simulate(
    g: DirectedGraph, cfg: SimConfig, rng: RngState
) -> tuple[SpikeTrainRecord, RngState]:
    """Simulate T steps from V_0 = v0 and collect spike times of record_set."""
    mask = cfg.record_mask(g.n)
    (_, _, _, _, ev_t, ev_i), rng = _run_kernel(g, cfg, rng, mask)
    trains: dict[int, np.ndarray] = {}
    for i in np.nonzero(mask)[0]:
        trains[int(i)] = ev_t[ev_i == i]
    return SpikeTrainRecord(trains, cfg.T), rng


def simulate_summaries(
    g: DirectedGraph, cfg: SimConfig, rng: RngState
) -> tuple[TrainSummaries, RngState]:
    """Simulate and return streaming statistics for all n neurons.

    Identical dynamics and stream consumption as `simulate`; spike times are
    simply not kept, so campaign-scale runs stay within memory.
    """
    mask = np.zeros(g.n, dtype=np.uint8)
    (sc, ic, s1, s2, _, _), rng = _run_kernel(g, cfg, rng, mask)
    return TrainSummaries(sc, ic, s1, s2, cfg.T), rng


def sample_neurons(n: int, s: int, rng: RngState) -> tuple[np.ndarray, RngState]:
    """Uniform sample of s distinct neuron indices, sorted; consumes s uniforms."""
    if not 1 <= s <= n:
        raise ParameterError(f"need 1 <= s <= n, got s={s}, n={n}")
    pool = np.arange(n, dtype=np.int64)
    for k in range(s):
        u, rng = next_uniform(rng)
        m = n - k
        j = k + min(int(u * m), m - 1)
        pool[k], pool[j] = pool[j], pool[k]
    out = np.sort(pool[:s])
    return out, rng
