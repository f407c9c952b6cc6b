"""Numba kernels for the hot paths.

Three things live here: the xoshiro256++ update on a uint64[4] state array,
directed Erdős-Rényi adjacency sampling, and the Galves-Löcherbach step
loop.  Kernels mutate the state array in place; the wrappers in `rng`,
`graph` and `dynamics` convert to and from the immutable `RngState` value.
Bit-exact agreement with the pure Python generator is enforced by tests,
so any edit here must keep the draw order and conversion formulas intact.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# 2^-53, same constant as rng._UNIFORM_SCALE
_SCALE53 = 1.1102230246251565e-16

# xoshiro256 family jump polynomial (2^128 steps per application)
_JUMP = np.array(
    [0x180EC6D33CFD0ABA, 0xD5A61266F0C9392C, 0xA9582618E03FC9AA, 0x39ABDC4529B1661C],
    dtype=np.uint64,
)


@njit(inline="always")
def _next_u64(s):
    tmp = s[0] + s[3]
    result = ((tmp << np.uint64(23)) | (tmp >> np.uint64(41))) + s[0]
    t = s[1] << np.uint64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = (s[3] << np.uint64(45)) | (s[3] >> np.uint64(19))
    return result


@njit(inline="always")
def _next_uniform(s):
    return np.float64(_next_u64(s) >> np.uint64(11)) * _SCALE53


@njit(cache=True, nogil=True)
def fill_u64(state, out):
    for k in range(out.shape[0]):
        out[k] = _next_u64(state)


@njit(cache=True, nogil=True)
def fill_uniform(state, out):
    for k in range(out.shape[0]):
        out[k] = _next_uniform(state)


@njit(cache=True, nogil=True)
def advance_jumps(state, count):
    """Apply the 2^128 jump `count` times in place."""
    for _ in range(count):
        t0 = np.uint64(0)
        t1 = np.uint64(0)
        t2 = np.uint64(0)
        t3 = np.uint64(0)
        for w in range(4):
            poly = _JUMP[w]
            for b in range(64):
                if (poly >> np.uint64(b)) & np.uint64(1):
                    t0 ^= state[0]
                    t1 ^= state[1]
                    t2 ^= state[2]
                    t3 ^= state[3]
                _next_u64(state)
        state[0] = t0
        state[1] = t1
        state[2] = t2
        state[3] = t3


@njit(cache=True, nogil=True)
def er_adjacency(state, n, p):
    """Sample adjacency of a directed ER graph: adj[i, j] = 1 means edge i -> j.

    One uniform per ordered pair, consumed in (i-major, j-minor) order; this
    fixed order is part of the reproducibility contract.
    """
    adj = np.zeros((n, n), dtype=np.uint8)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if _next_uniform(state) < p:
                adj[i, j] = 1
    return adj


@njit(cache=True, nogil=True)
def gl_simulate(state, n, T, v0, w, post_indptr, post_indices, record_mask):
    """Run the two-phase synchronous membrane-potential chain for T steps.

    Per step: n uniforms are drawn in neuron-index order and compared against
    the clamped potentials (spike iff u < clamp(v, 0, 1)); then every spiking
    neuron resets to 0 while the others accumulate w per presynaptic spike.
    Spike times are 1-based in [1, T].

    Returns per-neuron spike counts and streaming ISI accumulators
    (count, sum, sum of squares, all int64), plus the (time, neuron) events
    of neurons with record_mask set.
    """
    v = np.full(n, v0, dtype=np.float64)
    x = np.zeros(n, dtype=np.uint8)
    spiking = np.empty(n, dtype=np.int64)
    add = np.zeros(n, dtype=np.int64)

    spike_count = np.zeros(n, dtype=np.int64)
    isi_count = np.zeros(n, dtype=np.int64)
    isi_sum = np.zeros(n, dtype=np.int64)
    isi_sumsq = np.zeros(n, dtype=np.int64)
    last_spike = np.zeros(n, dtype=np.int64)

    cap = 1024
    ev_t = np.empty(cap, dtype=np.int64)
    ev_i = np.empty(cap, dtype=np.int64)
    n_ev = 0

    for t in range(T):
        tcur = t + 1
        nspk = 0
        for i in range(n):
            u = _next_uniform(state)
            prob = v[i]
            if prob > 1.0:
                prob = 1.0
            elif prob < 0.0:
                prob = 0.0
            if u < prob:
                x[i] = 1
                spiking[nspk] = i
                nspk += 1
            else:
                x[i] = 0

        for k in range(nspk):
            j = spiking[k]
            for q in range(post_indptr[j], post_indptr[j + 1]):
                add[post_indices[q]] += 1

        for i in range(n):
            if x[i] == 1:
                v[i] = 0.0
                spike_count[i] += 1
                if last_spike[i] > 0:
                    d = tcur - last_spike[i]
                    isi_count[i] += 1
                    isi_sum[i] += d
                    isi_sumsq[i] += d * d
                last_spike[i] = tcur
                if record_mask[i] == 1:
                    if n_ev == cap:
                        cap2 = cap * 2
                        t2 = np.empty(cap2, dtype=np.int64)
                        i2 = np.empty(cap2, dtype=np.int64)
                        t2[:cap] = ev_t
                        i2[:cap] = ev_i
                        ev_t = t2
                        ev_i = i2
                        cap = cap2
                    ev_t[n_ev] = tcur
                    ev_i[n_ev] = i
                    n_ev += 1
            elif add[i] > 0:
                v[i] = v[i] + w * add[i]
            add[i] = 0

    return (
        spike_count,
        isi_count,
        isi_sum,
        isi_sumsq,
        ev_t[:n_ev].copy(),
        ev_i[:n_ev].copy(),
    )


@njit(cache=True, nogil=True)
def gl_raster_batch(state, n, T, v0, w, post_indptr, post_indices, reps):
    """Repeated short simulations encoded as raster bit codes.

    Replicate r gets code sum(X_{t}(i) << ((t-1)*n + i)); requires n*T <= 62.
    Runs the production gl_simulate kernel, so the distribution tested
    against exhaustive enumeration is the one the simulator actually emits.
    """
    codes = np.zeros(reps, dtype=np.int64)
    mask = np.ones(n, dtype=np.uint8)
    for r in range(reps):
        _, _, _, _, ev_t, ev_i = gl_simulate(
            state, n, T, v0, w, post_indptr, post_indices, mask
        )
        c = 0
        for k in range(ev_t.shape[0]):
            c |= 1 << ((ev_t[k] - 1) * n + ev_i[k])
        codes[r] = c
    return codes
