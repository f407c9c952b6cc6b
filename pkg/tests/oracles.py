"""Independent reference implementations used as test oracles.

Everything here is deliberately written from the published algorithm
descriptions or as brute force, without importing the package's own
implementations, so that each test compares two independent routes.
"""

from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1


# --- reference PRNG transcriptions ---------------------------------------


def splitmix64_sequence(seed: int, count: int) -> list[int]:
    """Published SplitMix64: golden-gamma counter, two xor-multiply mixes."""
    x = seed & MASK64
    out = []
    for _ in range(count):
        x = (x + 0x9E3779B97F4A7C15) & MASK64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        out.append((z ^ (z >> 31)) & MASK64)
    return out


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


def xoshiro256pp_next(s: tuple[int, int, int, int]) -> tuple[int, tuple]:
    """Published xoshiro256++ update: result = rotl(s0+s3, 23) + s0."""
    s0, s1, s2, s3 = s
    result = (_rotl((s0 + s3) & MASK64, 23) + s0) & MASK64
    t = (s1 << 17) & MASK64
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, 45)
    return result, (s0, s1, s2, s3)


_JUMP = (0x180EC6D33CFD0ABA, 0xD5A61266F0C9392C, 0xA9582618E03FC9AA, 0x39ABDC4529B1661C)


def xoshiro256pp_jump(s: tuple[int, int, int, int]) -> tuple:
    """Published jump: xor-accumulate states selected by the polynomial bits."""
    acc = [0, 0, 0, 0]
    for poly in _JUMP:
        for b in range(64):
            if poly & (1 << b):
                acc = [a ^ w for a, w in zip(acc, s)]
            _, s = xoshiro256pp_next(s)
    return tuple(acc)


def reference_state_from_seed(seed: int) -> tuple[int, int, int, int]:
    return tuple(splitmix64_sequence(seed, 4))


def reference_outputs(seed: int, count: int) -> list[int]:
    s = reference_state_from_seed(seed)
    out = []
    for _ in range(count):
        v, s = xoshiro256pp_next(s)
        out.append(v)
    return out


# --- exhaustive enumeration of the spiking chain --------------------------


def enumerate_raster_probs(
    pre_lists: list[list[int]], w: float, v0: float, T: int
) -> dict[int, float]:
    """Exact law of the full raster for a tiny network.

    Walks the 2^n spike patterns per step; spike probability of neuron i is
    clamp(v_i, 0, 1); potentials reset on spike and gain w per presynaptic
    spike otherwise.  Raster code sets bit (t*n + i) when i spikes in step
    t+1.  Requires n * T small enough to enumerate (<= ~16 pattern bits).
    """
    n = len(pre_lists)
    probs: dict[int, float] = {}

    def clamp(v: float) -> float:
        return max(0.0, min(v, 1.0))

    def rec(t: int, v: tuple[float, ...], code: int, prob: float) -> None:
        if t == T:
            probs[code] = probs.get(code, 0.0) + prob
            return
        for pattern in range(1 << n):
            q = prob
            for i in range(n):
                pi = clamp(v[i])
                q *= pi if (pattern >> i) & 1 else (1.0 - pi)
                if q == 0.0:
                    break
            if q == 0.0:
                continue
            v_next = []
            for i in range(n):
                if (pattern >> i) & 1:
                    v_next.append(0.0)
                else:
                    arrivals = sum(1 for j in pre_lists[i] if (pattern >> j) & 1)
                    v_next.append(v[i] + w * arrivals)
            rec(t + 1, tuple(v_next), code | (pattern << (t * n)), q)

    rec(0, tuple([v0] * n), 0, 1.0)
    return probs


# --- quadratic interpolation vertex by least squares ----------------------


def quadratic_vertex_lsq(xs, ys) -> float:
    """Vertex abscissa of the degree-2 polynomial through three points."""
    coeffs = np.polyfit(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), 2)
    a, b, _ = coeffs
    return float(-b / (2.0 * a))


# --- binomial enumeration of the reconstruction error floor ---------------


def binomial_mae_enumeration(s: int, p: float) -> float:
    """E|N/m - p| summed over the full binomial support, m = s(s-1)."""
    m = s * (s - 1)
    total = 0.0
    for k in range(m + 1):
        pk = math.comb(m, k) * p**k * (1.0 - p) ** (m - k)
        total += pk * abs(k / m - p)
    return total


def binomial_se_enumeration(s: int, p: float) -> float:
    """sqrt(Var(N/m)) from the full binomial support."""
    m = s * (s - 1)
    mean = 0.0
    for k in range(m + 1):
        pk = math.comb(m, k) * p**k * (1.0 - p) ** (m - k)
        mean += pk * (k / m)
    var = 0.0
    for k in range(m + 1):
        pk = math.comb(m, k) * p**k * (1.0 - p) ** (m - k)
        var += pk * (k / m - mean) ** 2
    return math.sqrt(var)
