"""xoshiro256++ pseudo-random generator with SplitMix64 seeding and jump streams.

The generator is implemented on plain Python integers so that results are
bit-identical across platforms and interpreters.  States are immutable
values: every operation returns the successor state instead of mutating.
Hot loops (graph sampling, network simulation) use the numba kernels in
``_kernels``, which advance the same state words and are tested for
bit-exact agreement with this module.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

MASK64 = (1 << 64) - 1

# 2^-53, scale factor of the 53-high-bit uniform conversion.
_UNIFORM_SCALE = 1.1102230246251565e-16

# Jump polynomial of the xoshiro256 family, advances the state by 2^128 steps.
_JUMP = (
    0x180EC6D33CFD0ABA,
    0xD5A61266F0C9392C,
    0xA9582618E03FC9AA,
    0x39ABDC4529B1661C,
)


class RngState(NamedTuple):
    """256-bit generator state; never all zero."""

    s0: int
    s1: int
    s2: int
    s3: int


class SeedingError(RuntimeError):
    """Seed expansion produced the forbidden all-zero state."""


def _splitmix64(x: int) -> tuple[int, int]:
    """One SplitMix64 output; returns (output, advanced counter)."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64, x


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


def seed_from_u64(seed: int) -> RngState:
    """Expand a 64-bit seed into a full state via four SplitMix64 outputs."""
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    ctr = seed
    words = []
    for _ in range(4):
        w, ctr = _splitmix64(ctr)
        words.append(w)
    state = RngState(*words)
    if state == (0, 0, 0, 0):
        raise SeedingError(f"seed {seed} expanded to the all-zero state")
    return state


def next_u64(state: RngState) -> tuple[int, RngState]:
    """Next 64-bit output and successor state."""
    s0, s1, s2, s3 = state
    result = (_rotl((s0 + s3) & MASK64, 23) + s0) & MASK64
    t = (s1 << 17) & MASK64
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, 45)
    return result, RngState(s0, s1, s2, s3)


def uniform_from_u64(raw: int) -> float:
    """53-high-bit conversion of a raw output to [0, 1)."""
    return (raw >> 11) * _UNIFORM_SCALE


def next_uniform(state: RngState) -> tuple[float, RngState]:
    """Uniform draw in [0, 1) from the 53 high bits of the next output."""
    raw, state = next_u64(state)
    return uniform_from_u64(raw), state


def jump(state: RngState) -> RngState:
    """Advance the state by 2^128 steps (non-overlapping stream split)."""
    t0 = t1 = t2 = t3 = 0
    for poly in _JUMP:
        for b in range(64):
            if poly & (1 << b):
                t0 ^= state.s0
                t1 ^= state.s1
                t2 ^= state.s2
                t3 ^= state.s3
            _, state = next_u64(state)
    return RngState(t0, t1, t2, t3)


def advance_jumps(state: RngState, count: int) -> RngState:
    """jump applied `count` times; kernel-backed so large offsets stay cheap."""
    if count < 0:
        raise ValueError(f"count must be non-negative, got {count}")
    if count == 0:
        return state
    from . import _kernels

    arr = state_to_array(state)
    _kernels.advance_jumps(arr, count)
    return state_from_array(arr)


def state_to_array(state: RngState) -> np.ndarray:
    """State words as a uint64[4] array for handing to numba kernels."""
    return np.array(state, dtype=np.uint64)


def state_from_array(arr: np.ndarray) -> RngState:
    """Read back a (possibly kernel-advanced) uint64[4] array."""
    return RngState(*(int(w) for w in arr))


def stream_states(root: RngState, count: int) -> list[RngState]:
    """States of `count` parallel streams: stream k is jump applied k times.

    Stream 0 is the root itself.  Computed incrementally so preparing N
    streams costs N jumps, not N^2/2.
    """
    if count <= 0:
        return []
    states = [root]
    for _ in range(count - 1):
        states.append(jump(states[-1]))
    return states
