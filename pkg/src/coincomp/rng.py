"""Deterministic counter-based random numbers for reproducible simulations.

The generator is splitmix64.  State advances by the 64-bit golden-ratio
constant and each output is the avalanche of the new state:

    GOLDEN = 0x9E3779B97F4A7C15
    finalize(z):
        z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
        z ^= z >> 27;  z *= 0x94D049BB133111EB
        z ^= z >> 31
    output k of a stream seeded with s  =  finalize(s + (k + 1) * GOLDEN)

All arithmetic is modulo 2**64.  Trial i of a simulation with master seed
`seed` uses its own stream seeded with mix(seed, i) = finalize(seed + i *
GOLDEN), so trials can be evaluated in any order, in any grouping, and the
draws never change.  Doubles take the top 53 bits: (x >> 11) * 2**-53,
uniform on [0, 1).

Two implementations are provided and must agree bit for bit: a plain
integer one (reference, used by the tree generators) and a numpy one
(used by the vectorized simulators).
"""

from __future__ import annotations

import numpy as np

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB

DOUBLE_SCALE = 2.0 ** -53


def finalize(z: int) -> int:
    """Avalanche a 64-bit value (splitmix64 output function)."""
    z &= MASK
    z = (z ^ (z >> 30)) * MIX1 & MASK
    z = (z ^ (z >> 27)) * MIX2 & MASK
    return z ^ (z >> 31)


def mix(seed: int, i: int) -> int:
    """Derive the stream seed for trial i from the master seed."""
    return finalize((seed + i * GOLDEN) & MASK)


def to_double(x: int) -> float:
    return (x >> 11) * DOUBLE_SCALE


class Stream:
    """Sequential splitmix64 stream."""

    def __init__(self, seed: int):
        self._state = seed & MASK

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK
        return finalize(self._state)

    def next_double(self) -> float:
        return to_double(self.next_u64())


# numpy port; scalar constants are pre-reduced mod 2**64 in python ints so
# only silent elementwise wraparound is exercised.

_NP_MIX1 = np.uint64(MIX1)
_NP_MIX2 = np.uint64(MIX2)


def np_finalize(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _NP_MIX1
    z = (z ^ (z >> np.uint64(27))) * _NP_MIX2
    return z ^ (z >> np.uint64(31))


def np_stream_seeds(seed: int, lo: int, hi: int) -> np.ndarray:
    """mix(seed, i) for i in [lo, hi) as a uint64 array."""
    idx = np.arange(lo, hi, dtype=np.uint64)
    base = np.uint64(seed & MASK) + idx * np.uint64(GOLDEN)
    return np_finalize(base)


def np_draw_u64(stream_seeds: np.ndarray, k: int) -> np.ndarray:
    """k-th output (0-based) of each stream."""
    step = np.uint64(((k + 1) * GOLDEN) & MASK)
    return np_finalize(stream_seeds + step)


def np_draw_double(stream_seeds: np.ndarray, k: int) -> np.ndarray:
    return (np_draw_u64(stream_seeds, k) >> np.uint64(11)) * DOUBLE_SCALE
