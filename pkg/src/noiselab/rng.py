"""SplitMix64 random stream.

A fixed, fully specified generator keeps noise fields reproducible across
platforms and across ports of this toolkit; numpy's own generators are not
used for that reason. The stream is counter based: output ``k`` (0-based) is
``mix(seed + (k + 1) * GOLDEN)``, so blocks can be generated vectorized and
in any order without changing the values.
"""

from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_TWO_POW_53 = float(1 << 53)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def splitmix64_scalar(state: int) -> tuple[int, int]:
    """Reference scalar step: returns ``(new_state, output)``."""
    state = (state + GOLDEN) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


class SplitMix64:
    """Seeded stream of 64-bit words, uniform doubles and normal deviates."""

    def __init__(self, seed: int = 0):
        if not 0 <= seed <= MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.counter = 0

    def next_u64(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("n must be non-negative")
        k = np.arange(self.counter + 1, self.counter + 1 + n, dtype=np.uint64)
        self.counter += n
        states = np.uint64(self.seed) + k * np.uint64(GOLDEN)
        return _mix(states)

    def uniform(self, n: int) -> np.ndarray:
        """``n`` doubles in [0, 1) built from the top 53 bits of each word."""
        return (self.next_u64(n) >> np.uint64(11)).astype(np.float64) / _TWO_POW_53

    def normal(self, n: int, mean: float = 0.0, std: float = 1.0) -> np.ndarray:
        """Box-Muller normals.

        Consumes ``2 * ceil(n / 2)`` uniforms as consecutive pairs ``(u1, u2)``
        and emits ``r*cos(2*pi*u2), r*sin(2*pi*u2)`` per pair, with
        ``r = sqrt(-2 ln(1 - u1))``; an odd trailing sine value is discarded.
        """
        pairs = (n + 1) // 2
        u = self.uniform(2 * pairs).reshape(pairs, 2)
        r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        theta = 2.0 * math.pi * u[:, 1]
        z = np.empty((pairs, 2))
        z[:, 0] = r * np.cos(theta)
        z[:, 1] = r * np.sin(theta)
        return mean + std * z.reshape(-1)[:n]

    def exponential(self, n: int, scale: float = 1.0) -> np.ndarray:
        return -scale * np.log1p(-self.uniform(n))
