"""Deterministic pseudo-randomness for reproducible streaming runs.

Every stochastic component (synthetic generators, Poisson resampling in the
Oza-Russell ensembles) draws from splitmix64, a 64-bit mixing generator with
a one-word state.  The generator is named and versioned (`RNG_NAME`) and the
seed travels with every run record, so any run can be replayed bit-exactly
from its results row alone.
"""

from __future__ import annotations

import math

RNG_NAME = "splitmix64-v1"

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# Above this rate the Poisson inversion loop is replaced by a rounded
# Gaussian approximation (same convention as common stream-mining toolkits).
_POISSON_INVERSION_LIMIT = 100.0


class SplitMix64:
    """splitmix64 stream: one 64-bit word of state, splittable."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform double in [0, 1) with 53 random mantissa bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def split(self) -> "SplitMix64":
        """Derive an independent child stream (consumes one draw)."""
        return SplitMix64(self.next_u64())

    def gauss(self) -> float:
        """Standard normal via Box-Muller (consumes two draws)."""
        u1 = 1.0 - self.next_float()  # (0, 1]: keeps log() finite
        u2 = self.next_float()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def poisson(self, rate: float) -> int:
        """Poisson draw by CDF inversion (one uniform for rate < 100)."""
        if rate < 0.0 or not math.isfinite(rate):
            raise ValueError(f"Poisson rate must be finite and >= 0, got {rate}")
        if rate == 0.0:
            return 0
        if rate >= _POISSON_INVERSION_LIMIT:
            k = math.floor(rate + math.sqrt(rate) * self.gauss() + 0.5)
            return max(int(k), 0)
        u = self.next_float()
        p = math.exp(-rate)
        cdf = p
        k = 0
        # u < 1 and the CDF tends to 1, so this terminates; the cap guards
        # against float round-off freezing the tail.
        while u > cdf and k < 100_000:
            k += 1
            p *= rate / k
            cdf += p
        return k

    @property
    def state_bytes(self) -> bytes:
        return self._state.to_bytes(8, "little")

    @state_bytes.setter
    def state_bytes(self, raw: bytes) -> None:
        if len(raw) != 8:
            raise ValueError("splitmix64 state is exactly 8 bytes")
        self._state = int.from_bytes(raw, "little")
