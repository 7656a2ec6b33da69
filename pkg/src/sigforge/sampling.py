"""Seeded randomness: per-sample RNG streams, candidate laws, keyed hashing.

Every stream is a Philox counter-based generator seeded from
``SeedSequence(master_seed, spawn_key=(stream_index,))``, so sample ``i`` of
an experiment always sees the same bits no matter which worker runs it.
The compiled kernels pull raw words from the same bit generator, which keeps
the Python and compiled paths bit-identical.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
# Largest multiple of 3 not exceeding 2**64; hash words at or above it are remixed.
_LIMIT3 = 3 * ((1 << 64) // 3)

DEFAULT_SEED = 0x5EED5EED
SETUP_STREAM = MASK64


def parse_seed(text: str | int) -> int:
    """Parse a decimal or 0x-hex master seed into a 64-bit value."""
    if isinstance(text, int):
        value = text
    else:
        value = int(text.strip(), 0)
    if not 0 <= value <= MASK64:
        raise ValueError(f"seed {text!r} is not a 64-bit value")
    return value


def mask_for(bound: int) -> int:
    """All-ones mask covering ``bound - 1`` (0 for bound == 1)."""
    return (1 << (bound - 1).bit_length()) - 1


class RngStream:
    """A reproducible random stream identified by ``(master_seed, stream_index)``."""

    __slots__ = ("master_seed", "stream_index", "bitgen", "_raw")

    def __init__(self, master_seed: int, stream_index: int = 0):
        self.master_seed = parse_seed(master_seed)
        if not 0 <= stream_index <= MASK64:
            raise ValueError("stream_index must be a 64-bit value")
        self.stream_index = stream_index
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(stream_index,))
        self.bitgen = np.random.Philox(seq)
        self._raw = self.bitgen.random_raw

    def __repr__(self) -> str:
        return f"RngStream(master_seed={self.master_seed:#x}, stream_index={self.stream_index})"

    def next_u64(self) -> int:
        return int(self._raw())

    def uniform_below(self, bound: int) -> int:
        """Uniform integer on ``[0, bound)`` by masked rejection sampling."""
        if bound < 1:
            raise ValueError("bound must be >= 1")
        mask = mask_for(bound)
        if mask <= MASK64:
            while True:
                v = int(self._raw()) & mask
                if v < bound:
                    return v
        words = (mask.bit_length() + 63) // 64
        while True:
            v = 0
            for i in range(words):
                v |= int(self._raw()) << (64 * i)
            v &= mask
            if v < bound:
                return v

    def uniform_int(self, lo: int, hi: int) -> int:
        """Uniform integer on the closed interval ``[lo, hi]``."""
        if hi < lo:
            raise ValueError("empty interval")
        return lo + self.uniform_below(hi - lo + 1)

    def random(self, size: int | None = None):
        """Uniform doubles on [0, 1) drawn from this stream."""
        return np.random.Generator(self.bitgen).random(size)


def uniform_below(rng: RngStream, bound: int) -> int:
    return rng.uniform_below(bound)


@dataclass(frozen=True)
class UniformPow:
    """Uniform on the integers of ``[L**(N-1), L**N]``."""

    L: int
    N: int

    def __post_init__(self):
        if self.L < 2 or self.N < 1:
            raise ValueError("UniformPow needs L >= 2 and N >= 1")

    @property
    def support(self) -> tuple[int, int]:
        return self.L ** (self.N - 1), self.L**self.N


@dataclass(frozen=True)
class SumOfTwoUniform:
    """Sum of two independent uniforms on ``[2**(N-1), 2**N]``."""

    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("SumOfTwoUniform needs N >= 1")

    @property
    def support(self) -> tuple[int, int]:
        return 1 << self.N, 1 << (self.N + 1)


MuSpec = Union[UniformPow, SumOfTwoUniform]


def sample_mu(spec: MuSpec, rng: RngStream) -> int:
    if isinstance(spec, UniformPow):
        lo, hi = spec.support
        return rng.uniform_int(lo, hi)
    if isinstance(spec, SumOfTwoUniform):
        lo, hi = 1 << (spec.N - 1), 1 << spec.N
        return rng.uniform_int(lo, hi) + rng.uniform_int(lo, hi)
    raise TypeError(f"unknown candidate law {spec!r}")


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a bijective 64-bit avalanche mix."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def fold64(x: int) -> int:
    """Reduce an arbitrary non-negative integer to 64 bits (identity below 2**64)."""
    if x <= MASK64:
        return x
    acc = 0
    while x:
        acc = mix64(acc ^ (x & MASK64))
        x >>= 64
    return acc


def keyed_hash_mod3(key: int, x: int) -> int:
    """Class of ``x`` in {0, 1, 2} under the partition selected by ``key``."""
    v = mix64(fold64(x) ^ key)
    while v >= _LIMIT3:
        v = mix64(v)
    return v % 3


def keyed_hash_below(key: int, x: int, lane: int, bound: int) -> int:
    """Keyed pseudo-random value on ``[0, bound)``, a fixed function of ``(key, x, lane)``.

    Independent lanes give independent-looking values for the same ``x``.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    base = mix64(fold64(x) ^ key)
    mask = mask_for(bound)
    words = max(1, (mask.bit_length() + 63) // 64)
    j = 0
    while True:
        v = 0
        for i in range(words):
            j += 1
            v |= mix64(base + GOLDEN * ((lane << 32) + j)) << (64 * i)
        v &= mask
        if v < bound:
            return v


def next_key(key: int) -> int:
    """Deterministic fresh key used after a degenerate run."""
    return mix64((key + GOLDEN) & MASK64)
