"""Fixed-length bit strings, Hamming machinery and the seeded random source.

Bits are packed into a Python ``int``: position ``i`` of the string is bit
``i`` of the integer, and ``str(x)`` lists positions ``0..n-1`` left to right.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

_U64 = (1 << 64) - 1
_DOUBLE_SCALE = 1.0 / (1 << 53)


@dataclass(frozen=True, slots=True)
class BitString:
    value: int
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"length must be positive, got {self.n}")
        if self.value < 0 or self.value >> self.n:
            raise ValueError(f"value {self.value} does not fit in {self.n} bits")

    @classmethod
    def from_str(cls, text: str) -> BitString:
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        value = 0
        for i, ch in enumerate(text):
            if ch == "1":
                value |= 1 << i
        return cls(value, len(text))

    @classmethod
    def ones(cls, n: int) -> BitString:
        return cls((1 << n) - 1, n)

    @classmethod
    def zeros(cls, n: int) -> BitString:
        return cls(0, n)

    @classmethod
    def with_ones(cls, n: int, count: int) -> BitString:
        """String whose first ``count`` positions are 1 and the rest 0."""
        return cls((1 << count) - 1, n)

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if not -self.n <= i < self.n:
            raise IndexError(i)
        return (self.value >> (i % self.n)) & 1

    def __str__(self) -> str:
        return "".join("1" if (self.value >> i) & 1 else "0" for i in range(self.n))

    def __repr__(self) -> str:
        return f"BitString('{self}')"

    def complement(self) -> BitString:
        return BitString(self.value ^ ((1 << self.n) - 1), self.n)

    def xor(self, other: BitString) -> BitString:
        _check_lengths(self, other)
        return BitString(self.value ^ other.value, self.n)


def _check_lengths(x: BitString, y: BitString) -> None:
    if x.n != y.n:
        raise ValueError(f"length mismatch: {x.n} != {y.n}")


def ones_count(x: BitString) -> int:
    return x.value.bit_count()


def zeros_count(x: BitString) -> int:
    return x.n - x.value.bit_count()


def hamming(x: BitString, y: BitString) -> int:
    _check_lengths(x, y)
    return (x.value ^ y.value).bit_count()


def derive_seed(master_seed: int, index: int) -> int:
    """64-bit seed for replication ``index`` of a run seeded with ``master_seed``.

    Distinct indices give distinct, independently mixed seeds; the mapping
    depends only on its arguments, never on scheduling.
    """
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


class RandomSource:
    """Seeded stream of 64-bit words with the bounded draws the algorithms need.

    The words come from numpy's PCG64 seeded with ``seed``. Every derived draw
    (bounded integers, Bernoulli trials, random bit masks) is defined here in
    terms of raw words so the compiled core can reproduce the exact sequence.
    """

    _BLOCK = 512

    def __init__(self, seed: int) -> None:
        if not 0 <= seed <= _U64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = seed
        self._gen = np.random.PCG64(seed)
        self._buf: list[int] = []
        self._pos = 0

    def next_u64(self) -> int:
        if self._pos == len(self._buf):
            self._buf = self._gen.random_raw(self._BLOCK).tolist()
            self._pos = 0
        w = self._buf[self._pos]
        self._pos += 1
        return w

    def below(self, m: int) -> int:
        """Uniform integer in ``[0, m)`` by masked rejection; ``m == 1`` draws nothing."""
        if m <= 1:
            if m == 1:
                return 0
            raise ValueError("bound must be positive")
        mask = (1 << (m - 1).bit_length()) - 1
        while True:
            v = self.next_u64() & mask
            if v < m:
                return v

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * _DOUBLE_SCALE

    def bernoulli(self, p: float) -> bool:
        return self.uniform() < p

    def random_bits(self, n: int) -> int:
        """Integer with ``n`` independent fair random bits (one word per 64 bits)."""
        value = 0
        shift = 0
        while shift < n:
            value |= self.next_u64() << shift
            shift += 64
        return value & ((1 << n) - 1)


def random_bitstring(n: int, rng: RandomSource) -> BitString:
    if n < 1:
        raise ValueError("n must be positive")
    return BitString(rng.random_bits(n), n)


def max_hamming_pair_indices(
    strings: Sequence[BitString], rng: RandomSource
) -> tuple[int, int]:
    """Index pair ``(i, j)``, ``i < j``, of maximum Hamming distance.

    Ties are broken uniformly at random among all maximizing pairs, scanned in
    lexicographic index order. No draw is made when the maximizer is unique.
    """
    m = len(strings)
    if m < 2:
        raise ValueError("need at least two strings")
    values = [s.value for s in strings]
    best = -1
    ties: list[tuple[int, int]] = []
    for i in range(m - 1):
        vi = values[i]
        for j in range(i + 1, m):
            d = (vi ^ values[j]).bit_count()
            if d > best:
                best = d
                ties = [(i, j)]
            elif d == best:
                ties.append((i, j))
    return ties[rng.below(len(ties))]


def max_hamming_pair(
    strings: Sequence[BitString], rng: RandomSource
) -> tuple[BitString, BitString]:
    i, j = max_hamming_pair_indices(strings, rng)
    return strings[i], strings[j]
