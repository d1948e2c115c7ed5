"""Uniform crossover and standard bit-wise mutation."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Sequence

from .bitstring import BitString, RandomSource, _check_lengths


@dataclass(frozen=True)
class VariationConfig:
    """Crossover probability; the mutation rate is always ``1/n``."""

    p_c: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_c <= 1.0:
            raise ValueError(f"p_c must lie in [0, 1], got {self.p_c}")


def uniform_crossover(
    x: BitString, y: BitString, rng: RandomSource
) -> tuple[BitString, BitString]:
    _check_lengths(x, y)
    exchange = (x.value ^ y.value) & rng.random_bits(x.n)
    return BitString(x.value ^ exchange, x.n), BitString(y.value ^ exchange, x.n)


def crossover_first_child(x: BitString, y: BitString, rng: RandomSource) -> BitString:
    return uniform_crossover(x, y, rng)[0]


@functools.lru_cache(maxsize=None)
def flip_count_thresholds(n: int) -> tuple[int, ...]:
    """Cumulative Binomial(n, 1/n) probabilities scaled to 64-bit integers.

    Entry ``j`` is ``floor(2**64 * P(K <= j))`` computed in exact integer
    arithmetic, so a raw word ``u`` maps to ``K = min{j : u < T[j]}`` (or ``n``).
    """
    denom = n**n
    acc = 0
    out = []
    for j in range(n):
        acc += math.comb(n, j) * (n - 1) ** (n - j)
        out.append((acc << 64) // denom)
    return tuple(out)


def sample_flip_count(n: int, rng: RandomSource) -> int:
    u = rng.next_u64()
    for j, t in enumerate(flip_count_thresholds(n)):
        if u < t:
            return j
    return n


def bitwise_mutation(x: BitString, rng: RandomSource) -> BitString:
    """Flip each bit independently with probability ``1/n``.

    Sampled as a Binomial(n, 1/n) number of flips followed by that many
    distinct uniform positions, which has the same law as ``n`` coin flips.
    """
    n = x.n
    flips = sample_flip_count(n, rng)
    mask = 0
    for _ in range(flips):
        while True:
            bit = 1 << rng.below(n)
            if not mask & bit:
                mask |= bit
                break
    return BitString(x.value ^ mask, n) if mask else x


def make_offspring(
    population: Sequence[BitString], p_c: float, rng: RandomSource
) -> BitString:
    """One offspring as in the steady-state loop: pick, maybe cross, mutate."""
    mu = len(population)
    x = population[rng.below(mu)]
    if rng.bernoulli(p_c):
        y = population[rng.below(mu)]
        x = crossover_first_child(x, y, rng)
    return bitwise_mutation(x, rng)
