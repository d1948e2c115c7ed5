"""The (mu+1)-GA with the original and the diversity-aware removal rule."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .base import BudgetExhausted
from .bitstring import (
    BitString,
    RandomSource,
    max_hamming_pair_indices,
    ones_count,
    random_bitstring,
)
from .problems import ProblemId, ProblemParams, jump_value
from .variation import VariationConfig, make_offspring


@dataclass(frozen=True)
class GaConfig:
    mu: int
    variation: VariationConfig = field(default_factory=VariationConfig)
    diversity: bool = False
    max_evaluations: int = 10**8

    def __post_init__(self) -> None:
        if self.mu < 2:
            raise ValueError(f"mu must be at least 2, got {self.mu}")


@dataclass
class GaState:
    population: list[BitString]
    fitness: list[int]
    evaluations: int


def _minimum_set(fitness: Sequence[int]) -> list[int]:
    low = min(fitness)
    return [i for i, f in enumerate(fitness) if f == low]


def remove_worst_original(
    pool: Sequence[BitString], fitness: Sequence[int], rng: RandomSource
) -> int:
    """Index of a minimum-fitness member of ``pool``, ties uniform."""
    worst = _minimum_set(fitness)
    return worst[rng.below(len(worst))]


def remove_worst_diversity(
    pool: Sequence[BitString], fitness: Sequence[int], rng: RandomSource
) -> int:
    """Index to remove, sparing a maximum-Hamming pair among the worst.

    With three or more minimum-fitness members, the pair at maximum Hamming
    distance (seeded tie-break) is protected and one of the others is removed
    uniformly. With at most two, one of them is removed uniformly.
    """
    worst = _minimum_set(fitness)
    if len(worst) <= 2:
        return worst[rng.below(len(worst))]
    a, b = max_hamming_pair_indices([pool[i] for i in worst], rng)
    rest = [idx for pos, idx in enumerate(worst) if pos != a and pos != b]
    return rest[rng.below(len(rest))]


def init_state(cfg: GaConfig, params: ProblemParams, rng: RandomSource) -> GaState:
    population = [random_bitstring(params.n, rng) for _ in range(cfg.mu)]
    fitness = [jump_value(ones_count(x), params.n, params.k) for x in population]
    return GaState(population, fitness, evaluations=cfg.mu)


def ga_step(
    state: GaState, cfg: GaConfig, params: ProblemParams, rng: RandomSource
) -> GaState:
    """Advance ``state`` in place by one offspring and return it."""
    if state.evaluations >= cfg.max_evaluations:
        raise BudgetExhausted(state.evaluations)
    child = make_offspring(state.population, cfg.variation.p_c, rng)
    pool = state.population + [child]
    fitness = state.fitness + [jump_value(ones_count(child), params.n, params.k)]
    state.evaluations += 1
    remove = remove_worst_diversity if cfg.diversity else remove_worst_original
    z = remove(pool, fitness, rng)
    del pool[z]
    del fitness[z]
    state.population = pool
    state.fitness = fitness
    return state


class GaRun:
    """Pure-Python (mu+1)-GA run on Jump; mirrors the compiled runner's API."""

    problem = ProblemId.JUMP

    def __init__(
        self, n: int, k: int, mu: int, p_c: float, diversity: bool, seed: int
    ) -> None:
        self.params = ProblemParams(n, k)
        self.params.validate(self.problem)
        self.cfg = GaConfig(mu, VariationConfig(p_c), diversity, 2**63)
        self.rng = RandomSource(seed)
        self.state = init_state(self.cfg, self.params, self.rng)
        self._optimum = self.params.n + self.params.k
        self.success = self._optimum in self.state.fitness

    @property
    def evaluations(self) -> int:
        return self.state.evaluations

    def population_values(self) -> list[int]:
        return [x.value for x in self.state.population]

    def step(self) -> None:
        ga_step(self.state, self.cfg, self.params, self.rng)
        if not self.success:
            self.success = self._optimum in self.state.fitness

    def run(self, max_evaluations: int) -> tuple[int, bool]:
        while not self.success and self.state.evaluations + 1 <= max_evaluations:
            self.step()
        return self.state.evaluations, self.success
