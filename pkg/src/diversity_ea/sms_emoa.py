"""Steady-state SMS-EMOA with exact 2-D hypervolume contributions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .base import BudgetExhausted
from .bitstring import BitString, RandomSource, max_hamming_pair_indices, random_bitstring
from .nsga2 import non_dominated_sort
from .problems import ObjectiveVector, ProblemId, ProblemParams, is_success, ojzj_eval
from .variation import VariationConfig, make_offspring

DEFAULT_REFERENCE = (0, 0)


@dataclass(frozen=True)
class SmsConfig:
    mu: int
    reference: tuple[int, int] = DEFAULT_REFERENCE
    variation: VariationConfig = field(default_factory=VariationConfig)
    diversity: bool = False
    max_evaluations: int = 10**8

    def __post_init__(self) -> None:
        if self.mu < 2:
            raise ValueError(f"mu must be at least 2, got {self.mu}")


def default_population_size(p: ProblemParams) -> int:
    return 2 * (p.n - 2 * p.k + 3)


def hypervolume_2d(points: Sequence[ObjectiveVector], r: Sequence[int] = DEFAULT_REFERENCE) -> int:
    """Area dominated by ``points`` and bounded below by ``r`` (maximization)."""
    r1, r2 = r
    for a, b in points:
        if a < r1 or b < r2:
            raise ValueError(f"point {(a, b)} lies below the reference point {tuple(r)}")
    area = 0
    level = r2
    for a, b in sorted(points, reverse=True):
        if b > level:
            area += (a - r1) * (b - level)
            level = b
    return area


def delta_contribution(
    index: int, front: Sequence[ObjectiveVector], r: Sequence[int] = DEFAULT_REFERENCE
) -> int:
    """Hypervolume lost when ``front[index]`` is removed from ``front``."""
    rest = [v for i, v in enumerate(front) if i != index]
    return hypervolume_2d(front, r) - hypervolume_2d(rest, r)


def delta_contributions(
    front: Sequence[ObjectiveVector], r: Sequence[int] = DEFAULT_REFERENCE
) -> list[int]:
    """All contributions of a mutually non-dominating ``front`` in one sweep.

    Sorted by the first objective, each point owns the box between its
    neighbours; a copy of a duplicated vector has a neighbour with an equal
    coordinate and so owns nothing.
    """
    size = len(front)
    order = sorted(range(size), key=lambda p: front[p][0])
    out = [0] * size
    for t, p in enumerate(order):
        left = front[order[t - 1]][0] if t > 0 else r[0]
        below = front[order[t + 1]][1] if t + 1 < size else r[1]
        out[p] = (front[p][0] - left) * (front[p][1] - below)
    return out


class DeltaLedger:
    """Counts removals and those where a duplicated vector had non-zero contribution."""

    def __init__(self) -> None:
        self.checks = 0
        self.violations = 0

    def record(self, vectors: Sequence[ObjectiveVector], deltas: Sequence[int]) -> None:
        self.checks += 1
        seen: dict[ObjectiveVector, int] = {}
        for v in vectors:
            seen[v] = seen.get(v, 0) + 1
        if any(seen[v] > 1 and d != 0 for v, d in zip(vectors, deltas)):
            self.violations += 1


def _last_front_deltas(last, objectives, r, ledger):
    vectors = [objectives[i] for i in last]
    deltas = delta_contributions(vectors, r)
    if ledger is not None:
        ledger.record(vectors, deltas)
    return deltas


def _argmin_delta(last, deltas, rng):
    low = min(deltas)
    candidates = [i for i, d in zip(last, deltas) if d == low]
    return candidates[rng.below(len(candidates))]


def remove_original(
    pool: Sequence[BitString],
    objectives: Sequence[ObjectiveVector],
    r: Sequence[int],
    rng: RandomSource,
    ledger: DeltaLedger | None = None,
) -> int:
    """Index of a minimum-contribution member of the last front, ties uniform."""
    last = non_dominated_sort(objectives)[-1]
    deltas = _last_front_deltas(last, objectives, r, ledger)
    return _argmin_delta(last, deltas, rng)


def remove_diversity(
    pool: Sequence[BitString],
    objectives: Sequence[ObjectiveVector],
    r: Sequence[int],
    rng: RandomSource,
    ledger: DeltaLedger | None = None,
) -> int:
    """Index to remove from the most crowded objective vector of the last front.

    If that vector holds more than two solutions, a maximum-Hamming pair among
    them is spared and one of the rest is removed uniformly; otherwise the
    minimum-contribution rule applies. Ties between equally crowded vectors
    are broken uniformly, in order of first appearance.
    """
    last = non_dominated_sort(objectives)[-1]
    deltas = _last_front_deltas(last, objectives, r, ledger) if ledger is not None else None
    groups: dict[ObjectiveVector, list[int]] = {}
    for i in last:
        groups.setdefault(objectives[i], []).append(i)
    largest = max(len(g) for g in groups.values())
    if largest <= 2:
        if deltas is None:
            deltas = _last_front_deltas(last, objectives, r, None)
        return _argmin_delta(last, deltas, rng)
    crowded = [g for g in groups.values() if len(g) == largest]
    members = crowded[rng.below(len(crowded))]
    a, b = max_hamming_pair_indices([pool[i] for i in members], rng)
    rest = [i for pos, i in enumerate(members) if pos != a and pos != b]
    return rest[rng.below(len(rest))]


@dataclass
class SmsState:
    population: list[BitString]
    objectives: list[ObjectiveVector]
    evaluations: int


def init_state(cfg: SmsConfig, params: ProblemParams, rng: RandomSource) -> SmsState:
    population = [random_bitstring(params.n, rng) for _ in range(cfg.mu)]
    return SmsState(population, [ojzj_eval(x, params) for x in population], cfg.mu)


def sms_step(
    state: SmsState,
    cfg: SmsConfig,
    params: ProblemParams,
    rng: RandomSource,
    ledger: DeltaLedger | None = None,
) -> SmsState:
    if state.evaluations >= cfg.max_evaluations:
        raise BudgetExhausted(state.evaluations)
    child = make_offspring(state.population, cfg.variation.p_c, rng)
    pool = state.population + [child]
    objectives = state.objectives + [ojzj_eval(child, params)]
    state.evaluations += 1
    remove = remove_diversity if cfg.diversity else remove_original
    z = remove(pool, objectives, cfg.reference, rng, ledger)
    del pool[z]
    del objectives[z]
    state.population = pool
    state.objectives = objectives
    return state


class SmsRun:
    """Pure-Python SMS-EMOA run on OneJumpZeroJump; mirrors the compiled runner."""

    problem = ProblemId.OJZJ

    def __init__(
        self, n: int, k: int, mu: int, p_c: float, diversity: bool, seed: int
    ) -> None:
        self.params = ProblemParams(n, k)
        self.params.validate(self.problem)
        self.cfg = SmsConfig(mu, DEFAULT_REFERENCE, VariationConfig(p_c), diversity, 2**63)
        self.rng = RandomSource(seed)
        self.ledger = DeltaLedger()
        self.state = init_state(self.cfg, self.params, self.rng)
        self.success = is_success(self.problem, self.state.population, self.params)

    @property
    def evaluations(self) -> int:
        return self.state.evaluations

    @property
    def delta_checks(self) -> int:
        return self.ledger.checks

    @property
    def delta_violations(self) -> int:
        return self.ledger.violations

    def population_values(self) -> list[int]:
        return [x.value for x in self.state.population]

    def step(self) -> None:
        sms_step(self.state, self.cfg, self.params, self.rng, self.ledger)
        self.success = is_success(self.problem, self.state.population, self.params)

    def run(self, max_evaluations: int) -> tuple[int, bool]:
        while not self.success and self.state.evaluations + 1 <= max_evaluations:
            self.step()
        return self.state.evaluations, self.success
