"""NSGA-II: non-dominated sorting, crowding distance, parent and survival selection.

Populations are plain lists of :class:`BitString` with a parallel list of
objective tuples; fronts and selections are lists of indices into them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

from .base import BudgetExhausted
from .bitstring import BitString, RandomSource, max_hamming_pair_indices, random_bitstring
from .problems import ObjectiveVector, ProblemId, ProblemParams, is_success, ojzj_eval
from .variation import VariationConfig, bitwise_mutation, uniform_crossover

INF = math.inf
LEDGER_TOLERANCE = 1e-9


class Selection(str, enum.Enum):
    FAIR = "fair"
    UNIFORM = "uniform"
    TOURNAMENT = "tournament"


@dataclass(frozen=True)
class NsgaConfig:
    mu: int
    variation: VariationConfig = field(default_factory=VariationConfig)
    diversity: bool = False
    selection: Selection = Selection.UNIFORM
    max_evaluations: int = 10**8

    def __post_init__(self) -> None:
        if self.mu < 2 or self.mu % 2:
            raise ValueError(f"NSGA-II needs an even mu >= 2, got {self.mu}")
        object.__setattr__(self, "selection", Selection(self.selection))


def default_population_size(p: ProblemParams) -> int:
    mu = 4 * (p.n - 2 * p.k + 3)
    return mu + (mu % 2)


def _weakly_better(u: ObjectiveVector, v: ObjectiveVector) -> bool:
    return all(a >= b for a, b in zip(u, v))


def non_dominated_sort(objectives: Sequence[ObjectiveVector]) -> list[list[int]]:
    """Partition indices into fronts R_1..R_v; each front in ascending index order."""
    size = len(objectives)
    if size == 0:
        raise ValueError("cannot sort an empty pool")
    dominated_by: list[list[int]] = [[] for _ in range(size)]
    count = [0] * size
    for i in range(size):
        u = objectives[i]
        for j in range(i + 1, size):
            v = objectives[j]
            if u == v:
                continue
            if _weakly_better(u, v):
                dominated_by[i].append(j)
                count[j] += 1
            elif _weakly_better(v, u):
                dominated_by[j].append(i)
                count[i] += 1
    fronts = []
    current = [i for i in range(size) if count[i] == 0]
    while current:
        fronts.append(current)
        nxt = []
        for i in current:
            for j in dominated_by[i]:
                count[j] -= 1
                if count[j] == 0:
                    nxt.append(j)
        current = sorted(nxt)
    return fronts


def shuffled_range(size: int, rng: RandomSource) -> list[int]:
    perm = list(range(size))
    for i in range(size - 1, 0, -1):
        j = rng.below(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def diversity_reorder(
    order: list[int],
    values: Sequence[int],
    strings: Sequence[BitString],
    rng: RandomSource,
) -> list[int]:
    """Move a maximum-Hamming pair of each equal-value run to the run's ends.

    ``order`` lists positions sorted ascending by ``values``; it is modified in
    place and returned. Within a run the first element of the chosen pair is
    swapped to the front and the second to the back.
    """
    size = len(order)
    i = 0
    while i < size:
        j = i
        while j + 1 < size and values[order[j + 1]] == values[order[i]]:
            j += 1
        if j > i:
            a, b = max_hamming_pair_indices([strings[p] for p in order[i : j + 1]], rng)
            order[i], order[i + a] = order[i + a], order[i]
            order[j], order[i + b] = order[i + b], order[j]
        i = j + 1
    return order


class CrowdingLedger:
    """Counts crowding computations and violations of the front invariants.

    Checked per front: the interior per-objective contributions sum to at most
    2, the first and last solution of every sorted list is infinite, infinite
    totals occur only at those boundaries, and for two objectives at most four
    solutions per objective vector get positive crowding.
    """

    def __init__(self) -> None:
        self.checks = 0
        self.violations = 0

    def record(
        self,
        vectors: Sequence[ObjectiveVector],
        orders: Sequence[Sequence[int]],
        per_objective: Sequence[Sequence[float]],
        total: Sequence[float],
    ) -> None:
        self.checks += 1
        ok = True
        size = len(total)
        boundary = set()
        for order, dist in zip(orders, per_objective):
            ends = (order[0], order[-1])
            boundary.update(ends)
            if any(dist[p] != INF for p in ends):
                ok = False
            interior = sum(dist[p] for p in order[1:-1])
            if interior > 2.0 + LEDGER_TOLERANCE:
                ok = False
        if any((total[p] == INF) != (p in boundary) for p in range(size)):
            ok = False
        if len(orders) == 2:
            positive: dict[ObjectiveVector, int] = {}
            for p in range(size):
                if total[p] > 0:
                    positive[vectors[p]] = positive.get(vectors[p], 0) + 1
            if any(c > 4 for c in positive.values()):
                ok = False
        if not ok:
            self.violations += 1


def crowding_distance(
    front: Sequence[int],
    objectives: Sequence[ObjectiveVector],
    strings: Sequence[BitString],
    reorder: bool,
    rng: RandomSource,
    ledger: CrowdingLedger | None = None,
) -> list[float]:
    """Crowding distance of each member of ``front`` (aligned with ``front``).

    Per objective the front is sorted ascending with ties in seeded random
    order; with ``reorder`` on, :func:`diversity_reorder` then moves a
    maximum-Hamming pair of every tied run to the run's boundaries. When all
    values of an objective coincide the interior contributions are 0.
    """
    size = len(front)
    if size == 0:
        raise ValueError("empty front")
    vectors = [objectives[i] for i in front]
    members = [strings[i] for i in front]
    total = [0.0] * size
    orders = []
    per_objective = []
    for j in range(len(vectors[0])):
        values = [v[j] for v in vectors]
        order = sorted(shuffled_range(size, rng), key=values.__getitem__)
        if reorder:
            diversity_reorder(order, values, members, rng)
        dist = [0.0] * size
        if size <= 2:
            dist = [INF] * size
        else:
            dist[order[0]] = dist[order[-1]] = INF
            span = values[order[-1]] - values[order[0]]
            if span > 0:
                for t in range(1, size - 1):
                    dist[order[t]] = (values[order[t + 1]] - values[order[t - 1]]) / span
        for p in range(size):
            total[p] += dist[p]
        orders.append(order)
        per_objective.append(dist)
    if ledger is not None:
        ledger.record(vectors, orders, per_objective, total)
    return total


def score_population(
    objectives: Sequence[ObjectiveVector],
    strings: Sequence[BitString],
    reorder: bool,
    rng: RandomSource,
    ledger: CrowdingLedger | None = None,
) -> tuple[list[int], list[float]]:
    """Rank (1-based) and crowding distance of every member of a population."""
    ranks = [0] * len(objectives)
    crowding = [0.0] * len(objectives)
    for r, front in enumerate(non_dominated_sort(objectives), start=1):
        dist = crowding_distance(front, objectives, strings, reorder, rng, ledger)
        for i, d in zip(front, dist):
            ranks[i] = r
            crowding[i] = d
    return ranks, crowding


def select_parents(
    mu: int,
    scheme: Selection | str,
    rng: RandomSource,
    ranks: Sequence[int] | None = None,
    crowding: Sequence[float] | None = None,
) -> list[int]:
    """Indices of ``mu`` parents; consecutive entries form mating pairs."""
    scheme = Selection(scheme)
    if scheme is Selection.FAIR:
        return shuffled_range(mu, rng)
    if scheme is Selection.UNIFORM:
        return [rng.below(mu) for _ in range(mu)]
    if ranks is None or crowding is None:
        raise ValueError("tournament selection needs ranks and crowding")
    chosen = []
    for _ in range(mu):
        a = rng.below(mu)
        b = rng.below(mu)
        if a == b:
            chosen.append(a)
        elif ranks[a] != ranks[b]:
            chosen.append(a if ranks[a] < ranks[b] else b)
        elif crowding[a] != crowding[b]:
            chosen.append(a if crowding[a] > crowding[b] else b)
        else:
            chosen.append(a if rng.below(2) == 0 else b)
    return chosen


def select_by_crowding(
    front: Sequence[int], crowding: Sequence[float], slots: int, rng: RandomSource
) -> list[int]:
    """``slots`` members of ``front`` with the largest crowding, ties uniform."""
    cutoff = sorted(crowding, reverse=True)[slots - 1]
    chosen = [front[p] for p, d in enumerate(crowding) if d > cutoff]
    tied = [front[p] for p, d in enumerate(crowding) if d == cutoff]
    need = slots - len(chosen)
    if need < len(tied):
        for i in range(need):
            j = i + rng.below(len(tied) - i)
            tied[i], tied[j] = tied[j], tied[i]
    return chosen + tied[:need]


@dataclass
class NsgaState:
    population: list[BitString]
    objectives: list[ObjectiveVector]
    evaluations: int


def init_state(cfg: NsgaConfig, params: ProblemParams, rng: RandomSource) -> NsgaState:
    population = [random_bitstring(params.n, rng) for _ in range(cfg.mu)]
    return NsgaState(population, [ojzj_eval(x, params) for x in population], cfg.mu)


def nsga2_generation(
    state: NsgaState,
    cfg: NsgaConfig,
    params: ProblemParams,
    rng: RandomSource,
    ledger: CrowdingLedger | None = None,
) -> NsgaState:
    """One generation of NSGA-II on OneJumpZeroJump, updating ``state`` in place."""
    mu = cfg.mu
    if state.evaluations + mu > cfg.max_evaluations:
        raise BudgetExhausted(state.evaluations)
    population, objectives = state.population, state.objectives
    ranks = crowding = None
    if cfg.selection is Selection.TOURNAMENT:
        ranks, crowding = score_population(
            objectives, population, cfg.diversity, rng, ledger
        )
    parents = select_parents(mu, cfg.selection, rng, ranks, crowding)

    offspring = []
    for t in range(0, mu, 2):
        x, y = population[parents[t]], population[parents[t + 1]]
        if rng.bernoulli(cfg.variation.p_c):
            x, y = uniform_crossover(x, y, rng)
        offspring.append(bitwise_mutation(x, rng))
        offspring.append(bitwise_mutation(y, rng))
    pool = population + offspring
    pool_objectives = objectives + [ojzj_eval(x, params) for x in offspring]
    state.evaluations += mu

    survivors: list[int] = []
    for front in non_dominated_sort(pool_objectives):
        if len(survivors) + len(front) <= mu:
            survivors.extend(front)
            if len(survivors) == mu:
                break
            continue
        dist = crowding_distance(front, pool_objectives, pool, cfg.diversity, rng, ledger)
        survivors.extend(select_by_crowding(front, dist, mu - len(survivors), rng))
        break
    survivors.sort()
    state.population = [pool[i] for i in survivors]
    state.objectives = [pool_objectives[i] for i in survivors]
    return state


class NsgaRun:
    """Pure-Python NSGA-II run on OneJumpZeroJump; mirrors the compiled runner."""

    problem = ProblemId.OJZJ

    def __init__(
        self,
        n: int,
        k: int,
        mu: int,
        p_c: float,
        diversity: bool,
        seed: int,
        selection: Selection | str = Selection.UNIFORM,
    ) -> None:
        self.params = ProblemParams(n, k)
        self.params.validate(self.problem)
        self.cfg = NsgaConfig(mu, VariationConfig(p_c), diversity, selection, 2**63)
        self.rng = RandomSource(seed)
        self.ledger = CrowdingLedger()
        self.state = init_state(self.cfg, self.params, self.rng)
        self.success = is_success(self.problem, self.state.population, self.params)

    @property
    def evaluations(self) -> int:
        return self.state.evaluations

    @property
    def crowding_checks(self) -> int:
        return self.ledger.checks

    @property
    def crowding_violations(self) -> int:
        return self.ledger.violations

    def population_values(self) -> list[int]:
        return [x.value for x in self.state.population]

    def step(self) -> None:
        nsga2_generation(self.state, self.cfg, self.params, self.rng, self.ledger)
        self.success = is_success(self.problem, self.state.population, self.params)

    def run(self, max_evaluations: int) -> tuple[int, bool]:
        while not self.success and self.state.evaluations + self.cfg.mu <= max_evaluations:
            self.step()
        return self.state.evaluations, self.success
