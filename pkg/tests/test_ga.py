import collections

import pytest
from scipy.stats import chisquare

from diversity_ea.bitstring import BitString, RandomSource
from diversity_ea.ga import (
    GaConfig,
    GaRun,
    GaState,
    ga_step,
    init_state,
    remove_worst_diversity,
    remove_worst_original,
)
from diversity_ea.base import BudgetExhausted
from diversity_ea.problems import ProblemParams, jump_value

from .conftest import bs


def _fitness(pool, n, k):
    return [jump_value(x.value.bit_count(), n, k) for x in pool]


def test_config_rejects_tiny_population():
    with pytest.raises(ValueError):
        GaConfig(1)


def test_step_keeps_size_and_counts_one_evaluation():
    p = ProblemParams(12, 3)
    cfg = GaConfig(4, diversity=True)
    rng = RandomSource(1)
    state = init_state(cfg, p, rng)
    assert state.evaluations == 4
    for i in range(50):
        ga_step(state, cfg, p, rng)
        assert len(state.population) == len(state.fitness) == 4
        assert state.evaluations == 4 + i + 1
        assert state.fitness == _fitness(state.population, 12, 3)


def test_step_respects_budget():
    p = ProblemParams(12, 3)
    cfg = GaConfig(2, max_evaluations=3)
    rng = RandomSource(1)
    state = init_state(cfg, p, rng)
    ga_step(state, cfg, p, rng)
    with pytest.raises(BudgetExhausted):
        ga_step(state, cfg, p, rng)


def test_optimum_is_never_removed():
    n, k = 10, 3
    p = ProblemParams(n, k)
    plateau = BitString.with_ones(n, n - k)
    for diversity in (False, True):
        for seed in range(200):
            pop = [plateau, BitString.ones(n), BitString.with_ones(n, 2)]
            state = GaState(pop, _fitness(pop, n, k), 3)
            ga_step(state, GaConfig(3, diversity=diversity), p, RandomSource(seed))
            assert BitString.ones(n) in state.population


def test_remove_original_unique_minimum():
    pool = [BitString.with_ones(8, 3), BitString.with_ones(8, 1), BitString.with_ones(8, 5)]
    assert remove_worst_original(pool, _fitness(pool, 8, 2), RandomSource(0)) == 1


def test_remove_original_valley_against_optimum():
    pool = [BitString.ones(8), BitString.with_ones(8, 7)]
    assert remove_worst_original(pool, _fitness(pool, 8, 2), RandomSource(0)) == 1


def test_remove_original_full_tie_is_uniform():
    pool = [BitString.with_ones(8, 4)] * 5
    counts = collections.Counter(
        remove_worst_original(pool, _fitness(pool, 8, 2), RandomSource(s)) for s in range(10_000)
    )
    assert sorted(counts) == list(range(5))
    assert chisquare(list(counts.values())).pvalue > 0.001


def test_remove_diversity_single_worst():
    pool = [BitString.with_ones(8, 3), BitString.with_ones(8, 6), BitString.with_ones(8, 6)]
    assert remove_worst_diversity(pool, _fitness(pool, 8, 2), RandomSource(0)) == 0


def test_remove_diversity_spares_unique_max_pair():
    pool = [bs("110000"), bs("000011"), bs("100010"), bs("111111")]
    fit = _fitness(pool, 6, 2)
    for seed in range(100):
        assert remove_worst_diversity(pool, fit, RandomSource(seed)) == 2


def test_remove_diversity_equidistant_is_uniform():
    pool = [bs("110000"), bs("001100"), bs("000011")]
    fit = _fitness(pool, 6, 2)
    counts = collections.Counter(remove_worst_diversity(pool, fit, RandomSource(s)) for s in range(9000))
    assert sorted(counts) == [0, 1, 2]
    assert chisquare(list(counts.values())).pvalue > 0.001


def test_run_reaches_optimum_and_is_deterministic():
    a = GaRun(10, 3, 2, 0.5, True, 42)
    b = GaRun(10, 3, 2, 0.5, True, 42)
    ra, rb = a.run(10**6), b.run(10**6)
    assert ra == rb and ra[1]
    assert BitString.ones(10).value in a.population_values()


def test_run_stops_at_cap():
    r = GaRun(20, 5, 2, 0.5, False, 0)
    evals, ok = r.run(50)
    assert not ok and evals == 50
