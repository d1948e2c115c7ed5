import collections
import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from diversity_ea.bitstring import BitString, RandomSource, hamming
from diversity_ea.nsga2 import (
    INF,
    CrowdingLedger,
    NsgaConfig,
    NsgaRun,
    NsgaState,
    Selection,
    crowding_distance,
    default_population_size,
    diversity_reorder,
    init_state,
    non_dominated_sort,
    nsga2_generation,
    score_population,
    select_by_crowding,
    select_parents,
)
from diversity_ea.oracles import brute_nondominated_sort
from diversity_ea.problems import ProblemParams, ojzj_eval
from diversity_ea.variation import bitwise_mutation, uniform_crossover

from .conftest import bs


def test_default_population_sizes():
    assert default_population_size(ProblemParams(20, 4)) == 60
    assert default_population_size(ProblemParams(30, 4)) == 100
    assert default_population_size(ProblemParams(10, 4)) == 20


def test_config_needs_even_mu():
    with pytest.raises(ValueError):
        NsgaConfig(7)


def test_sort_incomparable_is_one_front():
    assert non_dominated_sort([(1, 4), (2, 3), (3, 2), (4, 1)]) == [[0, 1, 2, 3]]


def test_sort_chain_is_singletons():
    vecs = [(3, 3), (1, 1), (4, 4), (2, 2)]
    assert non_dominated_sort(vecs) == [[2], [0], [3], [1]]


def test_sort_equal_vectors_share_a_front():
    assert non_dominated_sort([(2, 2), (2, 2), (1, 1)]) == [[0, 1], [2]]


pools = st.lists(st.tuples(st.integers(0, 12), st.integers(0, 12)), min_size=1, max_size=60)


@given(pools)
def test_sort_matches_oracle(vecs):
    fronts = non_dominated_sort(vecs)
    assert [set(f) for f in fronts] == brute_nondominated_sort(vecs)
    for f in fronts:
        assert f == sorted(f)


def _front_of(vecs, strings, reorder, seed, ledger=None):
    return crowding_distance(list(range(len(vecs))), vecs, strings, reorder, RandomSource(seed), ledger)


def test_crowding_small_fronts_are_infinite():
    s = [BitString.zeros(4)] * 2
    assert _front_of([(1, 2)], s[:1], False, 0) == [INF]
    assert _front_of([(1, 2), (2, 1)], s, True, 0) == [INF, INF]


def test_crowding_three_point_example():
    vecs = [(1, 4), (2, 2), (4, 1)]
    d = _front_of(vecs, [BitString.zeros(3)] * 3, False, 0)
    assert d[0] == d[2] == INF
    assert d[1] == 2.0


def test_crowding_flat_objective_gives_zero_interior():
    vecs = [(5, 1), (5, 2), (5, 3), (5, 4)]
    strings = [BitString(i, 4) for i in range(4)]
    d = _front_of(vecs, strings, False, 3)
    # f2 sorted: the middle two get (gap 2)/(span 3) each, f1 adds 0 or inf
    finite = sorted(x for x in d if x != INF)
    for x in finite:
        assert x == pytest.approx(2 / 3)


def test_diversity_reorder_distinct_values_unchanged(rng):
    order = [0, 1, 2]
    assert diversity_reorder(order[:], [1, 2, 3], [bs("00"), bs("01"), bs("11")], rng) == order


def test_diversity_reorder_unique_pair_goes_to_ends(rng):
    strings = [bs("1110"), bs("0001"), bs("1100")]
    for seed in range(20):
        order = diversity_reorder([2, 0, 1], [7, 7, 7], strings, RandomSource(seed))
        assert {order[0], order[-1]} == {0, 1}


def test_diversity_reorder_equidistant_triple():
    strings = [bs("110000"), bs("001100"), bs("000011")]
    ends = collections.Counter()
    for seed in range(3000):
        order = diversity_reorder([0, 1, 2], [5, 5, 5], strings, RandomSource(seed))
        assert sorted(order) == [0, 1, 2]
        ends[frozenset((order[0], order[-1]))] += 1
    assert len(ends) == 3
    assert min(ends.values()) > 800


def test_reordered_boundaries_hold_max_pair():
    strings = [bs("1010"), bs("1011"), bs("0101"), bs("1111")]
    vecs = [(3, 3)] * 4
    ledger = CrowdingLedger()
    for seed in range(50):
        d = _front_of(vecs, strings, True, seed, ledger)
        boundary = [i for i, x in enumerate(d) if x == INF]
        assert max(hamming(strings[i], strings[j]) for i in boundary for j in boundary) == 4
    assert ledger.violations == 0


@given(st.integers(12, 24), st.integers(0, 2**32), st.integers(3, 40), st.booleans())
def test_crowding_invariants_on_random_ojzj_fronts(n, seed, size, reorder):
    k = 3
    p = ProblemParams(n, k)
    r = random.Random(seed)
    strings = [BitString.with_ones(n, r.choice(range(k, n - k + 1))) for _ in range(size)]
    strings = [BitString(r.getrandbits(n) if r.random() < 0.5 else s.value, n) for s in strings]
    vecs = [ojzj_eval(x, p) for x in strings]
    front = non_dominated_sort(vecs)[0]
    ledger = CrowdingLedger()
    d = crowding_distance(front, vecs, strings, reorder, RandomSource(seed), ledger)
    assert ledger.checks == 1 and ledger.violations == 0
    assert all(x >= 0 for x in d)


def test_ledger_flags_a_bad_front():
    ledger = CrowdingLedger()
    ledger.record([(1, 1)] * 3, [[0, 1, 2]], [[INF, 5.0, INF]], [INF, 5.0, INF])
    assert ledger.violations == 1


def test_fair_selection_is_a_permutation(rng):
    for _ in range(20):
        assert sorted(select_parents(10, "fair", rng)) == list(range(10))


def test_uniform_selection_counts():
    rng = RandomSource(3)
    mu, gens = 8, 10_000
    counts = np.zeros(mu)
    for _ in range(gens):
        for i in select_parents(mu, Selection.UNIFORM, rng):
            counts[i] += 1
    se = math.sqrt((1 - 1 / mu) / gens)
    assert np.all(np.abs(counts / gens - 1) < 3 * se)


def test_tournament_prefers_better_rank_then_crowding():
    ranks = [1, 2]
    crowd = [INF, INF]
    picks = collections.Counter()
    for seed in range(500):
        picks.update(select_parents(2, "tournament", RandomSource(seed), ranks, crowd))
    # index 1 wins only when it meets itself
    assert picks[1] < picks[0]
    with pytest.raises(ValueError):
        select_parents(2, "tournament", RandomSource(0))


def test_tournament_strict_winner_always_wins():
    # pairwise: the (1, inf) member beats the (3, 0.5) member whenever they meet
    for seed in range(300):
        r1, r2 = RandomSource(seed), RandomSource(seed)
        chosen = select_parents(2, "tournament", r1, [1, 3], [INF, 0.5])
        draws = [(r2.below(2), r2.below(2)) for _ in range(2)]
        for c, (a, b) in zip(chosen, draws):
            assert c == (a if a == b else 0)


def test_select_by_crowding_keeps_largest():
    front = [10, 11, 12, 13]
    chosen = select_by_crowding(front, [INF, 0.5, 1.0, 0.5], 2, RandomSource(0))
    assert sorted(chosen) == [10, 12]
    picks = collections.Counter()
    for seed in range(2000):
        picks.update(select_by_crowding(front, [INF, 0.5, 1.0, 0.5], 3, RandomSource(seed)))
    assert picks[10] == picks[12] == 2000
    assert abs(picks[11] - picks[13]) < 200


def test_generation_size_and_accounting():
    p = ProblemParams(12, 3)
    for sel in Selection:
        cfg = NsgaConfig(12, selection=sel, diversity=True)
        rng = RandomSource(5)
        state = init_state(cfg, p, rng)
        ledger = CrowdingLedger()
        for g in range(1, 21):
            nsga2_generation(state, cfg, p, rng, ledger)
            assert len(state.population) == 12
            assert state.evaluations == 12 + 12 * g
            assert state.objectives == [ojzj_eval(x, p) for x in state.population]
        assert ledger.violations == 0


def _replay_offspring(pop, mu, p_c, seed):
    rng = RandomSource(seed)
    parents = select_parents(mu, Selection.UNIFORM, rng)
    kids = []
    for t in range(0, mu, 2):
        x, y = pop[parents[t]], pop[parents[t + 1]]
        if rng.bernoulli(p_c):
            x, y = uniform_crossover(x, y, rng)
        kids += [bitwise_mutation(x, rng), bitwise_mutation(y, rng)]
    return kids


def test_rank_one_solutions_survive_when_they_fit():
    p = ProblemParams(10, 2)
    pop = [BitString.with_ones(10, c) for c in (2, 5, 9, 9, 1, 1)]
    checked = 0
    for seed in range(300):
        pool = pop + _replay_offspring(pop, 6, 0.5, seed)
        vecs = [ojzj_eval(x, p) for x in pool]
        first = non_dominated_sort(vecs)[0]
        state = NsgaState(list(pop), [ojzj_eval(x, p) for x in pop], 6)
        nsga2_generation(state, NsgaConfig(6, diversity=bool(seed % 2)), p, RandomSource(seed))
        if len(first) <= 6:
            checked += 1
            for i in first:
                assert pool[i] in state.population
    assert checked > 50


def test_score_population_ranks(rng):
    vecs = [(1, 1), (3, 3), (2, 2)]
    ranks, crowd = score_population(vecs, [BitString.zeros(2)] * 3, False, rng)
    assert ranks == [3, 1, 2]
    assert crowd == [INF] * 3


def test_run_is_deterministic_and_succeeds():
    a = NsgaRun(10, 2, 16, 0.5, True, 3)
    b = NsgaRun(10, 2, 16, 0.5, True, 3)
    ra = a.run(10**6)
    assert ra == b.run(10**6) and ra[1]
    assert (ra[0] - 16) % 16 == 0
    assert a.crowding_checks > 0 and a.crowding_violations == 0
