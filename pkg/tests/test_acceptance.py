"""End-to-end acceptance checks, one test per criterion.

Each test records a ``criterion N: PASS|FAIL`` line that is printed in the
terminal summary. The reproduction sweep (criterion 1) runs once per session
and also feeds the ledger and determinism checks.
"""

import random
import statistics

import pytest
from scipy.stats import mannwhitneyu

from diversity_ea.bitstring import BitString
from diversity_ea.harness import (
    ExperimentConfig,
    LedgerTotals,
    emit_plot,
    records_to_csv,
    run_experiment,
    summarize,
)
from diversity_ea.nsga2 import non_dominated_sort
from diversity_ea.oracles import (
    brute_nondominated_sort,
    brute_objectives,
    brute_pareto_front,
    grid_delta,
    grid_hypervolume,
)
from diversity_ea.problems import ProblemParams, pareto_front
from diversity_ea.sms_emoa import delta_contribution, delta_contributions, hypervolume_2d

from .conftest import ACCEPTANCE_LINES
from .instrumentation import ga_trace, sms_trace

MASTER_SEED = 20240
SWEEP_N = (10, 15, 20, 25, 30)
COMPARE_N = (25, 30)
RUNS = 100
K = 4
ALPHA = 0.01
ALGOS = ("ga", "nsga2", "sms")


def report(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")


def sweep_config(algo: str, diversity: bool, n_values=SWEEP_N) -> ExperimentConfig:
    return ExperimentConfig(
        algo=algo, n_values=n_values, k=K, p_c=0.5, diversity=diversity,
        runs=RUNS, seed=MASTER_SEED,
    )


@pytest.fixture(scope="session")
def sweep(tmp_path_factory):
    """All criterion-1 cells: records and ledger totals per (algo, diversity)."""
    out = {}
    for algo in ALGOS:
        for diversity in (False, True):
            ledger = LedgerTotals()
            records = run_experiment(sweep_config(algo, diversity), ledger)
            out[algo, diversity] = (records, ledger)
    plot = tmp_path_factory.mktemp("sweep") / "sweep.svg"
    emit_plot(summarize([r for recs, _ in out.values() for r in recs]), plot)
    return out


def test_criterion_1_diversity_is_faster(sweep):
    failures, lines = [], []
    for algo in ALGOS:
        for n in COMPARE_N:
            div = [r.evaluations for r in sweep[algo, True][0] if r.n == n]
            orig = [r.evaluations for r in sweep[algo, False][0] if r.n == n]
            p = mannwhitneyu(div, orig, alternative="less").pvalue
            means = statistics.mean(div), statistics.mean(orig)
            medians = statistics.median(div), statistics.median(orig)
            ok = means[0] < means[1] and medians[0] < medians[1] and p < ALPHA
            lines.append(f"{algo} n={n} mean {means[0]:.0f}<{means[1]:.0f} p={p:.1e}")
            if not ok:
                failures.append(lines[-1])
    report(1, not failures, "; ".join(lines))
    assert not failures


def test_criterion_2_closed_form_front():
    cases = [(n, k) for n in range(5, 15) for k in range(2, n) if 2 * k < n]
    bad = []
    for n, k in cases:
        front = pareto_front(ProblemParams(n, k))
        if front != brute_pareto_front(n, k) or len(front) != n - 2 * k + 3:
            bad.append((n, k))
    report(2, not bad, f"{len(cases)} (n, k) pairs, mismatches {bad}")
    assert not bad


def _random_pool(r: random.Random):
    problem = r.choice(("jump", "ojzj"))
    n = r.randint(5, 16)
    k = r.randint(2, n - 1) if problem == "jump" else r.randint(2, (n - 1) // 2)
    size = r.randint(1, 200)
    values = []
    for _ in range(size):
        if r.random() < 0.5:
            values.append(r.getrandbits(n))
        else:
            ones = r.sample(range(n), r.randint(0, n))
            values.append(sum(1 << i for i in ones))
    return [brute_objectives(problem, n, k, v) for v in values]


def test_criterion_3_sorting_matches_oracle():
    r = random.Random(MASTER_SEED)
    bad = 0
    for _ in range(1000):
        vecs = _random_pool(r)
        if [set(f) for f in non_dominated_sort(vecs)] != brute_nondominated_sort(vecs):
            bad += 1
    report(3, bad == 0, f"1000 random pools, {bad} mismatches")
    assert bad == 0


def _random_front(r: random.Random):
    size = r.randint(1, 25)
    xs = sorted(r.sample(range(1, 101), size))
    ys = sorted(r.sample(range(1, 101), size), reverse=True)
    front = list(zip(xs, ys))
    front += [r.choice(front) for _ in range(r.randint(0, 3))]
    r.shuffle(front)
    return front


def test_criterion_4_hypervolume_matches_grid():
    r = random.Random(MASTER_SEED + 1)
    bad = 0
    for _ in range(500):
        front = _random_front(r)
        if hypervolume_2d(front) != grid_hypervolume(front):
            bad += 1
            continue
        fast = delta_contributions(front)
        for i in range(len(front)):
            if not fast[i] == delta_contribution(i, front) == grid_delta(i, front):
                bad += 1
                break
    report(4, bad == 0, f"500 random fronts, {bad} mismatches")
    assert bad == 0


def test_criterion_5_jmax_monotone():
    ga = [ga_trace(16, 4, 5, seed) for seed in range(50)]
    sms = [sms_trace(16, 4, seed) for seed in range(50)]
    violations = sum(t.violations for t in ga + sms)
    covered = all(t.finished and t.reached for t in ga + sms)
    observed = sum(t.observations for t in ga + sms)
    report(
        5, violations == 0 and covered,
        f"{observed} observations over 50 GA and 50 SMS-EMOA runs, {violations} violations",
    )
    assert covered
    assert violations == 0


def test_criterion_6_crowding_ledger(sweep):
    checks = sum(sweep["nsga2", d][1].crowding_checks for d in (False, True))
    violations = sum(sweep["nsga2", d][1].crowding_violations for d in (False, True))
    report(6, checks > 0 and violations == 0, f"{checks} fronts checked, {violations} violations")
    assert checks > 0
    assert violations == 0


def test_criterion_7_zero_delta_duplicates(sweep):
    checks = sum(sweep["sms", d][1].delta_checks for d in (False, True))
    violations = sum(sweep["sms", d][1].delta_violations for d in (False, True))
    report(7, checks > 0 and violations == 0, f"{checks} removals checked, {violations} violations")
    assert checks > 0
    assert violations == 0


def test_criterion_8_replay_is_byte_identical(sweep):
    cells = [(algo, d, n) for algo in ALGOS for d in (False, True) for n in (SWEEP_N[0], SWEEP_N[-1])]
    cells = [c for c in cells if not (c[0] == "sms" and not c[1] and c[2] == SWEEP_N[-1])]
    differing = []
    for algo, diversity, n in cells:
        first = records_to_csv(r for r in sweep[algo, diversity][0] if r.n == n)
        again = records_to_csv(run_experiment(sweep_config(algo, diversity, (n,))))
        if first.encode() != again.encode():
            differing.append((algo, diversity, n))
    report(8, not differing, f"{len(cells)} cells replayed, differing {differing}")
    assert not differing
