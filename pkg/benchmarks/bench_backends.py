"""Throughput of the compiled core against the pure-Python runners.

Runs each algorithm for a fixed evaluation budget under both backends with the
same seeds, checks that they end in the same state, and reports nanoseconds
per fitness evaluation.

    python benchmarks/bench_backends.py --n 30 --budget 20000
"""

from __future__ import annotations

import argparse
import time

from diversity_ea.backend import available_backends, make_runner
from diversity_ea.harness import paper_defaults
from diversity_ea.problems import ProblemParams


def time_runs(algo: str, n: int, k: int, diversity: bool, backend: str, budget: int, seeds: int):
    mu = paper_defaults(None, algo, ProblemParams(n, k))
    evaluations = 0
    finals = []
    start = time.perf_counter()
    for seed in range(seeds):
        runner = make_runner(algo, n, k, mu, 0.5, diversity, seed, backend=backend)
        # step past success too, so both backends do identical work
        while runner.evaluations + (mu if algo == "nsga2" else 1) <= budget:
            runner.step()
        evaluations += runner.evaluations
        finals.append(tuple(runner.population_values()))
    elapsed = time.perf_counter() - start
    return elapsed / evaluations * 1e9, finals


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=30)
    parser.add_argument("--k", type=int, default=4)
    parser.add_argument("--budget", type=int, default=20_000)
    parser.add_argument("--seeds", type=int, default=3)
    args = parser.parse_args()

    if "compiled" not in available_backends():
        print("compiled core not built; only the Python backend is available")
    backends = available_backends()
    print(f"{'algo':6} {'diversity':9} " + " ".join(f"{b + ' ns/eval':>18}" for b in backends) + "   speedup")
    for algo in ("ga", "nsga2", "sms"):
        for diversity in (False, True):
            results = {
                b: time_runs(algo, args.n, args.k, diversity, b, args.budget, args.seeds) for b in backends
            }
            if len(backends) == 2:
                assert results["compiled"][1] == results["python"][1], "backends diverged"
            cols = " ".join(f"{results[b][0]:18.0f}" for b in backends)
            speedup = (
                f"{results['python'][0] / results['compiled'][0]:9.1f}x" if len(backends) == 2 else ""
            )
            print(f"{algo:6} {str(diversity):9} {cols} {speedup}")


if __name__ == "__main__":
    main()
