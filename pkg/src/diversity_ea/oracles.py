"""Brute-force references for tests.

Nothing here imports or reuses the main-path implementations: fronts come
from exhaustive enumeration and repeated pairwise scans, and areas from
counting unit cells.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class OracleBudget:
    max_n: int = 14
    max_pool: int = 256


DEFAULT_BUDGET = OracleBudget()


def _ones(value: int) -> int:
    return bin(value).count("1")


def _jump(ones: int, n: int, k: int) -> int:
    # written out from the definition again, deliberately not shared
    if ones <= n - k:
        return k + ones
    if ones == n:
        return k + n
    return n - ones


def brute_objectives(problem: str, n: int, k: int, value: int) -> tuple[int, ...]:
    ones = _ones(value)
    if problem == "jump":
        return (_jump(ones, n, k),)
    zeros = n - ones
    return (_jump(ones, n, k), _jump(zeros, n, k))


def _dominates(u: Sequence[int], v: Sequence[int]) -> bool:
    better = False
    for a, b in zip(u, v):
        if a < b:
            return False
        if a > b:
            better = True
    return better


def brute_pareto_front(
    n: int, k: int, problem: str = "ojzj", budget: OracleBudget = DEFAULT_BUDGET
) -> set[tuple[int, ...]]:
    """Non-dominated objective vectors over all ``2**n`` strings."""
    if n > budget.max_n:
        raise ValueError(f"n={n} exceeds the enumeration budget {budget.max_n}")
    attained = {brute_objectives(problem, n, k, v) for v in range(1 << n)}
    return {u for u in attained if not any(_dominates(w, u) for w in attained)}


def brute_nondominated_sort(
    objectives: Sequence[Sequence[int]], budget: OracleBudget = DEFAULT_BUDGET
) -> list[set[int]]:
    """Fronts as index sets, peeled off by full pairwise scans."""
    if len(objectives) > budget.max_pool:
        raise ValueError(f"pool of {len(objectives)} exceeds budget {budget.max_pool}")
    remaining = set(range(len(objectives)))
    fronts = []
    while remaining:
        front = {
            i
            for i in remaining
            if not any(_dominates(objectives[j], objectives[i]) for j in remaining)
        }
        fronts.append(front)
        remaining -= front
    return fronts


def grid_hypervolume(points: Sequence[Sequence[int]], r: Sequence[int] = (0, 0)) -> int:
    """Number of unit cells ``[c, c+1)^2`` above ``r`` whose upper corner is dominated."""
    if not points:
        return 0
    top1 = max(p[0] for p in points)
    top2 = max(p[1] for p in points)
    grid = np.zeros((max(top1 - r[0], 0), max(top2 - r[1], 0)), dtype=bool)
    for a, b in points:
        grid[: max(a - r[0], 0), : max(b - r[1], 0)] = True
    return int(grid.sum())


def grid_delta(index: int, points: Sequence[Sequence[int]], r: Sequence[int] = (0, 0)) -> int:
    rest = [p for i, p in enumerate(points) if i != index]
    return grid_hypervolume(points, r) - grid_hypervolume(rest, r)
