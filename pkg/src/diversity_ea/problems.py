"""Jump and OneJumpZeroJump, Pareto domination, and the exact Pareto front."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .bitstring import BitString, ones_count

ObjectiveVector = tuple[int, ...]


class ProblemId(str, enum.Enum):
    JUMP = "jump"
    OJZJ = "ojzj"


@dataclass(frozen=True)
class ProblemParams:
    n: int
    k: int

    def validate(self, problem: ProblemId | str) -> None:
        """Raise ``ValueError`` unless ``(n, k)`` is admissible for ``problem``."""
        problem = ProblemId(problem)
        if self.k < 2:
            raise ValueError(f"k must be at least 2, got {self.k}")
        if problem is ProblemId.JUMP and not self.k < self.n:
            raise ValueError(f"Jump needs k < n, got n={self.n}, k={self.k}")
        if problem is ProblemId.OJZJ and not 2 * self.k < self.n:
            raise ValueError(f"OneJumpZeroJump needs k < n/2, got n={self.n}, k={self.k}")


def jump_value(ones: int, n: int, k: int) -> int:
    """Jump fitness of any string with ``ones`` one-bits."""
    if ones <= n - k or ones == n:
        return k + ones
    return n - ones


def jump_eval(x: BitString, p: ProblemParams) -> ObjectiveVector:
    return (jump_value(ones_count(x), p.n, p.k),)


def ojzj_eval(x: BitString, p: ProblemParams) -> ObjectiveVector:
    ones = ones_count(x)
    return (jump_value(ones, p.n, p.k), jump_value(p.n - ones, p.n, p.k))


def evaluate(problem: ProblemId | str, x: BitString, p: ProblemParams) -> ObjectiveVector:
    if ProblemId(problem) is ProblemId.JUMP:
        return jump_eval(x, p)
    return ojzj_eval(x, p)


class Relation(enum.Enum):
    """How ``u`` relates to ``v`` under maximization."""

    DOMINATES = "dominates"
    DOMINATED = "dominated"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def weakly_dominates(u: Sequence[int], v: Sequence[int]) -> bool:
    if len(u) != len(v):
        raise ValueError(f"arity mismatch: {len(u)} != {len(v)}")
    return all(a >= b for a, b in zip(u, v))


def strictly_dominates(u: Sequence[int], v: Sequence[int]) -> bool:
    return weakly_dominates(u, v) and tuple(u) != tuple(v)


def dominates(u: Sequence[int], v: Sequence[int]) -> Relation:
    if len(u) != len(v):
        raise ValueError(f"arity mismatch: {len(u)} != {len(v)}")
    ge = all(a >= b for a, b in zip(u, v))
    le = all(a <= b for a, b in zip(u, v))
    if ge and le:
        return Relation.EQUAL
    if ge:
        return Relation.DOMINATES
    if le:
        return Relation.DOMINATED
    return Relation.INCOMPARABLE


def pareto_optimal_ones(p: ProblemParams) -> list[int]:
    """One-bit counts of the Pareto-optimal OneJumpZeroJump solutions."""
    return [0, *range(p.k, p.n - p.k + 1), p.n]


def pareto_front(p: ProblemParams) -> set[ObjectiveVector]:
    total = p.n + 2 * p.k
    values = [*range(2 * p.k, p.n + 1), p.k, p.n + p.k]
    return {(a, total - a) for a in values}


def is_success(
    problem: ProblemId | str, population: Iterable[BitString], p: ProblemParams
) -> bool:
    """Jump: ``1^n`` present. OneJumpZeroJump: every front vector attained."""
    if ProblemId(problem) is ProblemId.JUMP:
        full = (1 << p.n) - 1
        return any(x.value == full for x in population)
    attained = {ones_count(x) for x in population}
    return all(c in attained for c in pareto_optimal_ones(p))
