"""Diversity-maintaining evolutionary algorithms on Jump and OneJumpZeroJump."""

from .backend import DEFAULT_BACKEND, Algorithm, make_runner, runner_class
from .bitstring import BitString, RandomSource, derive_seed, hamming, ones_count
from .problems import ProblemId, ProblemParams, dominates, evaluate, pareto_front

__all__ = [
    "Algorithm",
    "BitString",
    "DEFAULT_BACKEND",
    "ProblemId",
    "ProblemParams",
    "RandomSource",
    "derive_seed",
    "dominates",
    "evaluate",
    "hamming",
    "make_runner",
    "ones_count",
    "pareto_front",
    "runner_class",
]

__version__ = "0.1.0"
