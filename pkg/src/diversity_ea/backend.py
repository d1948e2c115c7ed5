"""Runner selection: the compiled core when it imported, else pure Python.

Both backends expose the same runner API (``run``, ``step``, ``evaluations``,
``success``, ``population_values``) and consume the random stream identically.
"""

from __future__ import annotations

import enum

from . import ga, nsga2, sms_emoa

try:
    from . import _core
except ImportError:  # extension not built
    _core = None

COMPILED_MAX_N = 64


class Algorithm(str, enum.Enum):
    GA = "ga"
    NSGA2 = "nsga2"
    SMS = "sms"


_PYTHON = {Algorithm.GA: ga.GaRun, Algorithm.NSGA2: nsga2.NsgaRun, Algorithm.SMS: sms_emoa.SmsRun}
_COMPILED = (
    {Algorithm.GA: _core.GaRun, Algorithm.NSGA2: _core.NsgaRun, Algorithm.SMS: _core.SmsRun}
    if _core is not None
    else {}
)

DEFAULT_BACKEND = "compiled" if _core is not None else "python"


def available_backends() -> list[str]:
    return ["compiled", "python"] if _core is not None else ["python"]


def runner_class(algo: Algorithm | str, n: int, backend: str | None = None):
    """Runner type for ``algo`` at string length ``n``.

    Args:
        backend: ``"compiled"``, ``"python"`` or None for the default. The
            compiled core packs strings into one machine word, so longer
            strings always use Python.
    """
    algo = Algorithm(algo)
    backend = backend or DEFAULT_BACKEND
    if backend not in ("compiled", "python"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "compiled":
        if _core is None:
            raise RuntimeError("compiled core is not available in this install")
        if n <= COMPILED_MAX_N:
            return _COMPILED[algo]
    return _PYTHON[algo]


def make_runner(
    algo: Algorithm | str,
    n: int,
    k: int,
    mu: int,
    p_c: float,
    diversity: bool,
    seed: int,
    selection: str = "uniform",
    backend: str | None = None,
):
    cls = runner_class(algo, n, backend)
    if Algorithm(algo) is Algorithm.NSGA2:
        return cls(n, k, mu, p_c, diversity, seed, selection=nsga2.Selection(selection).value)
    return cls(n, k, mu, p_c, diversity, seed)
