"""Seeded replication sweeps, summary statistics, CSV and SVG output."""

from __future__ import annotations

import csv
import io
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

from .backend import Algorithm, make_runner
from .bitstring import derive_seed
from .nsga2 import Selection
from .problems import ProblemId, ProblemParams

CSV_FIELDS = (
    "algo", "problem", "n", "k", "mu", "pc", "diversity",
    "selection", "run", "seed", "evaluations", "success",
)
DEFAULT_MAX_EVALUATIONS = 10**8
NO_SELECTION = "none"

_PROBLEM_OF = {Algorithm.GA: ProblemId.JUMP, Algorithm.NSGA2: ProblemId.OJZJ, Algorithm.SMS: ProblemId.OJZJ}


class ConfigError(ValueError):
    """Raised for an invalid or inconsistent experiment configuration."""


def paper_defaults(problem: ProblemId | str, algo: Algorithm | str, p: ProblemParams) -> int:
    """Default mu: 2 for the GA, 4(n-2k+3) rounded up to even for NSGA-II, 2(n-2k+3) for SMS-EMOA."""
    algo = Algorithm(algo)
    if algo is Algorithm.GA:
        return 2
    front = p.n - 2 * p.k + 3
    if algo is Algorithm.NSGA2:
        mu = 4 * front
        return mu + (mu % 2)
    return 2 * front


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep over ``n_values`` for a fixed algorithm and diversity setting.

    ``mu=None`` selects :func:`paper_defaults` for each ``n``.
    """

    algo: Algorithm
    n_values: tuple[int, ...]
    k: int
    problem: ProblemId | None = None
    mu: int | None = None
    p_c: float = 0.5
    diversity: bool = False
    selection: Selection = Selection.UNIFORM
    runs: int = 100
    seed: int = 0
    max_evaluations: int = DEFAULT_MAX_EVALUATIONS
    jobs: int = 1
    backend: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "algo", Algorithm(self.algo))
            object.__setattr__(self, "selection", Selection(self.selection))
            expected = _PROBLEM_OF[self.algo]
            problem = expected if self.problem is None else ProblemId(self.problem)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if problem is not expected:
            raise ConfigError(f"{self.algo.value} runs on {expected.value}, not {problem.value}")
        object.__setattr__(self, "problem", problem)
        object.__setattr__(self, "n_values", tuple(self.n_values))
        if not self.n_values:
            raise ConfigError("n list is empty")
        if self.runs < 1:
            raise ConfigError(f"runs must be at least 1, got {self.runs}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be at least 1, got {self.jobs}")
        if self.max_evaluations < 1:
            raise ConfigError("max evaluations must be positive")
        if not 0.0 <= self.p_c <= 1.0:
            raise ConfigError(f"p_c must lie in [0, 1], got {self.p_c}")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        for n in self.n_values:
            try:
                ProblemParams(n, self.k).validate(problem)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            mu = self.population_size(n)
            if mu < 2 or (self.algo is Algorithm.NSGA2 and mu % 2):
                raise ConfigError(f"invalid population size {mu} for {self.algo.value}")

    def population_size(self, n: int) -> int:
        if self.mu is not None:
            return self.mu
        return paper_defaults(self.problem, self.algo, ProblemParams(n, self.k))

    @property
    def selection_label(self) -> str:
        return self.selection.value if self.algo is Algorithm.NSGA2 else NO_SELECTION


@dataclass(frozen=True)
class RunRecord:
    algo: str
    problem: str
    n: int
    k: int
    mu: int
    pc: float
    diversity: bool
    selection: str
    run: int
    seed: int
    evaluations: int
    success: bool

    @property
    def key(self) -> tuple:
        return (self.algo, self.problem, self.n, self.k, self.mu, self.pc, self.diversity, self.selection)


@dataclass
class LedgerTotals:
    """Invariant-check counters summed over every replication of a sweep."""

    crowding_checks: int = 0
    crowding_violations: int = 0
    delta_checks: int = 0
    delta_violations: int = 0

    def add(self, other: LedgerTotals) -> None:
        self.crowding_checks += other.crowding_checks
        self.crowding_violations += other.crowding_violations
        self.delta_checks += other.delta_checks
        self.delta_violations += other.delta_violations


@dataclass(frozen=True)
class _Task:
    cfg: ExperimentConfig
    n: int
    run: int


def _run_one(task: _Task) -> tuple[RunRecord, LedgerTotals]:
    cfg = task.cfg
    mu = cfg.population_size(task.n)
    seed = derive_seed(cfg.seed, task.run)
    runner = make_runner(
        cfg.algo, task.n, cfg.k, mu, cfg.p_c, cfg.diversity, seed,
        selection=cfg.selection.value, backend=cfg.backend,
    )
    evaluations, success = runner.run(cfg.max_evaluations)
    if not success:
        # the cap is what a failed run is charged
        evaluations = cfg.max_evaluations
    record = RunRecord(
        cfg.algo.value, cfg.problem.value, task.n, cfg.k, mu, cfg.p_c, cfg.diversity,
        cfg.selection_label, task.run, seed, int(evaluations), bool(success),
    )
    totals = LedgerTotals(
        getattr(runner, "crowding_checks", 0),
        getattr(runner, "crowding_violations", 0),
        getattr(runner, "delta_checks", 0),
        getattr(runner, "delta_violations", 0),
    )
    return record, totals


def run_experiment(
    cfg: ExperimentConfig,
    ledger: LedgerTotals | None = None,
    order: Sequence[int] | None = None,
) -> list[RunRecord]:
    """All replications of ``cfg``, sorted by ``(n, run)``.

    Args:
        ledger: if given, the runs' invariant counters are added to it.
        order: optional permutation of the task list, to show that scheduling
            does not matter. Seeds depend only on the master seed and run index.
    """
    tasks = [_Task(cfg, n, run) for n in cfg.n_values for run in range(cfg.runs)]
    if order is not None:
        tasks = [tasks[i] for i in order]
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_one, tasks, chunksize=max(1, len(tasks) // (4 * cfg.jobs))))
    else:
        results = [_run_one(t) for t in tasks]
    if ledger is not None:
        for _, totals in results:
            ledger.add(totals)
    return sorted((r for r, _ in results), key=lambda r: (r.n, r.run))


def run_experiments(
    configs: Iterable[ExperimentConfig], ledger: LedgerTotals | None = None
) -> list[RunRecord]:
    records = []
    for cfg in configs:
        records.extend(run_experiment(cfg, ledger))
    return records


# -- statistics -------------------------------------------------------------


@dataclass(frozen=True)
class SummaryRow:
    """Statistics of one configuration; ``None`` marks absent statistics."""

    key: tuple
    runs: int
    successes: int
    success_rate: float
    mean: float | None
    median: float | None
    stdev: float | None

    @property
    def n(self) -> int:
        return self.key[2]

    @property
    def diversity(self) -> bool:
        return self.key[6]


def summarize(records: Sequence[RunRecord]) -> list[SummaryRow]:
    """Group by configuration key, in first-appearance order.

    Mean, median and population standard deviation are taken over the
    successful runs only.
    """
    if not records:
        raise ValueError("no records to summarize")
    groups: dict[tuple, list[RunRecord]] = {}
    for r in records:
        groups.setdefault(r.key, []).append(r)
    rows = []
    for key, group in groups.items():
        done = [r.evaluations for r in group if r.success]
        rows.append(
            SummaryRow(
                key,
                len(group),
                len(done),
                len(done) / len(group),
                float(statistics.mean(done)) if done else None,
                float(statistics.median(done)) if done else None,
                float(statistics.pstdev(done)) if done else None,
            )
        )
    return rows


# -- CSV --------------------------------------------------------------------


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def records_to_csv(records: Iterable[RunRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in records:
        writer.writerow([_format(getattr(r, name)) for name in CSV_FIELDS])
    return buf.getvalue()


def write_csv(records: Iterable[RunRecord], path: str | Path) -> None:
    Path(path).write_text(records_to_csv(records), encoding="ascii")


def _parse_bool(text: str) -> bool:
    if text not in ("true", "false"):
        raise ValueError(f"expected true/false, got {text!r}")
    return text == "true"


def parse_csv(text: str) -> list[RunRecord]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != CSV_FIELDS:
        raise ValueError(f"unexpected CSV header {header}")
    out = []
    for row in reader:
        if len(row) != len(CSV_FIELDS):
            raise ValueError(f"malformed row {row}")
        v = dict(zip(CSV_FIELDS, row))
        out.append(
            RunRecord(
                v["algo"], v["problem"], int(v["n"]), int(v["k"]), int(v["mu"]),
                float(v["pc"]), _parse_bool(v["diversity"]), v["selection"],
                int(v["run"]), int(v["seed"]), int(v["evaluations"]), _parse_bool(v["success"]),
            )
        )
    return out


def read_csv(path: str | Path) -> list[RunRecord]:
    return parse_csv(Path(path).read_text(encoding="ascii"))


# -- SVG --------------------------------------------------------------------

_WIDTH, _HEIGHT = 640, 420
_LEFT, _RIGHT, _TOP, _BOTTOM = 80, 170, 30, 50
_COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _series_label(key: tuple) -> str:
    algo, diversity = key[0], key[6]
    return f"{algo} diversity {'on' if diversity else 'off'}"


def render_svg(summaries: Sequence[SummaryRow]) -> str:
    """Mean evaluations against n on a log scale, one line per series."""
    if not summaries:
        raise ValueError("nothing to plot")
    series: dict[str, list[tuple[int, float]]] = {}
    for row in summaries:
        pts = series.setdefault(_series_label(row.key), [])
        if row.mean is not None and row.mean > 0:
            pts.append((row.n, row.mean))
    values = [y for pts in series.values() for _, y in pts]
    xs = [row.n for row in summaries]
    lo_exp = math.floor(math.log10(min(values))) if values else 0
    hi_exp = math.ceil(math.log10(max(values))) if values else 1
    if hi_exp <= lo_exp:
        hi_exp = lo_exp + 1
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1, x_hi + 1
    plot_w = _WIDTH - _LEFT - _RIGHT
    plot_h = _HEIGHT - _TOP - _BOTTOM

    def sx(x: float) -> float:
        return _LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return _TOP + (hi_exp - math.log10(y)) / (hi_exp - lo_exp) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<rect x="{_LEFT}" y="{_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>',
    ]
    for e in range(lo_exp, hi_exp + 1):
        y = sy(10.0**e)
        parts.append(f'<line x1="{_LEFT}" y1="{y:.1f}" x2="{_LEFT + plot_w}" y2="{y:.1f}" stroke="#dddddd"/>')
        parts.append(f'<text x="{_LEFT - 8}" y="{y + 4:.1f}" text-anchor="end">1e{e}</text>')
    for x in sorted(set(xs)):
        parts.append(
            f'<text x="{sx(x):.1f}" y="{_TOP + plot_h + 18}" text-anchor="middle">{x}</text>'
        )
    parts.append(
        f'<text x="{_LEFT + plot_w / 2:.1f}" y="{_HEIGHT - 10}" text-anchor="middle">n</text>'
    )
    parts.append(
        f'<text x="18" y="{_TOP + plot_h / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {_TOP + plot_h / 2:.1f})">mean evaluations (log scale)</text>'
    )
    for i, (label, pts) in enumerate(series.items()):
        colour = _COLOURS[i % len(_COLOURS)]
        dash = "" if "diversity on" in label else ' stroke-dasharray="6 4"'
        coords = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in sorted(pts))
        if len(pts) > 1:
            parts.append(f'<polyline points="{coords}" fill="none" stroke="{colour}" stroke-width="2"{dash}/>')
        for x, y in pts:
            parts.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="3" fill="{colour}"/>')
        ly = _TOP + 14 + 18 * i
        lx = _LEFT + plot_w + 12
        parts.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 24}" y2="{ly - 4}" stroke="{colour}" stroke-width="2"{dash}/>')
        parts.append(f'<text x="{lx + 30}" y="{ly}">{escape(label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_plot(summaries: Sequence[SummaryRow], path: str | Path) -> None:
    Path(path).write_text(render_svg(summaries), encoding="utf-8")
