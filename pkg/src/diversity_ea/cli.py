"""Command-line experiment runner.

Settings come from an optional ``key=value`` file (``--config``); flags given
on the command line override it. ``--diversity both`` runs the original and
the diversity variant back to back into one CSV.

Exit codes: 0 on success, 2 for configuration errors, 3 for I/O errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .harness import (
    DEFAULT_MAX_EVALUATIONS,
    ConfigError,
    ExperimentConfig,
    emit_plot,
    records_to_csv,
    run_experiments,
    summarize,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

# setting -> default; None means no default
_SETTINGS = {
    "problem": None,
    "algo": None,
    "n": None,
    "k": "4",
    "mu": "paper",
    "pc": "0.5",
    "diversity": "both",
    "selection": "uniform",
    "runs": "100",
    "seed": "0",
    "max_evals": str(DEFAULT_MAX_EVALUATIONS),
    "out": None,
    "plot": None,
    "jobs": "1",
}


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse ``key=value`` lines; blank lines and ``#`` comments are skipped."""
    settings = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in _SETTINGS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        settings[key] = value
    return settings


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="diversity-ea",
        description="Run seeded replications of the (mu+1)-GA, NSGA-II or SMS-EMOA "
        "with and without diversity maintenance.",
    )
    p.add_argument("--config", help="key=value settings file; flags override it")
    p.add_argument("--problem", help="jump or ojzj (inferred from --algo if omitted)")
    p.add_argument("--algo", help="ga, nsga2 or sms")
    p.add_argument("--n", help="comma-separated string lengths, e.g. 10,15,20")
    p.add_argument("--k", help="jump width (default 4)")
    p.add_argument("--mu", help='population size or "paper" (default)')
    p.add_argument("--pc", help="crossover probability (default 0.5)")
    p.add_argument("--diversity", help="on, off or both (default both)")
    p.add_argument("--selection", help="NSGA-II parent selection: fair, uniform or tournament")
    p.add_argument("--runs", help="replications per n (default 100)")
    p.add_argument("--seed", help="master seed (default 0)")
    p.add_argument("--max-evals", dest="max_evals", help="evaluation cap per run (default 1e8)")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--plot", help="SVG output path")
    p.add_argument("--jobs", help="parallel worker processes (default 1)")
    return p


def _int(settings: dict[str, str], key: str) -> int:
    text = settings[key]
    try:
        return int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {text!r}") from None


def configs_from_settings(settings: dict[str, str]) -> list[ExperimentConfig]:
    for key in ("algo", "n"):
        if not settings.get(key):
            raise ConfigError(f"missing required setting {key!r}")
    try:
        n_values = tuple(int(part) for part in settings["n"].split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"n must be a comma-separated list of integers, got {settings['n']!r}") from None
    mu = None if settings["mu"] == "paper" else _int(settings, "mu")
    try:
        p_c = float(settings["pc"])
    except ValueError:
        raise ConfigError(f"pc must be a number, got {settings['pc']!r}") from None
    variants = {"on": (True,), "off": (False,), "both": (False, True)}
    if settings["diversity"] not in variants:
        raise ConfigError(f"diversity must be on, off or both, got {settings['diversity']!r}")
    return [
        ExperimentConfig(
            algo=settings["algo"],
            n_values=n_values,
            k=_int(settings, "k"),
            problem=settings.get("problem") or None,
            mu=mu,
            p_c=p_c,
            diversity=flag,
            selection=settings["selection"],
            runs=_int(settings, "runs"),
            seed=_int(settings, "seed"),
            max_evaluations=_int(settings, "max_evals"),
            jobs=_int(settings, "jobs"),
        )
        for flag in variants[settings["diversity"]]
    ]


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    settings = {k: v for k, v in _SETTINGS.items() if v is not None}
    try:
        if args.config:
            settings.update(read_config_file(args.config))
        settings.update({k: v for k, v in vars(args).items() if k != "config" and v is not None})
        configs = configs_from_settings(settings)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    for key in ("out", "plot"):
        if settings.get(key) and not Path(settings[key]).resolve().parent.is_dir():
            print(f"cannot write output: no directory for {settings[key]}", file=sys.stderr)
            return EXIT_IO

    records = run_experiments(configs)
    text = records_to_csv(records)
    try:
        if settings.get("out"):
            Path(settings["out"]).write_text(text, encoding="ascii")
        else:
            sys.stdout.write(text)
        rows = summarize(records)
        if settings.get("plot"):
            emit_plot(rows, settings["plot"])
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    for row in rows:
        algo, _, n, _, mu, _, diversity, _ = row.key
        mean = "absent" if row.mean is None else f"{row.mean:.1f}"
        print(
            f"{algo} n={n} mu={mu} diversity={'on' if diversity else 'off'} "
            f"success={row.success_rate:.2f} mean={mean}",
            file=sys.stderr,
        )
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
