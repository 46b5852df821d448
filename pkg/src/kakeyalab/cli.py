"""Command line entry point: ``kakeyalab run <config>`` and ``kakeyalab fixtures``."""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .config import ConfigError, ExperimentConfig, list_fixtures, resolve_config
from .errors import KakeyaLabError
from .experiments import ExperimentResult, run_experiment

SCHEMA_VERSION = 1
OUT_ENV = "KAKEYALAB_OUT"
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def output_dir(flag: str | None, cfg: ExperimentConfig | None = None) -> Path:
    """``--out`` beats the environment variable, which beats ``output.dir``."""
    configured = cfg.get("output.dir") if cfg is not None else None
    return Path(flag or os.environ.get(OUT_ENV) or configured or "kakeyalab-out")


def build_report(cfg: ExperimentConfig, result: ExperimentResult, seconds: float) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "config": {"name": cfg.name, "kind": cfg.kind, "seed": cfg.seed,
                   "values": cfg.values, "text": cfg.source_text},
        "rows": [{"grid": g, "value": v, "aux": a} for g, v, a in result.rows],
        "fits": result.fits,
        "predictions": result.predictions,
        "checks": result.checks,
        "diagnostics": result.diagnostics,
        "exploratory": result.exploratory,
        "passed": result.passed,
        "wall_clock_seconds": seconds,
    }


def write_csv(path: Path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["grid", "value", "aux"])
        for g, v, a in rows:
            writer.writerow([repr(float(g)), repr(float(v)), a])


def run(target: str, out: str | None = None, threads: int = 1, plot: bool = False,
        stream=None) -> int:
    stream = stream or sys.stdout
    try:
        cfg = resolve_config(target)
        started = time.perf_counter()
        result = run_experiment(cfg, threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (KakeyaLabError, ValueError) as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    seconds = time.perf_counter() - started
    folder = output_dir(out, cfg)
    folder.mkdir(parents=True, exist_ok=True)
    report = build_report(cfg, result, seconds)
    json_path = folder / f"{cfg.name}.json"
    json_path.write_text(json.dumps(report, indent=2, default=float) + "\n")
    csv_path = folder / f"{cfg.name}.csv"
    write_csv(csv_path, result.rows)
    written = [json_path, csv_path]
    if plot:
        from .plotting import render_png, write_plot_script

        ys = [r[1] for r in result.rows]
        written.append(render_png(folder / f"{cfg.name}.png", result.rows, result.plot))
        written.append(write_plot_script(folder / f"{cfg.name}_plot.py", cfg.name, result.plot, ys))
    print(f"== {cfg.name} ({cfg.kind}){' [exploratory]' if result.exploratory else ''}", file=stream)
    for name, check in result.checks.items():
        print(f"   {'PASS' if check['passed'] else 'FAIL'} {name}: {check['value']}", file=stream)
    for path in written:
        print(f"   wrote {path}", file=stream)
    print(f"   {seconds:.1f} s", file=stream)
    return EXIT_OK


def fixtures(stream=None) -> int:
    stream = stream or sys.stdout
    for name, description in list_fixtures():
        print(f"{name:24s} {description}", file=stream)
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="kakeyalab", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a config file or bundled fixture")
    p_run.add_argument("config")
    p_run.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./kakeyalab-out)")
    p_run.add_argument("--threads", type=int, default=1)
    p_run.add_argument("--plot", action="store_true", help="render a PNG and write a plot script")
    sub.add_parser("fixtures", help="list bundled configs")
    args = parser.parse_args(argv)
    if args.command == "fixtures":
        return fixtures()
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    return run(args.config, args.out, args.threads, args.plot)


if __name__ == "__main__":
    sys.exit(main())
