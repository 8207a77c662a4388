"""Command-line experiment runner.

    boxfractal run <config> [--out DIR] [--seed S] [--threads K]
    boxfractal list
    boxfractal validate <config>

Exit codes: 0 success, 2 invalid config, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .config import ConfigError, ExperimentConfig, dump, load, with_seed
from .experiments import EXPERIMENTS, resolve, sweep_points
from .numerics import NumericsError
from .records import ResultRecord, emit_csv, summary_text

OUTPUT_ENV = "BOXFRACTAL_OUTPUT_DIR"
EXIT_OK, EXIT_CONFIG, EXIT_NUMERICS = 0, 2, 3

log = logging.getLogger("boxfractal")


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> list[ResultRecord]:
    """Validate, run every sweep point and return records in sweep order."""
    cfg = resolve(cfg)
    exp = EXPERIMENTS[cfg.experiment]
    points = sweep_points(cfg)
    if threads > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_point = list(pool.map(lambda p: exp.run_point(cfg, p), points))
    else:
        per_point = [exp.run_point(cfg, p) for p in points]
    rows = [row for chunk in per_point for row in chunk]
    # points first, then curves, then summaries; each in sweep order
    order = {"point": 0, "curve": 1, "summary": 2}
    rows = sorted(rows, key=lambda r: order[r[0]])
    rows += exp.summarize(cfg, rows)
    digest = cfg.digest()
    return [ResultRecord(cfg.experiment, kind, params, measured, digest, cfg.seed, __version__)
            for kind, params, measured in rows]


def output_dir(cli_out: str | None, cfg: ExperimentConfig) -> Path:
    return Path(cli_out or os.environ.get(OUTPUT_ENV) or cfg.output or "results")


def _cmd_list(args) -> int:
    width = max(map(len, EXPERIMENTS))
    for name, exp in EXPERIMENTS.items():
        print(f"{name:{width}s}  {exp.description}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    cfg = resolve(load(args.config))
    print(dump(cfg), end="")
    print(f"# valid; {len(sweep_points(cfg))} sweep point(s), config hash {cfg.digest()}")
    return EXIT_OK


def _cmd_run(args) -> int:
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    cfg = with_seed(load(args.config), args.seed)
    if args.seed is not None and args.seed < 0:
        raise ConfigError("--seed must be >= 0")
    resolved = resolve(cfg)
    out = output_dir(args.out, cfg)
    start = time.perf_counter()
    records = run_experiment(resolved, args.threads)
    log.info("%s finished in %.1f s", cfg.experiment, time.perf_counter() - start)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{cfg.experiment}.csv"
    emit_csv(records, csv_path)
    (out / f"{cfg.experiment}.summary.txt").write_text(summary_text(records, dump(resolved)))
    print(csv_path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="boxfractal", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("config")
    run.add_argument("--out", help=f"output directory (overrides ${OUTPUT_ENV} and the config)")
    run.add_argument("--seed", type=int)
    run.add_argument("--threads", type=int, default=1)
    run.set_defaults(func=_cmd_run)
    sub.add_parser("list", help="list experiments").set_defaults(func=_cmd_list)
    val = sub.add_parser("validate", help="validate a config and print it resolved")
    val.add_argument("config")
    val.set_defaults(func=_cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericsError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
