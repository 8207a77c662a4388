"""Run every shipped preset through the CLI and print timings plus headline numbers.

    python scripts/run_presets.py [--out results] [--threads 1]
"""
import argparse
import time
from pathlib import Path

from boxfractal.cli import main
from boxfractal.records import parse_csv

ROOT = Path(__file__).resolve().parents[1]
HEADLINE = {
    "berry-spatial": ("point", ["dimension", "beta"]),
    "berry-temporal": ("point", ["dimension"]),
    "smallt-remainder": ("summary", ["slope_first_order"]),
    "zeno-survival": ("summary", ["deficit_slope"]),
    "zeno-cutoff": ("summary", ["crossover_slope", "prefactor_ratio"]),
    "epsilon-equivalence": ("point", ["exact_knee_found", "damped_crossover"]),
    "compton-cutoff": ("summary", ["crossover_slope", "all_within_factor_2"]),
    "telegraph-diffusion": ("point", ["diffusion", "flight_mean"]),
}


def run(out: Path, threads: int) -> None:
    for cfg in sorted((ROOT / "configs").glob("*.yaml")):
        start = time.perf_counter()
        code = main(["run", str(cfg), "--out", str(out), "--threads", str(threads)])
        secs = time.perf_counter() - start
        name = cfg.stem
        if code != 0:
            print(f"{name:22s} exit {code}")
            continue
        kind, keys = HEADLINE[name]
        rec = next(r for r in parse_csv(out / f"{name}.csv") if r.kind == kind)
        vals = ", ".join(f"{k}={rec.measured[k]:.5g}" if isinstance(rec.measured[k], float)
                         else f"{k}={rec.measured[k]}" for k in keys)
        print(f"{name:22s} {secs:6.1f} s  {vals}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=ROOT / "results")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    run(args.out, args.threads)
