#!/usr/bin/env python3
"""Reproduce the three desk-scale threshold figures end to end.

Runs the X-sector corner-penalty sweep, the plain and the five-iteration
Z-sector sweeps, then writes CSVs, threshold reports and SVG plots into
--outdir.  With the default trial count this is a multi-hour run on a
laptop; use --trials to scale down for a quick look.
"""

import argparse
import subprocess
import sys
from pathlib import Path


def cli(*args):
    cmd = [sys.executable, "-m", "xcubedec.cli", *map(str, args)]
    print("+", " ".join(cmd), flush=True)
    subprocess.run(cmd, check=True)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="threshold_runs")
    ap.add_argument("--trials", type=int, default=5000)
    ap.add_argument("--sizes", default="8,12,16")
    ap.add_argument("--seed", type=int, default=20250810)
    ap.add_argument("--workers", type=int, default=0)
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)

    runs = [
        ("x_corner", ["--sector", "x", "--variant", "corner",
                      "--pmin", "0.07", "--pmax", "0.12"]),
        ("z_plain", ["--sector", "z", "--variant", "iterative", "--iters", "0",
                     "--pmin", "0.025", "--pmax", "0.05"]),
        ("z_iter5", ["--sector", "z", "--variant", "iterative", "--iters", "5",
                     "--pmin", "0.025", "--pmax", "0.05"]),
    ]
    for name, flags in runs:
        csv_path = out / f"{name}.csv"
        cli("sweep", *flags, "--sizes", args.sizes, "--steps", "6",
            "--trials", args.trials, "--seed", args.seed,
            "--workers", args.workers, "--out", csv_path)
        cli("threshold", csv_path, "--out", out / f"{name}.threshold.json")
        cli("plot", csv_path, "--out", out / f"{name}.svg")
    print(f"done; results in {out}/")


if __name__ == "__main__":
    main()
