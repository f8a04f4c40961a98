"""Command-line entry point: sweeps, threshold fits, plots and self-tests.

Exit codes: 0 success, 1 usage error, 2 invariant failure.  Each output
file is accompanied by (CSV) or embeds (SVG, JSON) a manifest recording
the full configuration, master seed, generator and timestamps, which is
sufficient to reproduce it bit for bit.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from . import __version__
from .harness import SweepConfig, estimate_threshold, run_sweep
from .noise import GENERATOR_ID
from .svg import render_sweep_svg

CSV_FIELDS = ["L", "p", "sector", "variant", "iterations", "trials",
              "failures", "failure_rate", "ci_low", "ci_high", "master_seed"]

USAGE_ERROR, INVARIANT_FAILURE = 1, 2


def _fail_usage(msg: str) -> "NoReturn":  # noqa: F821
    print(f"error: {msg}", file=sys.stderr)
    raise SystemExit(USAGE_ERROR)


def _manifest(args_dict: dict, seed: int, t_start: float) -> dict:
    return {
        "tool": "xcubedec",
        "version": __version__,
        "config": args_dict,
        "master_seed": seed,
        "generator": GENERATOR_ID,
        "started_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(t_start)),
        "finished_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }


def _parse_sizes(text: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(t) for t in text.split(",") if t)
    except ValueError:
        _fail_usage(f"--sizes expects comma-separated integers, got {text!r}")
    if not sizes:
        _fail_usage("--sizes is empty")
    return sizes


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _fail_usage(f"--config {path}: {exc}")
    if not isinstance(data, dict):
        _fail_usage(f"--config {path}: expected a JSON object")
    return data


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg_echo = {
        "command": "sweep", "sector": args.sector, "variant": args.variant,
        "iters": args.iters, "sizes": list(args.sizes), "pmin": args.pmin,
        "pmax": args.pmax, "steps": args.steps, "trials": args.trials,
        "seed": args.seed, "workers": args.workers, "out": str(args.out),
    }
    try:
        config = SweepConfig(
            sector=args.sector, variant=args.variant, sizes=tuple(args.sizes),
            p_min=args.pmin, p_max=args.pmax, steps=args.steps,
            trials=args.trials, seed=args.seed, iterations=args.iters,
            workers=args.workers,
        )
    except ValueError as exc:
        _fail_usage(str(exc))
    t_start = time.time()
    result = run_sweep(config)
    rows = []
    for pt in result.points:
        lo, hi = pt.interval()
        rows.append({
            "L": pt.L, "p": repr(pt.p), "sector": config.sector,
            "variant": config.variant, "iterations": config.iterations,
            "trials": pt.trials, "failures": pt.failures,
            "failure_rate": repr(pt.failure_rate),
            "ci_low": repr(lo), "ci_high": repr(hi),
            "master_seed": config.seed,
        })
    out = Path(args.out)
    with out.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        writer.writerows(rows)
    manifest = _manifest(cfg_echo, args.seed, t_start)
    with open(f"{out}.manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def read_sweep_csv(path: str) -> list[dict]:
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != CSV_FIELDS:
                _fail_usage(f"{path}: expected sweep schema {','.join(CSV_FIELDS)}")
            rows = list(reader)
    except OSError as exc:
        _fail_usage(str(exc))
    if not rows:
        _fail_usage(f"{path}: empty table")
    return rows


def cmd_threshold(args: argparse.Namespace) -> int:
    rows = read_sweep_csv(args.csv)
    sizes = tuple(sorted({int(r["L"]) for r in rows}))
    ps = sorted({float(r["p"]) for r in rows})
    sector = rows[0]["sector"]
    variant = rows[0]["variant"]
    try:
        config = SweepConfig(sector=sector, variant=variant, sizes=sizes,
                             p_min=ps[0], p_max=ps[-1], steps=len(ps),
                             trials=int(rows[0]["trials"]),
                             seed=int(rows[0]["master_seed"]),
                             iterations=int(rows[0]["iterations"]))
    except ValueError as exc:
        _fail_usage(f"{args.csv}: {exc}")
    from .harness import PointResult, SweepResult
    result = SweepResult(config=config)
    for r in rows:
        result.points.append(PointResult(
            L=int(r["L"]), p=float(r["p"]), trials=int(r["trials"]),
            failures=int(r["failures"])))
    try:
        est = estimate_threshold(result)
    except ValueError as exc:
        report = {"crossing": None, "error": str(exc), "input": str(args.csv)}
        text = json.dumps(report, indent=2, sort_keys=True)
        _write_or_print(args.out, text)
        return INVARIANT_FAILURE if args.strict else 0
    report = {
        "crossing": est.crossing,
        "spread": list(est.spread),
        "pairs": [{"L1": a, "L2": b, "crossing": c} for a, b, c in est.pairs],
        "input": str(args.csv),
        "manifest": _manifest({"command": "threshold", "csv": str(args.csv)},
                              int(rows[0]["master_seed"]), time.time()),
    }
    _write_or_print(args.out, json.dumps(report, indent=2, sort_keys=True))
    return 0


def _write_or_print(out, text: str):
    if out:
        Path(out).write_text(text + "\n")
        print(f"wrote {out}")
    else:
        print(text)


def cmd_plot(args: argparse.Namespace) -> int:
    rows = read_sweep_csv(args.csv)
    manifest = json.dumps(
        _manifest({"command": "plot", "csv": str(args.csv), "log_y": args.log_y},
                  int(rows[0]["master_seed"]), time.time()), sort_keys=True)
    title = (f"{rows[0]['sector'].upper()}-sector failure rate "
             f"({rows[0]['variant']} decoder)")
    svg = render_sweep_svg(rows, title=title, log_y=args.log_y, metadata=manifest)
    Path(args.out).write_text(svg)
    print(f"wrote {args.out}")
    return 0


def cmd_selftest(args: argparse.Namespace) -> int:
    import numpy as _np

    from . import fracton, lineon
    from . import xcube as xc
    from .lattice import Lattice
    from .matching import WeightedGraph, brute_force_mwpm, mwpm
    from .noise import NoiseSpec, sample

    failures = []

    def section(name, fn):
        t0 = time.perf_counter()
        try:
            fn()
            print(f"  [pass] {name} ({time.perf_counter() - t0:.1f}s)")
        except Exception as exc:  # noqa: BLE001 - report and continue
            failures.append((name, exc))
            print(f"  [FAIL] {name}: {exc}")

    def stabilizer_relations():
        for L in (2, 3):
            lat = Lattice(L)
            avs = [xc.stabilizer_vertex(lat, v) for v in lat.vertices()]
            bcs = [xc.stabilizer_cell(lat, c, col)
                   for c in lat.cells() for col in xc.COLOR_OF_LABEL.values()]
            for a in avs:
                for b in bcs:
                    if not a.commutes_with(b):
                        raise AssertionError("noncommuting stabilizer pair")

    def plane_parities():
        rng = _np.random.default_rng(2024)
        for L in (4, 8):
            lat = Lattice(L)
            for t in range(300):
                err = sample(NoiseSpec(p=0.1, sector="x", seed=7, trial=t), lat)
                syn = xc.extract_syndrome(lat, err)
                if not syn.plane_parities_hold():
                    raise AssertionError(f"plane parity violated at L={L}")
                errz = sample(NoiseSpec(p=0.05, sector="z", seed=8, trial=t), lat)
                if not xc.extract_syndrome(lat, errz).plane_parities_hold():
                    raise AssertionError(f"vertex plane parity violated at L={L}")

    def matching_oracle():
        rng = _np.random.default_rng(99)
        for _ in range(120):
            n = int(rng.choice([2, 4, 6, 8, 10]))
            w = rng.integers(0, 101, size=(n, n))
            w = _np.triu(w, 1)
            g = WeightedGraph(n=n, weights=w + w.T)
            if mwpm(g).total_weight != brute_force_mwpm(g).total_weight:
                raise AssertionError("mwpm disagrees with brute force")

    def neutralizer_clearing():
        for L in (4, 8):
            lat = Lattice(L)
            for t in range(60):
                err = sample(NoiseSpec(p=0.1, sector="x", seed=11, trial=t), lat)
                syn = xc.extract_syndrome(lat, err)
                lineon.decode_x(lat, syn)  # raises if the syndrome is not cleared
                errz = sample(NoiseSpec(p=0.04, sector="z", seed=12, trial=t), lat)
                fracton.decode_z(lat, xc.extract_syndrome(lat, errz), iterations=1)

    print("xcubedec selftest:")
    section("stabilizer commutation and relations", stabilizer_relations)
    section("materialized plane parities", plane_parities)
    section("matching oracle equivalence", matching_oracle)
    section("neutralizer syndrome clearing", neutralizer_clearing)
    if failures:
        print(f"{len(failures)} section(s) failed")
        return INVARIANT_FAILURE
    print("all sections passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xcubedec",
        description="X-cube code decoders and threshold Monte Carlo")
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="run a failure-rate sweep, write CSV")
    sw.add_argument("--sector", choices=["x", "z"], required=True)
    sw.add_argument("--variant", choices=["manhattan", "corner", "iterative"],
                    required=True)
    sw.add_argument("--iters", type=int, default=0,
                    help="reweighting iterations for the iterative variant")
    sw.add_argument("--sizes", type=str, default="8,12,16")
    sw.add_argument("--pmin", type=float, default=0.07)
    sw.add_argument("--pmax", type=float, default=0.12)
    sw.add_argument("--steps", type=int, default=6)
    sw.add_argument("--trials", type=int, default=5000)
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--workers", type=int, default=0, help="0 = auto-detect")
    sw.add_argument("--out", type=str, required=True)
    sw.add_argument("--config", type=str, default=None,
                    help="JSON file with the same keys as the flags")

    th = sub.add_parser("threshold", help="estimate the crossing from a sweep CSV")
    th.add_argument("csv")
    th.add_argument("--out", type=str, default=None)
    th.add_argument("--strict", action="store_true",
                    help="exit nonzero when no crossing is found")

    pl = sub.add_parser("plot", help="render a sweep CSV as SVG")
    pl.add_argument("csv")
    pl.add_argument("--out", type=str, required=True)
    pl.add_argument("--log-y", action="store_true", dest="log_y")

    sub.add_parser("selftest", help="run the fast invariant suites")
    return parser


def _apply_config_file(argv: list[str], args: argparse.Namespace) -> argparse.Namespace:
    if getattr(args, "config", None) is None:
        return args
    data = _load_config_file(args.config)
    explicit = set()
    for tok in argv:
        if tok.startswith("--"):
            explicit.add(tok[2:].split("=")[0].replace("-", "_"))
    for key, value in data.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            _fail_usage(f"--config {args.config}: unknown key {key!r}")
        if attr in explicit:
            continue  # flags override file values
        if attr == "sizes" and isinstance(value, str):
            value = list(_parse_sizes(value))
        setattr(args, attr, value)
    return args


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; remap to the documented code
        raise SystemExit(USAGE_ERROR if exc.code not in (0, None) else 0)
    if args.command == "sweep":
        args = _apply_config_file(argv, args)
        if isinstance(args.sizes, str):
            args.sizes = list(_parse_sizes(args.sizes))
        return cmd_sweep(args)
    if args.command == "threshold":
        return cmd_threshold(args)
    if args.command == "plot":
        return cmd_plot(args)
    if args.command == "selftest":
        return cmd_selftest(args)
    _fail_usage(f"unknown command {args.command!r}")
    return USAGE_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
