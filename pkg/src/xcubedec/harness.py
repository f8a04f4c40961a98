"""Monte Carlo trial execution, failure-rate estimation and threshold fits.

Trials are embarrassingly parallel: each derives its own noise stream from
(master seed, trial index), and per-point results are aggregated as counts,
so a sweep's output is bitwise independent of worker count and scheduling.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field
from multiprocessing import get_context

import numpy as np

from . import fracton, lineon
from . import xcube as xc
from .lattice import Lattice, get_lattice
from .noise import NoiseSpec, sample

__all__ = [
    "SweepConfig", "TrialRecord", "PointResult", "SweepResult",
    "run_trial", "run_sweep", "wilson_interval", "estimate_threshold",
    "ThresholdEstimate",
]

VARIANTS = ("manhattan", "corner", "iterative")


@dataclass(frozen=True)
class SweepConfig:
    """One failure-rate sweep over system sizes and error rates."""

    sector: str                      # "x" or "z"
    variant: str                     # manhattan | corner | iterative
    sizes: tuple[int, ...] = (8, 12, 16)
    p_min: float = 0.07
    p_max: float = 0.12
    steps: int = 6
    trials: int = 5000
    seed: int = 0
    iterations: int = 0              # reweighting rounds for the iterative variant
    workers: int = 0                 # 0 = auto

    def __post_init__(self):
        if self.sector not in ("x", "z"):
            raise ValueError("sector must be 'x' or 'z'")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.sector == "x" and self.variant == "iterative":
            raise ValueError("iterative reweighting applies to the z sector")
        if self.sector == "z" and self.variant == "corner":
            raise ValueError("the corner penalty applies to the x sector")
        if self.steps < 2:
            raise ValueError("steps must be >= 2")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.sizes:
            raise ValueError("sizes must be nonempty")
        if not 0.0 <= self.p_min <= self.p_max <= 1.0:
            raise ValueError("need 0 <= p_min <= p_max <= 1")

    @property
    def p_grid(self) -> list[float]:
        return list(np.linspace(self.p_min, self.p_max, self.steps))


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of a single decode trial."""

    L: int
    p: float
    sector: str
    variant: str
    trial: int
    derived_seed: tuple[int, int]    # (master seed, trial counter)
    success: bool
    n_vertex_defects: int
    n_cell_defects: int
    wall_time: float


@dataclass
class PointResult:
    L: int
    p: float
    trials: int = 0
    failures: int = 0

    @property
    def failure_rate(self) -> float:
        return self.failures / self.trials if self.trials else math.nan

    def interval(self) -> tuple[float, float]:
        return wilson_interval(self.failures, self.trials)


@dataclass
class SweepResult:
    config: SweepConfig
    points: list[PointResult] = field(default_factory=list)

    def point(self, L: int, p: float) -> PointResult:
        for pt in self.points:
            if pt.L == L and abs(pt.p - p) < 1e-12:
                return pt
        raise KeyError((L, p))


def wilson_interval(failures: int, trials: int, z: float = 1.959963984540054
                    ) -> tuple[float, float]:
    """95 % Wilson score interval for a binomial rate; well-behaved near 0."""
    if trials == 0:
        return (math.nan, math.nan)
    phat = failures / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials))
    lo = 0.0 if failures == 0 else max(0.0, center - half)
    hi = 1.0 if failures == trials else min(1.0, center + half)
    return (lo, hi)


def _decode(lat: Lattice, syndrome, sector: str, variant: str, iterations: int):
    if sector == "x":
        return lineon.decode_x(lat, syndrome,
                               use_corner_penalty=(variant == "corner"))
    k = iterations if variant == "iterative" else 0
    return fracton.decode_z(lat, syndrome, iterations=k)


def run_trial(L: int, p: float, sector: str, variant: str, seed: int, trial: int,
              iterations: int = 0) -> TrialRecord:
    """Sample, decode, verify syndrome clearing, test the logical observable.

    A nonempty residual syndrome is a decoder contract violation and raises
    instead of being counted as a failure.
    """
    t0 = time.perf_counter()
    lat = get_lattice(L)
    err = sample(NoiseSpec(p=p, sector=sector, seed=seed, trial=trial), lat)
    syndrome = xc.extract_syndrome(lat, err)
    nv, nc = syndrome.counts()
    correction = _decode(lat, syndrome, sector, variant, iterations)
    residual = err.compose(correction)
    if not xc.extract_syndrome(lat, residual).is_empty:
        raise RuntimeError(
            f"decoder left a nonempty residual syndrome (L={L}, p={p}, trial={trial})")
    logicals = xc.canonical_logicals(L)
    conjugate = [logicals[1]] if sector == "x" else [logicals[0]]
    failed = xc.logical_failure(lat, residual, conjugate)
    return TrialRecord(
        L=L, p=p, sector=sector, variant=variant, trial=trial,
        derived_seed=(seed, trial), success=not failed,
        n_vertex_defects=nv, n_cell_defects=nc,
        wall_time=time.perf_counter() - t0,
    )


def _point_chunk(args):
    L, p, sector, variant, seed, iterations, t_lo, t_hi = args
    failures = 0
    for trial in range(t_lo, t_hi):
        rec = run_trial(L, p, sector, variant, seed, trial, iterations)
        if not rec.success:
            failures += 1
    return (L, p, t_hi - t_lo, failures)


def _trial_counter_base(config: SweepConfig, L: int, p_index: int) -> int:
    # Disjoint counter blocks per (L, p) point: trial streams never collide
    # across points of one sweep, and identical configs replay exactly.
    li = config.sizes.index(L)
    return (li * config.steps + p_index) * config.trials


def run_sweep(config: SweepConfig, progress=None) -> SweepResult:
    """Run all (L, p) points of a sweep, parallelized over a process pool."""
    workers = config.workers if config.workers > 0 else (os.cpu_count() or 1)
    jobs = []
    for L in config.sizes:
        for pi, p in enumerate(config.p_grid):
            base = _trial_counter_base(config, L, pi)
            chunk = max(1, min(config.trials, 250))
            for lo in range(0, config.trials, chunk):
                hi = min(config.trials, lo + chunk)
                jobs.append((L, float(p), config.sector, config.variant,
                             config.seed, config.iterations, base + lo, base + hi))
    # Largest lattices first: better tail latency across the pool.
    jobs.sort(key=lambda j: -j[0])
    acc: dict[tuple[int, float], PointResult] = {}
    for L in config.sizes:
        for p in config.p_grid:
            acc[(L, float(p))] = PointResult(L=L, p=float(p))

    def consume(res, done_jobs):
        L, p, n, failures = res
        # map the chunk back to its grid point via the exact float p
        pt = acc[(L, p)]
        pt.trials += n
        pt.failures += failures
        if progress:
            progress(done_jobs, len(jobs))

    if workers == 1:
        for i, job in enumerate(jobs):
            consume(_point_chunk(job), i + 1)
    else:
        try:
            ctx = get_context("fork")  # inherits warmed JIT state
        except ValueError:  # pragma: no cover - non-POSIX fallback
            ctx = get_context("spawn")
        with ctx.Pool(processes=workers) as pool:
            for i, res in enumerate(pool.imap_unordered(_point_chunk, jobs, chunksize=1)):
                consume(res, i + 1)

    result = SweepResult(config=config)
    for L in config.sizes:
        for p in config.p_grid:
            pt = acc[(L, float(p))]
            if pt.trials != config.trials:
                raise RuntimeError(f"trial accounting mismatch at (L={L}, p={p})")
            result.points.append(pt)
    return result


# --------------------------------------------------------------------------
# threshold estimation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdEstimate:
    crossing: float
    spread: tuple[float, float]
    pairs: tuple[tuple[int, int, float], ...]   # (L1, L2, crossing)


def _fit_line(xs, ys) -> tuple[float, float]:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    xm, ym = xs.mean(), ys.mean()
    sxx = ((xs - xm) ** 2).sum()
    slope = ((xs - xm) * (ys - ym)).sum() / sxx
    return slope, ym - slope * xm


def _pair_crossing(ps, f1, f2) -> float | None:
    """Intersection of two failure-rate curves by local linear regression
    around the first sign change of their difference.

    The fit window is the bracketing grid segment widened by one point on
    each side where available; when the fitted lines intersect outside the
    widened window (strong curvature or noise), the two-point
    interpolation on the bracket is used instead.
    """
    ps = list(ps)
    d = np.asarray(f1) - np.asarray(f2)
    for i in range(len(ps) - 1):
        if d[i] == 0 and d[i + 1] == 0:
            continue
        if d[i] == 0:
            return float(ps[i])
        if d[i] * d[i + 1] < 0 or (d[i] != 0 and d[i + 1] == 0):
            lo = max(0, i - 1)
            hi = min(len(ps), i + 3)
            window = slice(lo, hi)
            s1, b1 = _fit_line(ps[window], f1[window])
            s2, b2 = _fit_line(ps[window], f2[window])
            t = d[i] / (d[i] - d[i + 1])
            bracket = float(ps[i] + t * (ps[i + 1] - ps[i]))
            if s1 == s2:
                return bracket
            x = (b2 - b1) / (s1 - s2)
            if ps[lo] <= x <= ps[hi - 1]:
                return float(x)
            return bracket
    return None


def estimate_threshold(result: SweepResult) -> ThresholdEstimate:
    """Median pairwise crossing of failure-rate curves, with min-max spread.

    Raises ``ValueError`` when fewer than two sizes or no pair of curves
    crosses within the sampled grid.
    """
    sizes = sorted(result.config.sizes)
    ps = result.config.p_grid
    if len(sizes) < 2 or len(ps) < 3:
        raise ValueError("insufficient data: need >= 2 sizes and >= 3 p points")
    curves = {L: [result.point(L, p).failure_rate for p in ps] for L in sizes}
    pairs = []
    for i in range(len(sizes)):
        for j in range(i + 1, len(sizes)):
            c = _pair_crossing(ps, curves[sizes[i]], curves[sizes[j]])
            if c is not None:
                pairs.append((sizes[i], sizes[j], c))
    if not pairs:
        raise ValueError("no crossing in range")
    xs = sorted(c for _, _, c in pairs)
    return ThresholdEstimate(
        crossing=float(np.median(xs)),
        spread=(xs[0], xs[-1]),
        pairs=tuple(pairs),
    )
