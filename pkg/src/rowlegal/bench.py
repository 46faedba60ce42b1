"""Single-row scaling benchmark."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass

import numpy as np

from .single_row import PackedCosts, solve_packed


@dataclass(frozen=True)
class BenchConfig:
    sizes: tuple[int, ...] = (10_000, 100_000, 1_000_000)
    seed: int = 0
    density: float = 0.9
    scatter: float = 20.0
    dead_zone: float = 1.0
    repeat: int = 3


@dataclass(frozen=True)
class BenchRow:
    n: int
    kinks: int
    seconds: float

    @property
    def per_nlogn(self) -> float:
        return self.seconds / (self.n * math.log(self.n)) if self.n > 1 else float("nan")


def bench_instance(n: int, cfg: BenchConfig = BenchConfig()):
    """Widths, window and packed dead-zone quadratic costs with two kinks per cell.

    Built as arrays directly; going through :class:`PiecewiseQuadratic` objects
    would dominate the run time at a million cells.
    """
    rng = np.random.default_rng(cfg.seed + n)
    w = rng.integers(1, 5, size=n).astype(float)
    S = np.concatenate([[0.0], np.cumsum(w)])
    x_max = math.ceil(S[-1] / cfg.density)
    lower = S[:-1]
    upper = x_max - (S[-1] - S[:-1])
    r = cfg.dead_zone
    t = lower * (x_max / S[-1]) + rng.normal(0.0, cfg.scatter, size=n)
    t = np.clip(t, lower + r + 0.5, upper - r - 0.5)

    lb = np.empty(3 * n)
    lb[0::3], lb[1::3], lb[2::3] = lower, t - r, t + r
    a = np.zeros(3 * n)
    a[0::3] = a[2::3] = 1.0
    b = np.zeros(3 * n)
    b[0::3], b[2::3] = -2.0 * (t - r), -2.0 * (t + r)
    c = np.zeros(3 * n)
    c[0::3], c[2::3] = (t - r) ** 2, (t + r) ** 2
    ptr = 3 * np.arange(n + 1, dtype=np.int64)
    return w, 0.0, float(x_max), PackedCosts(ptr, lb, a, b, c)


def run(cfg: BenchConfig = BenchConfig()) -> list[BenchRow]:
    """Best-of-``repeat`` wall time of the packed solve for every size."""
    w, lo, hi, packed = bench_instance(64, cfg)
    solve_packed(w, lo, hi, packed)  # compile outside the timed region
    rows = []
    for n in cfg.sizes:
        w, lo, hi, packed = bench_instance(n, cfg)
        best = math.inf
        for _ in range(max(1, cfg.repeat)):
            t0 = time.perf_counter()
            solve_packed(w, lo, hi, packed)
            best = min(best, time.perf_counter() - t0)
        rows.append(BenchRow(n, packed.num_kinks, best))
    return rows


def to_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["format", "n", "kinks", "seconds", "seconds_per_nlogn"])
    for r in rows:
        out.writerow([1, r.n, r.kinks, f"{r.seconds:.6f}", f"{r.per_nlogn:.3e}"])
    return buf.getvalue()
