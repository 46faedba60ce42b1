"""Seeded random instances."""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass

import numpy as np

from .double_row import DoubleRowInstance, Gap
from .pwq import PiecewiseQuadratic, Quadratic
from .single_row import Cell, SingleRowInstance

COST_FAMILIES = ("quadratic", "linear")


@dataclass(frozen=True)
class GeneratorSpec:
    seed: int = 0
    k: int = 3
    max_cells_per_row: int = 2
    width_min: float = 1.0
    width_max: float = 3.0
    density: float = 0.8
    scatter: float = 2.0
    cost: str = "quadratic"
    integer: bool = True

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not 0 < self.density <= 1:
            raise ValueError("density must lie in (0, 1]")
        if not 0 < self.width_min <= self.width_max:
            raise ValueError("need 0 < width_min <= width_max")
        if self.cost not in COST_FAMILIES:
            raise ValueError(f"cost must be one of {COST_FAMILIES}")

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratorSpec":
        spec = cls(**data)
        env = os.environ.get("ROWLEGAL_SEED")
        if env is not None:
            spec = cls(**{**asdict(spec), "seed": int(env)})
        return spec

    def to_dict(self) -> dict:
        return asdict(self)


def _width(rng, spec):
    if spec.integer:
        return float(rng.integers(int(math.ceil(spec.width_min)), int(math.floor(spec.width_max)) + 1))
    return float(rng.uniform(spec.width_min, spec.width_max))


def _cost(spec, target, lo, hi):
    if spec.cost == "linear":
        return PiecewiseQuadratic.abs_displacement(target, lo, hi)
    return PiecewiseQuadratic.displacement(target, lo, hi)


def generate(spec: GeneratorSpec) -> DoubleRowInstance:
    """Random double-row instance with the requested fraction of the window filled.

    Cells get nominal positions from a uniform spread of the packed layout
    over the window and targets scattered around them.
    """
    rng = np.random.default_rng(spec.seed)
    dw = [_width(rng, spec) for _ in range(spec.k)]
    rows = []
    for _ in range(spec.k + 1):
        nb, nt = rng.integers(0, spec.max_cells_per_row + 1, size=2)
        rows.append(([_width(rng, spec) for _ in range(nb)], [_width(rng, spec) for _ in range(nt)]))
    loads = [max(sum(b), sum(t)) for b, t in rows]
    load = sum(dw) + sum(loads)
    length = load / spec.density
    if spec.integer:
        length = float(math.ceil(length - 1e-9))
    x_min, x_max = 0.0, length
    stretch = length / load

    def target(nominal):
        t = nominal + rng.normal(0.0, spec.scatter)
        return float(round(t)) if spec.integer else float(t)

    doubles, gaps = [], []
    start = 0.0
    for g, (bw, tw) in enumerate(rows):
        rowcells = []
        for tag, widths in (("b", bw), ("t", tw)):
            cells, p = [], start
            for j, w in enumerate(widths):
                cells.append(Cell(f"{tag}{g}_{j}", w, _cost(spec, target(stretch * p), x_min, x_max)))
                p += w
            rowcells.append(tuple(cells))
        gaps.append(Gap(*rowcells))
        start += loads[g]
        if g < spec.k:
            doubles.append(Cell(f"C{g}", dw[g], _cost(spec, target(stretch * start), x_min, x_max)))
            start += dw[g]
    return DoubleRowInstance(tuple(doubles), tuple(gaps), x_min, x_max)


def random_convex(rng, lo: float, hi: float, num_kinks: int, integer: bool = True) -> PiecewiseQuadratic:
    """Random convex piecewise quadratic on [lo, hi] with at most ``num_kinks`` kinks.

    Curvatures come from {0, 0.5, 1, 2}; pieces are sometimes flat so that
    argmin intervals and ties occur.
    """
    if integer:
        inner = np.arange(math.floor(lo) + 1, math.ceil(hi))
        inner = inner[(inner > lo) & (inner < hi)]
        m = min(num_kinks, len(inner))
        bps = sorted(rng.choice(inner, size=m, replace=False).tolist()) if m else []
    else:
        bps = sorted(rng.uniform(lo, hi, size=num_kinks).tolist())
    curv = [0.0, 0.5, 1.0, 2.0]
    a = float(rng.choice(curv))
    if a > 0:
        t = float(rng.integers(math.floor(lo), math.ceil(hi) + 1)) if integer else float(rng.uniform(lo, hi))
        q = Quadratic(a, -2.0 * a * t, a * t * t)
    else:
        q = Quadratic(0.0, float(rng.integers(-2, 3)), float(rng.integers(0, 20)))
    segs = [q]
    for p in bps:
        s = q.slope(p)
        if s <= 0 and rng.random() < 0.3:
            nq = Quadratic(0.0, 0.0, q(p))
        else:
            a2 = float(rng.choice(curv))
            jump = float(rng.integers(0, 4))
            b2 = s + jump - 2.0 * a2 * p
            c2 = q(p) - (a2 * p * p + b2 * p)
            nq = Quadratic(a2, b2, c2)
        segs.append(nq)
        q = nq
    return PiecewiseQuadratic(lo, hi, tuple(bps), tuple(segs))


def random_single_row(rng, n: int, max_kinks: int = 2, slack: int | None = None,
                      integer: bool = True) -> SingleRowInstance:
    """Small random single-row instance on an integer window starting at 0."""
    widths = [float(rng.integers(1, 4)) for _ in range(n)]
    slack = int(rng.integers(0, 2 * n + 4)) if slack is None else slack
    x_max = float(sum(widths) + slack)
    cells = tuple(Cell(f"c{i}", w, random_convex(rng, 0.0, x_max, int(rng.integers(0, max_kinks + 1)), integer))
                  for i, w in enumerate(widths))
    return SingleRowInstance(cells, 0.0, x_max)


def random_double_row(rng, k: int | None = None, max_cells_per_row: int = 2, max_kinks: int = 1,
                      slack: float | None = None, widths=(1.0, 2.0)) -> DoubleRowInstance:
    """Small double-row instance with random convex costs.

    Widths are drawn from ``widths``; the free space is a random multiple of
    the smallest width unless ``slack`` is given.
    """
    k = int(rng.integers(1, 4)) if k is None else k
    w = lambda: float(rng.choice(widths))
    dw = [w() for _ in range(k)]
    rows = []
    for _ in range(k + 1):
        nb, nt = rng.integers(0, max_cells_per_row + 1, size=2)
        rows.append(([w() for _ in range(nb)], [w() for _ in range(nt)]))
    load = sum(dw) + sum(max(sum(b), sum(t)) for b, t in rows)
    slack = float(rng.integers(0, 5)) * min(widths) if slack is None else slack
    x_max = float(load + slack)
    mk = lambda: random_convex(rng, 0.0, x_max, int(rng.integers(0, max_kinks + 1)))
    doubles = tuple(Cell(f"C{i}", x, mk()) for i, x in enumerate(dw))
    gaps = tuple(Gap(tuple(Cell(f"b{g}_{j}", x, mk()) for j, x in enumerate(b)),
                     tuple(Cell(f"t{g}_{j}", x, mk()) for j, x in enumerate(t)))
                 for g, (b, t) in enumerate(rows))
    return DoubleRowInstance(doubles, gaps, 0.0, x_max)
