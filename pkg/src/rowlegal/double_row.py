"""Optimal placement in two adjacent rows with single- and double-height cells.

Double-height cells ``C_0 .. C_{k-1}`` split both rows into ``k + 1`` gaps;
gap ``g`` lies left of ``C_g`` (gap ``k`` is right of the last double cell) and
holds an ordered list of bottom-row and of top-row cells.

For fixed double-cell positions the best placement of a gap's cells is the
full-window single-row optimum of that gap row clamped into the gap. Its
cost, summed over gaps, splits into one convex function per double cell
(plus a constant), which turns the problem into a single-row problem over
the double cells with widened widths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InfeasibleError, RowLegalError, ValidationError
from .pwq import PiecewiseQuadratic, total
from .single_row import (Cell, SingleRowInstance, SingleRowSolution, block_cost_function,
                         window_tol)
from . import single_row

SELF_CHECK_TOL = 1e-8


class ConsistencyError(RowLegalError):
    """The reduced objective and the re-evaluated objective disagree."""


@dataclass(frozen=True)
class Gap:
    bottom: tuple[Cell, ...] = ()
    top: tuple[Cell, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "bottom", tuple(self.bottom))
        object.__setattr__(self, "top", tuple(self.top))

    @property
    def load(self) -> float:
        """Width the gap needs: the wider of its two rows."""
        return max(math.fsum(c.width for c in self.bottom), math.fsum(c.width for c in self.top))

    def rows(self) -> tuple[tuple[Cell, ...], tuple[Cell, ...]]:
        return self.bottom, self.top


@dataclass(frozen=True)
class DoubleRowInstance:
    doubles: tuple[Cell, ...]
    gaps: tuple[Gap, ...]
    x_min: float
    x_max: float

    def __post_init__(self):
        object.__setattr__(self, "doubles", tuple(self.doubles))
        object.__setattr__(self, "gaps", tuple(self.gaps))
        k = len(self.doubles)
        if k < 1:
            raise ValidationError("at least one double-row cell is required", "/doubles")
        if len(self.gaps) != k + 1:
            raise ValidationError(f"{k} double-row cells need {k + 1} gaps, got {len(self.gaps)}", "/gaps")
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)) or self.x_max < self.x_min:
            raise ValidationError(f"invalid window [{self.x_min}, {self.x_max}]", "/window")
        tol = window_tol(self.x_min, self.x_max)
        for where, c in self._all_cells():
            if not (c.width > 0 and math.isfinite(c.width)):
                raise ValidationError(f"cell {c.id!r} must have positive width, got {c.width}", f"{where}/width")
            if c.cost.lo > self.x_min + tol or c.cost.hi < self.x_max - tol:
                raise ValidationError(
                    f"cost of {c.id!r} must cover the window [{self.x_min:g}, {self.x_max:g}], "
                    f"got [{c.cost.lo:g}, {c.cost.hi:g}]", f"{where}/cost")
        need = self.x_min + math.fsum(c.width for c in self.doubles) + math.fsum(g.load for g in self.gaps)
        if need > self.x_max + tol:
            raise InfeasibleError(
                f"x_min + sum w(C_i) + sum_i max(sum_j w(b_ij), sum_j w(t_ij)) = {need:g} exceeds x_max = {self.x_max:g}")

    def _all_cells(self):
        for i, c in enumerate(self.doubles):
            yield f"/doubles/{i}", c
        for g, gap in enumerate(self.gaps):
            for row, cells in (("bottom", gap.bottom), ("top", gap.top)):
                for j, c in enumerate(cells):
                    yield f"/gaps/{g}/{row}/{j}", c

    @property
    def k(self) -> int:
        return len(self.doubles)

    @property
    def num_cells(self) -> int:
        return self.k + sum(len(g.bottom) + len(g.top) for g in self.gaps)

    @property
    def num_singles(self) -> int:
        return self.num_cells - self.k

    @property
    def num_kinks(self) -> int:
        return sum(c.cost.restrict(self.x_min, self.x_max).num_kinks for _, c in self._all_cells())

    @property
    def double_widths(self) -> np.ndarray:
        return np.array([c.width for c in self.doubles], dtype=float)

    @property
    def loads(self) -> np.ndarray:
        return np.array([g.load for g in self.gaps], dtype=float)

    @property
    def reduced_widths(self) -> np.ndarray:
        """Width of each double cell plus the load of the gap to its right."""
        return self.double_widths + self.loads[1:]

    @property
    def reduced_x_min(self) -> float:
        return self.x_min + float(self.loads[0])

    def reduced_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Feasible coordinate range of every double cell."""
        wp = self.reduced_widths
        S = np.concatenate([[0.0], np.cumsum(wp)])
        return self.reduced_x_min + S[:-1], self.x_max - (S[-1] - S[:-1])

    def gap_row_instance(self, g: int, row: int) -> SingleRowInstance:
        """Cells of one gap row on the full window (row 0 bottom, 1 top)."""
        return SingleRowInstance(self.gaps[g].rows()[row], self.x_min, self.x_max)

    def objective(self, x: Sequence[float], y: Sequence[Sequence[float]], z: Sequence[Sequence[float]]) -> float:
        terms = [c.cost(p) for c, p in zip(self.doubles, x)]
        for gap, ys, zs in zip(self.gaps, y, z):
            terms += [c.cost(p) for c, p in zip(gap.bottom, ys)]
            terms += [c.cost(p) for c, p in zip(gap.top, zs)]
        return math.fsum(terms)

    def violation(self, x, y, z) -> float:
        """Largest violation over all spacing constraints of both rows (<= 0 if feasible)."""
        worst = -math.inf
        w = self.double_widths
        for g, gap in enumerate(self.gaps):
            start = self.x_min if g == 0 else x[g - 1] + w[g - 1]
            end = self.x_max if g == self.k else x[g]
            worst = max(worst, start - end)
            for cells, pos in ((gap.bottom, y[g]), (gap.top, z[g])):
                prev = start
                for c, p in zip(cells, pos):
                    worst = max(worst, prev - p)
                    prev = p + c.width
                worst = max(worst, prev - end)
        return worst


@dataclass
class ReducedInstance:
    """Single-row instance over the double cells whose optimum solves the double-row instance."""

    single: SingleRowInstance
    constant: float
    bottom_refs: list[SingleRowSolution]
    top_refs: list[SingleRowSolution]

    @property
    def y_ref(self) -> list[np.ndarray]:
        return [s.positions for s in self.bottom_refs]

    @property
    def z_ref(self) -> list[np.ndarray]:
        return [s.positions for s in self.top_refs]

    @property
    def costs(self) -> list[PiecewiseQuadratic]:
        return [c.cost for c in self.single.cells]

    @property
    def num_kinks(self) -> int:
        return sum(f.num_kinks for f in self.costs)

    def cost(self, x: Sequence[float]) -> float:
        """Minimum double-row cost over all extensions of the double-cell positions ``x``."""
        return math.fsum(f(p) for f, p in zip(self.costs, x)) - self.constant


@dataclass
class DoubleRowSolution:
    x: np.ndarray
    y: list[np.ndarray]
    z: list[np.ndarray]
    total_cost: float
    reduced_cost: float | None = None
    # True when the doubles were moved by a post-pass that voids optimality
    heuristic: bool = False
    blocks: list = field(default_factory=list, repr=False)


def check_feasible_tuple(inst: DoubleRowInstance, x: Sequence[float], tol: float | None = None) -> bool:
    """Whether the double cells at ``x`` leave room for every gap's cells."""
    if len(x) != inst.k:
        return False
    tol = window_tol(inst.x_min, inst.x_max) if tol is None else tol
    w = inst.double_widths
    loads = inst.loads
    prev_end = inst.x_min
    for g in range(inst.k + 1):
        nxt = inst.x_max if g == inst.k else x[g]
        if prev_end + loads[g] > nxt + tol:
            return False
        if g < inst.k:
            prev_end = x[g] + w[g]
    return True


def gap_reference_solutions(inst: DoubleRowInstance) -> tuple[list[SingleRowSolution], list[SingleRowSolution]]:
    bottom = [single_row.solve(inst.gap_row_instance(g, 0)) for g in range(inst.k + 1)]
    top = [single_row.solve(inst.gap_row_instance(g, 1)) for g in range(inst.k + 1)]
    return bottom, top


def gap_reference_positions(inst: DoubleRowInstance) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Full-window single-row optimum of every gap row: ``(y_ref, z_ref)`` indexed by gap."""
    bottom, top = gap_reference_solutions(inst)
    return [s.positions for s in bottom], [s.positions for s in top]


def _row_terms(row: SingleRowInstance, ref: SingleRowSolution, lo: float, hi: float,
               start: float | None) -> list[PiecewiseQuadratic]:
    """Cost of one gap row as a function of the adjacent double cell's position.

    With ``start`` given, the row begins at ``x + start`` (gap right of the cell);
    otherwise the row must end at ``x`` (gap left of the cell).
    """
    S = row.prefix
    terms = []
    for block in ref.blocks:
        G = block_cost_function(row, block)
        if start is None:
            s = -float(S[-1] - S[block.rep])
            G = G.clamp_above(block.position)
        else:
            s = start + float(S[block.rep])
            G = G.clamp_below(block.position)
        terms.append(G.restrict(lo + s, hi + s).shift(s))
    return terms


def build_reduced(inst: DoubleRowInstance) -> ReducedInstance:
    """Transfer the single-row cells' costs onto the double cells."""
    wp = inst.reduced_widths
    if inst.reduced_x_min + wp.sum() > inst.x_max + window_tol(inst.x_min, inst.x_max):
        raise InfeasibleError("no feasible position tuple for the double-row cells")
    bottom, top = gap_reference_solutions(inst)
    refs = (bottom, top)
    lower, upper = inst.reduced_bounds()
    upper = np.maximum(upper, lower)
    cells = []
    for d, dbl in enumerate(inst.doubles):
        lo, hi = float(lower[d]), float(upper[d])
        parts = [dbl.cost.restrict(lo, hi)]
        for row in (0, 1):
            left_row = inst.gap_row_instance(d, row)
            right_row = inst.gap_row_instance(d + 1, row)
            parts += _row_terms(left_row, refs[row][d], lo, hi, None)
            parts += _row_terms(right_row, refs[row][d + 1], lo, hi, dbl.width)
        cells.append(Cell(dbl.id, float(wp[d]), total(parts)))
    single = SingleRowInstance(tuple(cells), inst.reduced_x_min, inst.x_max)

    constant = []
    for g in range(1, inst.k):
        for row in (0, 1):
            ref = refs[row][g]
            constant += [c.cost(p) for c, p in zip(inst.gaps[g].rows()[row], ref.positions)]
    return ReducedInstance(single, math.fsum(constant), bottom, top)


def extend_solution(inst: DoubleRowInstance, y_ref: Sequence[Sequence[float]], z_ref: Sequence[Sequence[float]],
                    x: Sequence[float]) -> DoubleRowSolution:
    """Best placement of the single-row cells for double cells fixed at ``x``."""
    if not check_feasible_tuple(inst, x):
        raise InfeasibleError("double-cell positions leave too little room for the gap cells")
    x = np.asarray(x, dtype=float)
    w = inst.double_widths
    ys, zs = [], []
    for g, gap in enumerate(inst.gaps):
        start = inst.x_min if g == 0 else x[g - 1] + w[g - 1]
        end = inst.x_max if g == inst.k else x[g]
        for cells, ref, out in ((gap.bottom, y_ref[g], ys), (gap.top, z_ref[g], zs)):
            widths = np.array([c.width for c in cells], dtype=float)
            before = np.concatenate([[0.0], np.cumsum(widths)])
            lo = start + before[:-1]
            hi = end - (before[-1] - before[:-1])
            out.append(np.minimum(hi, np.maximum(lo, np.asarray(ref, dtype=float))))
    return DoubleRowSolution(x, ys, zs, inst.objective(x, ys, zs))


def solve(inst: DoubleRowInstance) -> DoubleRowSolution:
    """Optimum placement of all cells of ``inst``."""
    red = build_reduced(inst)
    sol = single_row.solve(red.single)
    out = extend_solution(inst, red.y_ref, red.z_ref, sol.positions)
    out.reduced_cost = sol.total_cost - red.constant
    out.blocks = sol.blocks
    scale = max(1.0, abs(out.total_cost), abs(out.reduced_cost))
    if abs(out.total_cost - out.reduced_cost) > SELF_CHECK_TOL * scale:
        raise ConsistencyError(f"reduced cost {out.reduced_cost!r} != objective {out.total_cost!r}")
    return out


def solve_fixed_doubles(inst: DoubleRowInstance, x_fixed: Sequence[float]) -> DoubleRowSolution:
    """Baseline: keep the double cells at ``x_fixed`` and place only the single-row cells."""
    y_ref, z_ref = gap_reference_positions(inst)
    return extend_solution(inst, y_ref, z_ref, x_fixed)


def project_to_feasible(inst: DoubleRowInstance, targets: Sequence[float]) -> np.ndarray:
    """Nearest feasible tuple to ``targets`` by a left-to-right then right-to-left sweep."""
    lower, upper = inst.reduced_bounds()
    wp = inst.reduced_widths
    x = np.array(targets, dtype=float)
    prev = -math.inf
    for d in range(inst.k):
        x[d] = max(x[d], lower[d], prev)
        prev = x[d] + wp[d]
    nxt = math.inf
    for d in reversed(range(inst.k)):
        x[d] = min(x[d], upper[d], nxt - wp[d])
        nxt = x[d]
    return x


def preferred_positions(inst: DoubleRowInstance) -> np.ndarray:
    """Each double cell's own cost minimizer over the window (left end of the argmin)."""
    return np.array([c.cost.argmin_interval(inst.x_min, inst.x_max - c.width)[0] for c in inst.doubles])


def baseline_positions(inst: DoubleRowInstance) -> np.ndarray:
    return project_to_feasible(inst, preferred_positions(inst))


def snap_to_sites(inst: DoubleRowInstance, sol: DoubleRowSolution, pitch: float,
                  origin: float | None = None) -> DoubleRowSolution:
    """Move double cells onto the site grid ``origin + k * pitch`` (heuristic post-pass).

    Each cell goes to its nearest site, then a left-to-right and right-to-left
    sweep restores feasibility on the grid; single-row cells are re-placed
    optimally for the snapped doubles. The result is flagged ``heuristic``.
    """
    if pitch <= 0:
        raise ValueError("site pitch must be positive")
    origin = inst.x_min if origin is None else origin
    lower, upper = inst.reduced_bounds()
    wp = inst.reduced_widths
    eps = 1e-9
    site = lambda v: origin + pitch * v
    x = np.array([site(round((p - origin) / pitch)) for p in sol.x])
    prev = -math.inf
    for d in range(inst.k):
        lo = max(lower[d], prev)
        if x[d] < lo:
            x[d] = site(math.ceil((lo - origin) / pitch - eps))
        prev = x[d] + wp[d]
    nxt = math.inf
    for d in reversed(range(inst.k)):
        hi = min(upper[d], nxt - wp[d])
        if x[d] > hi:
            x[d] = site(math.floor((hi - origin) / pitch + eps))
        nxt = x[d]
    if not check_feasible_tuple(inst, x):
        raise InfeasibleError(f"no feasible placement of the double cells on sites of pitch {pitch:g}")
    out = solve_fixed_doubles(inst, x)
    out.heuristic = True
    return out
