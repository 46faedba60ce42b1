"""Optimal placement of an ordered row of cells with convex piecewise-quadratic costs.

The solver is the clumping algorithm: cells are processed left to right,
each new cell is placed at the left end of its optimum range, and whenever
that would overlap its predecessor block the two blocks are collapsed into
one and the merged block is placed again. Block costs are represented
lazily by the quadratic active directly left of the block position plus a
heap of the kinks further left, so a run costs O((n + m) log min(n, m)) for
n cells and m kinks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numba import njit

from .errors import DomainError, InfeasibleError, ValidationError
from .pwq import PiecewiseQuadratic, total
from .shiftheap import meld_heaps, pop_root, push_node

REL_TOL = 1e-9


@dataclass(frozen=True)
class Cell:
    id: str
    width: float
    cost: PiecewiseQuadratic


def window_tol(x_min: float, x_max: float) -> float:
    return REL_TOL * max(1.0, abs(x_min), abs(x_max), x_max - x_min)


@dataclass(frozen=True)
class SingleRowInstance:
    """Ordered cells to be placed without overlap inside ``[x_min, x_max]``.

    Each cost must be defined at least on the cell's feasible range
    ``[x_min + sum(widths before), x_max - sum(widths from the cell on)]``.
    """

    cells: tuple[Cell, ...]
    x_min: float
    x_max: float

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)) or self.x_max < self.x_min:
            raise ValidationError(f"invalid window [{self.x_min}, {self.x_max}]")
        for i, c in enumerate(self.cells):
            if not (c.width > 0 and math.isfinite(c.width)):
                raise ValidationError(f"cell {c.id!r} must have positive width, got {c.width}", f"/cells/{i}/width")
        total_width = float(self.prefix[-1])
        if total_width > self.x_max - self.x_min + window_tol(self.x_min, self.x_max):
            raise InfeasibleError(
                f"sum of widths {total_width:g} exceeds x_max - x_min = {self.x_max - self.x_min:g}")
        tol = window_tol(self.x_min, self.x_max)
        for i, (c, lo, hi) in enumerate(zip(self.cells, self.lower, self.upper)):
            if c.cost.lo > lo + tol or c.cost.hi < hi - tol:
                raise ValidationError(
                    f"cost of {c.id!r} is defined on [{c.cost.lo:g}, {c.cost.hi:g}] "
                    f"but the cell may be placed in [{lo:g}, {hi:g}]", f"/cells/{i}/cost")

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def widths(self) -> np.ndarray:
        return np.array([c.width for c in self.cells], dtype=float)

    @property
    def prefix(self) -> np.ndarray:
        """``prefix[i]`` is the total width of the cells before cell i."""
        return np.concatenate([[0.0], np.cumsum(self.widths)])

    @property
    def lower(self) -> np.ndarray:
        return self.x_min + self.prefix[:-1]

    @property
    def upper(self) -> np.ndarray:
        p = self.prefix
        return self.x_max - (p[-1] - p[:-1])

    def with_window(self, x_min: float, x_max: float) -> "SingleRowInstance":
        return SingleRowInstance(self.cells, x_min, x_max)

    def objective(self, positions: Sequence[float]) -> float:
        return math.fsum(c.cost(x) for c, x in zip(self.cells, positions))

    def violation(self, positions: Sequence[float]) -> float:
        """Largest amount by which any spacing or window constraint is violated (<= 0 if feasible)."""
        x = np.asarray(positions, dtype=float)
        if len(x) == 0:
            return -math.inf
        w = self.widths
        worst = max(self.x_min - x[0], x[-1] + w[-1] - self.x_max)
        if len(x) > 1:
            worst = max(worst, float(np.max(x[:-1] + w[:-1] - x[1:])))
        return worst


@dataclass(frozen=True)
class Block:
    """Cells ``rep .. stop-1`` placed contiguously with the representative at ``position``."""

    rep: int
    stop: int
    width: float
    position: float


@dataclass
class SingleRowSolution:
    positions: np.ndarray
    total_cost: float
    blocks: list[Block]
    # (rep, stop, position) after every position update of the run, if requested
    trace: np.ndarray | None = field(default=None, repr=False)


@dataclass(frozen=True)
class PackedCosts:
    """Cost functions flattened into arrays, cell i owning segments ``ptr[i]:ptr[i+1]``.

    ``lb[s]`` is the left end of segment s; a cell's first segment starts at its
    lower bound and its last one ends at its upper bound.
    """

    ptr: np.ndarray
    lb: np.ndarray
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    @property
    def num_kinks(self) -> int:
        return int(self.ptr[-1] - (len(self.ptr) - 1))


def pack_costs(costs: Sequence[PiecewiseQuadratic], lower: np.ndarray, upper: np.ndarray) -> PackedCosts:
    """Restrict each cost to ``[lower[i], upper[i]]`` and flatten."""
    ptr = [0]
    lb, a, b, c = [], [], [], []
    for f, lo, hi in zip(costs, lower, upper):
        knots = f.knots
        for k, q in enumerate(f.segments):
            left, right = knots[k], knots[k + 1]
            if right <= lo and k < len(f.segments) - 1:
                continue
            if left >= hi and k > 0 and len(lb) > ptr[-1]:
                break
            lb.append(max(left, lo))
            a.append(q.a)
            b.append(q.b)
            c.append(q.c)
        ptr.append(len(lb))
    arr = lambda v: np.asarray(v, dtype=float)
    return PackedCosts(np.asarray(ptr, dtype=np.int64), arr(lb), arr(a), arr(b), arr(c))


@njit(cache=True)
def _clump(w, S, x_min, x_max, ptr, lb, sa, sb, a_tol, s_tol, x_tol, trace_cap):
    n = len(w)
    total_w = S[n]
    cap = max(1, ptr[n] - n)
    delta = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    rank = np.zeros(cap, dtype=np.int64)
    payload = np.zeros(cap, dtype=np.int64)
    stk_node = np.zeros(160, dtype=np.int64)
    stk_key = np.zeros(160)
    used = 0

    cur = np.empty(n, dtype=np.int64)
    bx = np.empty(n)
    bw = np.empty(n)
    bA = np.empty(n)
    bB = np.empty(n)
    broot = np.full(n, -1, dtype=np.int64)
    boff = np.zeros(n)
    stack = np.empty(n, dtype=np.int64)
    top = 0
    tr = np.empty((max(trace_cap, 1), 3))
    nt = 0

    for i in range(n):
        upper = x_max - (total_w - S[i])
        first = ptr[i]
        s = ptr[i + 1] - 1
        while s > first and lb[s] >= upper:
            s -= 1
        cur[i] = s
        x = upper
        A = sa[s]
        B = sb[s]
        root = -1
        off = 0.0
        if s > first:
            root = push_node(delta, left, right, rank, payload, stk_node, stk_key, root, off, used, lb[s], i)
            used += 1
        W = w[i]
        rep = i
        if nt < trace_cap:
            tr[nt, 0] = rep
            tr[nt, 1] = i + 1
            tr[nt, 2] = x
            nt += 1

        while True:
            if top > 0:
                h = stack[top - 1]
                bound = bx[h] + bw[h]
            else:
                h = -1
                bound = x_min
            collapse = False
            while True:
                max_h = off + delta[root] if root >= 0 else -np.inf
                if A > a_tol:
                    v = -B / (2.0 * A)
                    if v >= x:
                        break
                    if v > max_h and v > bound:
                        x = v
                        break
                    if max_h < bound:
                        # a vertex right at the boundary is a tie: no collapse
                        x = bound
                        collapse = h >= 0 and 2.0 * A * bound + B > s_tol
                        break
                else:
                    slope = 2.0 * A * x + B
                    if slope < -s_tol:
                        break
                    if max_h < bound:
                        x = bound
                        collapse = slope > s_tol and h >= 0
                        break
                # advance every kink at the new position
                x = min(x, max_h)
                while root >= 0 and off + delta[root] >= x - x_tol:
                    l = payload[root]
                    root, _k = pop_root(delta, left, right, rank, stk_node, stk_key, root, off)
                    o = S[l] - S[rep]
                    cs = cur[l]
                    A -= sa[cs]
                    B -= 2.0 * sa[cs] * o + sb[cs]
                    cs -= 1
                    cur[l] = cs
                    A += sa[cs]
                    B += 2.0 * sa[cs] * o + sb[cs]
                    if cs > ptr[l]:
                        root = push_node(delta, left, right, rank, payload, stk_node, stk_key,
                                         root, off, used, lb[cs] - o, l)
                        used += 1
                if nt < trace_cap:
                    tr[nt, 0] = rep
                    tr[nt, 1] = i + 1
                    tr[nt, 2] = x
                    nt += 1
            if nt < trace_cap:
                tr[nt, 0] = rep
                tr[nt, 1] = i + 1
                tr[nt, 2] = x
                nt += 1
            if not collapse:
                bx[rep] = x
                bw[rep] = W
                bA[rep] = A
                bB[rep] = B
                broot[rep] = root
                boff[rep] = off
                stack[top] = rep
                top += 1
                break
            # merge the block of rep into its predecessor block h and place h again
            wh = bw[h]
            B = bB[h] + 2.0 * A * wh + B
            A = bA[h] + A
            W = wh + W
            root = meld_heaps(delta, left, right, rank, stk_node, stk_key, broot[h], boff[h], root, off - wh)
            off = boff[h]
            x = bx[h]
            rep = h
            top -= 1

    pos = np.empty(n)
    for t in range(top):
        r = stack[t]
        stop = stack[t + 1] if t + 1 < top else n
        p = bx[r]
        for l in range(r, stop):
            pos[l] = p
            p += w[l]
    return pos, cur, stack[:top].copy(), tr[:nt].copy()


def solve_packed(widths: np.ndarray, x_min: float, x_max: float, costs: PackedCosts,
                 trace: bool = False) -> tuple[np.ndarray, float, np.ndarray, np.ndarray | None]:
    """Clumping on already packed costs; returns positions, cost, block representatives, trace."""
    w = np.ascontiguousarray(widths, dtype=float)
    n = len(w)
    if n == 0:
        return np.empty(0), 0.0, np.empty(0, dtype=np.int64), (np.empty((0, 3)) if trace else None)
    S = np.concatenate([[0.0], np.cumsum(w)])
    a_scale = float(np.max(np.abs(costs.a))) if len(costs.a) else 0.0
    b_scale = float(np.max(np.abs(costs.b))) if len(costs.b) else 0.0
    x_scale = max(abs(x_min), abs(x_max), 1.0)
    a_tol = 1e-9 * a_scale
    s_tol = 1e-10 * max(1.0, b_scale, 2.0 * a_scale * x_scale)
    x_tol = 1e-12 * x_scale
    trace_cap = 4 * (n + costs.num_kinks) + 16 if trace else 0
    pos, cur, reps, tr = _clump(w, S, float(x_min), float(x_max), costs.ptr, costs.lb, costs.a, costs.b,
                                a_tol, s_tol, x_tol, trace_cap)
    cost = math.fsum(((costs.a[cur] * pos + costs.b[cur]) * pos + costs.c[cur]).tolist())
    return pos, cost, reps, (tr if trace else None)


def solve(inst: SingleRowInstance, trace: bool = False) -> SingleRowSolution:
    """Optimum placement of ``inst`` by the clumping algorithm."""
    packed = pack_costs([c.cost for c in inst.cells], inst.lower, inst.upper)
    pos, _, reps, tr = solve_packed(inst.widths, inst.x_min, inst.x_max, packed, trace=trace)
    # evaluate with the original functions so the reported cost matches objective()
    cost = inst.objective(pos)
    S = inst.prefix
    stops = list(reps[1:]) + [len(inst)]
    blocks = [Block(int(r), int(s), float(S[s] - S[r]), float(pos[r])) for r, s in zip(reps, stops)]
    return SingleRowSolution(pos, cost, blocks, tr)


def restrict_solution(inst: SingleRowInstance, sol: SingleRowSolution,
                      x_min: float, x_max: float) -> SingleRowSolution:
    """Optimum for the same cells in the sub-window ``[x_min, x_max]`` by clamping ``sol``."""
    tol = window_tol(inst.x_min, inst.x_max)
    if not (inst.x_min - tol <= x_min <= x_max <= inst.x_max + tol):
        raise DomainError(f"[{x_min}, {x_max}] is not inside [{inst.x_min}, {inst.x_max}]")
    S = inst.prefix
    if S[-1] > x_max - x_min + tol:
        raise InfeasibleError(f"sum of widths {S[-1]:g} exceeds x_max - x_min = {x_max - x_min:g}")
    lower = x_min + S[:-1]
    upper = x_max - (S[-1] - S[:-1])
    pos = np.minimum(upper, np.maximum(lower, sol.positions))
    blocks = [Block(b.rep, b.stop, b.width, float(pos[b.rep])) for b in sol.blocks]
    return SingleRowSolution(pos, inst.objective(pos), blocks)


def block_cost_function(inst: SingleRowInstance, block: Block) -> PiecewiseQuadratic:
    """Cumulated cost of a block as a function of its representative's position.

    The domain is the representative's feasible range in ``inst``.
    """
    S = inst.prefix
    lo = float(inst.lower[block.rep])
    hi = float(inst.upper[block.rep])
    parts = []
    for l in range(block.rep, block.stop):
        d = float(S[l] - S[block.rep])
        f = inst.cells[l].cost.restrict(lo + d, hi + d).shift(d)
        parts.append(f)
    return total(parts)
