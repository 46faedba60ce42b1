"""Brute-force reference solvers for small instances.

Nothing here uses the clumping solver or the reduction; these are slow,
simple and independent so they can certify the fast path.

* :func:`single_row_exact` enumerates which spacing/window constraints are
  tight and which cost piece every cell sits on. Each tight-constraint group
  moves rigidly with one free coordinate, so its cost is a 1-D quadratic;
  candidate positions are the vertex and the ends of the piece interval, and
  a small DP over groups checks the remaining constraints.
* :func:`single_row_grid` and :func:`double_row_grid` restrict all positions to
  the grid ``x_min + k * step`` and run dynamic programs over it.
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .double_row import DoubleRowInstance, DoubleRowSolution
from .errors import OracleLimitError
from .single_row import Block, SingleRowInstance, SingleRowSolution


@dataclass(frozen=True)
class OracleConfig:
    step: float = 0.01
    max_grid_points: int = 10_000_000
    max_cells: int = 8
    max_segments: int = 3

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("grid step must be positive")


DEFAULT = OracleConfig()


def _pieces(f, lo, hi):
    """(left, right, a, b, c) for every piece of f overlapping [lo, hi]."""
    knots = (f.lo, *f.breakpoints, f.hi)
    out = []
    for k, q in enumerate(f.segments):
        l, r = max(knots[k], lo), min(knots[k + 1], hi)
        if l <= r:
            out.append((l, r, q.a, q.b, q.c))
    return out


def single_row_exact(inst: SingleRowInstance, cfg: OracleConfig = DEFAULT) -> SingleRowSolution:
    n = len(inst)
    if n == 0:
        return SingleRowSolution(np.empty(0), 0.0, [])
    if n > cfg.max_cells:
        raise OracleLimitError(f"exact oracle handles at most {cfg.max_cells} cells, got {n}")
    w = [c.width for c in inst.cells]
    S = [0.0]
    for x in w:
        S.append(S[-1] + x)
    lower = [inst.x_min + S[i] for i in range(n)]
    upper = [inst.x_max - (S[n] - S[i]) for i in range(n)]
    pieces = [_pieces(c.cost, lo, hi) for c, lo, hi in zip(inst.cells, lower, upper)]
    if max(len(p) for p in pieces) > cfg.max_segments:
        raise OracleLimitError(f"exact oracle handles at most {cfg.max_segments} pieces per cost")
    tol = 1e-9 * max(1.0, abs(inst.x_min), abs(inst.x_max))

    def group_cost(s, e, t):
        return sum(inst.cells[l].cost(t + S[l] - S[s]) for l in range(s, e))

    cache = {}

    def candidates(s, e, pin_left, pin_right):
        key = (s, e, pin_left, pin_right)
        if key in cache:
            return cache[key]
        lo, hi = lower[s], upper[s]
        ts = []
        if pin_left or pin_right:
            t = inst.x_min if pin_left else inst.x_max - (S[e] - S[s])
            if not (pin_left and pin_right) or abs(t + S[e] - S[s] - inst.x_max) <= tol:
                ts.append(t)
        else:
            for choice in itertools.product(*(pieces[l] for l in range(s, e))):
                il, ir, A, B = lo, hi, 0.0, 0.0
                for l, (pl, pr, a, b, _c) in zip(range(s, e), choice):
                    d = S[l] - S[s]
                    il, ir = max(il, pl - d), min(ir, pr - d)
                    A += a
                    B += 2 * a * d + b
                if il > ir:
                    continue
                ts += [il, ir]
                if A > 0:
                    ts.append(min(ir, max(il, -B / (2 * A))))
        ts = sorted(set(min(hi, max(lo, t)) for t in ts))
        out = [(t, group_cost(s, e, t)) for t in ts]
        cache[key] = out
        return out

    best_cost, best_pos = math.inf, None
    for mask in range(1 << (n + 1)):
        tight = [(mask >> j) & 1 for j in range(n + 1)]
        # constraint j (1 <= j < n) joins cells j-1 and j
        starts = [0] + [j for j in range(1, n) if not tight[j]]
        groups = list(zip(starts, starts[1:] + [n]))
        cand = [candidates(s, e, bool(tight[0]) and s == 0, bool(tight[n]) and e == n) for s, e in groups]
        if any(not c for c in cand):
            continue
        # DP over groups: best total for each candidate of the current group
        prev_t, prev_best, back = None, None, []
        for gi, ((s, e), cs) in enumerate(zip(groups, cand)):
            if gi == 0:
                cur = [(c, None) for _t, c in cs]
            else:
                ps, pe = groups[gi - 1]
                width = S[pe] - S[ps]
                order = sorted(range(len(prev_t)), key=lambda i: prev_t[i])
                sorted_t = [prev_t[i] for i in order]
                run_best, run_arg = [], []
                m, arg = math.inf, None
                for i in order:
                    if prev_best[i] < m:
                        m, arg = prev_best[i], i
                    run_best.append(m)
                    run_arg.append(arg)
                cur = []
                for t, c in cs:
                    k = bisect.bisect_right(sorted_t, t - width + tol)
                    if k == 0:
                        cur.append((math.inf, None))
                    else:
                        cur.append((c + run_best[k - 1], run_arg[k - 1]))
            back.append([b for _v, b in cur])
            prev_t = [t for t, _c in cs]
            prev_best = [v for v, _b in cur]
        i = int(np.argmin(prev_best))
        if prev_best[i] < best_cost:
            best_cost = prev_best[i]
            pos = [0.0] * n
            for gi in reversed(range(len(groups))):
                s, e = groups[gi]
                t = cand[gi][i][0]
                for l in range(s, e):
                    pos[l] = t + S[l] - S[s]
                i = back[gi][i]
            best_pos = pos
    if best_pos is None:
        raise RuntimeError("exact oracle found no feasible placement")
    pos = np.array(best_pos)
    return SingleRowSolution(pos, inst.objective(pos), [])


# ----------------------------------------------------------------------
# grid oracles


def _grid(x_min, x_max, step):
    K = int(math.floor((x_max - x_min) / step + 1e-9))
    return K, x_min + step * np.arange(K + 1)


def _steps(width, step):
    return int(math.ceil(width / step - 1e-9))


def _cell_on_grid(cell, lo, hi, pts):
    """Cost of a cell at every grid point, +inf outside [lo, hi]."""
    tol = 1e-9 * max(1.0, abs(lo), abs(hi))
    ok = (pts >= lo - tol) & (pts <= hi + tol)
    out = np.full(len(pts), np.inf)
    out[ok] = cell.cost(np.clip(pts[ok], cell.cost.lo, cell.cost.hi))
    return out


def _row_dp(cells, x_min, x_max, pts, step, a=0):
    """Grid DP for cells placed from grid index ``a`` on; returns per-cell tables and width steps."""
    S = np.concatenate([[0.0], np.cumsum([c.width for c in cells])])
    ws = [_steps(c.width, step) for c in cells]
    tables = []
    prev = None
    for i, c in enumerate(cells):
        f = _cell_on_grid(c, x_min + S[i], x_max - (S[-1] - S[i]), pts)
        f[:a] = np.inf
        if prev is not None:
            shifted = np.full(len(pts), np.inf)
            pm = np.minimum.accumulate(prev)
            if ws[i - 1] < len(pts):
                shifted[ws[i - 1]:] = pm[:len(pts) - ws[i - 1]]
            f = f + shifted
        tables.append(f)
        prev = f
    return tables, ws


def _row_backtrack(tables, ws, pts, last_limit):
    """Positions achieving min over tables[-1][:last_limit + 1]."""
    n = len(tables)
    idx = [0] * n
    limit = last_limit
    for i in reversed(range(n)):
        if limit < 0:
            return None
        k = int(np.argmin(tables[i][:limit + 1]))
        if not np.isfinite(tables[i][k]):
            return None
        idx[i] = k
        limit = k - ws[i - 1] if i > 0 else 0
    return pts[idx]


def single_row_grid(inst: SingleRowInstance, cfg: OracleConfig = DEFAULT) -> SingleRowSolution:
    n = len(inst)
    if n == 0:
        return SingleRowSolution(np.empty(0), 0.0, [])
    K, pts = _grid(inst.x_min, inst.x_max, cfg.step)
    if (K + 1) * n > cfg.max_grid_points:
        raise OracleLimitError(f"grid of {K + 1} points x {n} cells exceeds {cfg.max_grid_points}")
    tables, ws = _row_dp(inst.cells, inst.x_min, inst.x_max, pts, cfg.step)
    pos = _row_backtrack(tables, ws, pts, K - ws[-1])
    if pos is None:
        raise OracleLimitError("no feasible grid placement; refine the grid step")
    return SingleRowSolution(pos, inst.objective(pos), [])


def _gap_table(cells, inst, pts, step, starts):
    """T[r, b] = min cost of ``cells`` inside grid interval [starts[r], b]."""
    K = len(pts) - 1
    T = np.full((len(starts), K + 1), np.inf)
    if not cells:
        for r, a in enumerate(starts):
            if a <= K:
                T[r, a:] = 0.0
        return T
    S = np.concatenate([[0.0], np.cumsum([c.width for c in cells])])
    ws = [_steps(c.width, step) for c in cells]
    base = [_cell_on_grid(c, inst.x_min + S[i], inst.x_max - (S[-1] - S[i]), pts) for i, c in enumerate(cells)]
    cols = np.arange(K + 1)
    D = np.where(cols[None, :] >= np.asarray(starts)[:, None], base[0][None, :], np.inf)
    for i in range(1, len(cells)):
        pm = np.minimum.accumulate(D, axis=1)
        shifted = np.full_like(D, np.inf)
        if ws[i - 1] <= K:
            shifted[:, ws[i - 1]:] = pm[:, :K + 1 - ws[i - 1]]
        D = base[i][None, :] + shifted
    pm = np.minimum.accumulate(D, axis=1)
    if ws[-1] <= K:
        T[:, ws[-1]:] = pm[:, :K + 1 - ws[-1]]
    return T


def double_row_grid(inst: DoubleRowInstance, cfg: OracleConfig = DEFAULT) -> DoubleRowSolution:
    """Grid-restricted optimum of a small double-row instance."""
    k = inst.k
    if k > 3:
        raise OracleLimitError(f"double-row grid oracle handles k <= 3, got {k}")
    step = cfg.step
    K, pts = _grid(inst.x_min, inst.x_max, step)
    if (K + 1) ** 2 > cfg.max_grid_points:
        raise OracleLimitError(f"{K + 1} grid points squared exceeds {cfg.max_grid_points}")
    cols = np.arange(K + 1)
    wd = [_steps(c.width, step) for c in inst.doubles]
    fd = [_cell_on_grid(c, inst.x_min, inst.x_max - c.width, pts) for c in inst.doubles]

    def gap_cost(g, starts):
        gap = inst.gaps[g]
        return _gap_table(gap.bottom, inst, pts, step, starts) + _gap_table(gap.top, inst, pts, step, starts)

    # V[x] = best cost of doubles 0..d and gaps 0..d with double d at grid index x
    V = fd[0] + gap_cost(0, [0])[0]
    back = []
    for d in range(1, k):
        starts = cols + wd[d - 1]
        starts = np.minimum(starts, K + 1)
        M = V[:, None] + gap_cost(d, starts)
        arg = np.argmin(M, axis=0)
        V = fd[d] + M[arg, cols]
        back.append(arg)
    starts = np.minimum(cols + wd[k - 1], K + 1)
    last = V + gap_cost(k, starts)[:, K]
    xi = int(np.argmin(last))
    if not np.isfinite(last[xi]):
        raise OracleLimitError("no feasible grid placement; refine the grid step")
    idx = [xi]
    for arg in reversed(back):
        idx.append(int(arg[idx[-1]]))
    idx.reverse()
    x = pts[idx]

    ys, zs = [], []
    w = inst.double_widths
    for g, gap in enumerate(inst.gaps):
        a = 0 if g == 0 else idx[g - 1] + wd[g - 1]
        b = K if g == k else idx[g]
        lo = inst.x_min if g == 0 else x[g - 1] + w[g - 1]
        for cells, out in ((gap.bottom, ys), (gap.top, zs)):
            if not cells:
                out.append(np.empty(0))
                continue
            tables, ws = _row_dp(cells, inst.x_min, inst.x_max, pts, step, a=a)
            out.append(_row_backtrack(tables, ws, pts, b - ws[-1]))
    return DoubleRowSolution(x, ys, zs, inst.objective(x, ys, zs))


def refinement_bound(cells, x_min: float, x_max: float, step: float) -> float:
    """Upper bound on grid cost minus true optimum: cells * step * max |slope| over the window.

    Valid when ``x_min`` and all widths lie on the grid.
    """
    cells = list(cells)
    slope = 0.0
    for c in cells:
        f = c.cost
        lo, hi = max(f.lo, x_min), min(f.hi, x_max)
        slope = max(slope, abs(f.segments[0].slope(lo)), abs(f.segments[-1].slope(hi)))
    return len(cells) * step * slope


def double_row_refinement_bound(inst: DoubleRowInstance, step: float) -> float:
    cells = list(inst.doubles)
    for gap in inst.gaps:
        cells += list(gap.bottom) + list(gap.top)
    return refinement_bound(cells, inst.x_min, inst.x_max, step)
