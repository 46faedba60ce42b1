"""Strategies and brute-force references shared by the tests."""

import numpy as np
from hypothesis import strategies as st

from rowlegal.pwq import PiecewiseQuadratic, Quadratic

CURVATURES = (0.0, 0.25, 1.0, 3.0)


def rel_close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


@st.composite
def convex_pwq(draw, lo=None, hi=None, max_kinks=4):
    """Random convex continuous piecewise quadratic, built left to right."""
    if lo is None:
        lo = draw(st.integers(-20, 20)) / 2
    if hi is None:
        hi = lo + draw(st.integers(1, 40)) / 2
    raw = draw(st.lists(st.floats(0.01, 0.99), max_size=max_kinks, unique=True))
    bps = sorted({round(lo + u * (hi - lo), 6) for u in raw} - {lo, hi})
    a = draw(st.sampled_from(CURVATURES))
    q = Quadratic(a, draw(st.integers(-10, 10)) - 2 * a * lo, draw(st.integers(-5, 5)))
    segs = [q]
    for p in bps:
        a2 = draw(st.sampled_from(CURVATURES))
        jump = draw(st.sampled_from((0.0, 0.5, 1.0, 4.0)))
        s = q.slope(p) + jump
        b2 = s - 2 * a2 * p
        c2 = q(p) - (a2 * p * p + b2 * p)
        q = Quadratic(a2, b2, c2)
        segs.append(q)
    return PiecewiseQuadratic(lo, hi, tuple(bps), tuple(segs))


def brute_eval(f, x):
    """Value from the raw segment list, independent of the class' lookup."""
    knots = [f.lo, *f.breakpoints, f.hi]
    for k, q in enumerate(f.segments):
        if knots[k] <= x <= knots[k + 1]:
            return q.a * x * x + q.b * x + q.c
    raise ValueError(x)


def samples(lo, hi, n=100, seed=0):
    rng = np.random.default_rng(seed)
    return np.concatenate([[lo, hi], rng.uniform(lo, hi, size=n - 2)])


def midpoint_convex(f, lo, hi, n=100, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        a, b = rng.uniform(lo, hi, size=2)
        fa, fb, fm = f(a), f(b), f((a + b) / 2)
        if fm > (fa + fb) / 2 + 1e-9 * max(1.0, abs(fa), abs(fb)):
            return False
    return True


def check_row_feasible(widths, positions, x_min, x_max, tol=1e-9):
    prev = x_min
    for w, p in zip(widths, positions):
        if p < prev - tol:
            return False
        prev = p + w
    return prev <= x_max + tol


def grid_min(f, lo, hi, n=100_001):
    xs = np.linspace(lo, hi, n)
    return float(np.min(f(xs)))


def random_feasible_tuple(inst, rng):
    """Uniformly spread slack between the double cells' lower bounds."""
    lower, upper = inst.reduced_bounds()
    slack = float(upper[0] - lower[0])
    steps = np.sort(rng.uniform(0, slack, size=inst.k))
    return lower + steps


def extension_cost_by_oracle(inst, x):
    """Doubles fixed at x; each gap row solved on its own gap by the exact oracle."""
    from rowlegal.oracle import single_row_exact
    from rowlegal.single_row import SingleRowInstance

    w = inst.double_widths
    total = sum(c.cost(p) for c, p in zip(inst.doubles, x))
    for g, gap in enumerate(inst.gaps):
        start = inst.x_min if g == 0 else x[g - 1] + w[g - 1]
        end = inst.x_max if g == inst.k else x[g]
        for cells in gap.rows():
            if cells:
                total += single_row_exact(SingleRowInstance(cells, start, max(end, start))).total_cost
    return total


# filled by test_acceptance, printed in the terminal summary
ACCEPTANCE_LINES = []
