import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import check_row_feasible, rel_close, samples
from rowlegal import oracle
from rowlegal.errors import DomainError, InfeasibleError, ValidationError
from rowlegal.generate import random_single_row
from rowlegal.pwq import PiecewiseQuadratic as PWQ
from rowlegal.single_row import (Block, Cell, SingleRowInstance, block_cost_function, restrict_solution,
                                 solve)

seeds = st.integers(0, 2**32 - 1)


def clump_instance():
    f = PWQ.displacement(5, 0, 10)
    return SingleRowInstance((Cell("a", 2, f), Cell("b", 2, f)), 0, 10)


def replay_trace(inst, trace):
    """Replay recorded block placements; returns the largest rightward move seen."""
    S = inst.prefix
    pos = inst.upper.copy()
    worst = 0.0
    for rep, stop, x in trace:
        rep, stop = int(rep), int(stop)
        new = x + S[rep:stop] - S[rep]
        worst = max(worst, float(np.max(new - pos[rep:stop])))
        pos[rep:stop] = new
    return worst, pos


def test_symmetric_clump():
    sol = solve(clump_instance())
    assert list(sol.positions) == [4, 6]
    assert sol.total_cost == 2
    assert [(b.rep, b.stop) for b in sol.blocks] == [(0, 2)]


def test_clamped_cell():
    inst = SingleRowInstance((Cell("a", 2, PWQ.displacement(12, 0, 10)),), 0, 10)
    sol = solve(inst)
    assert sol.positions[0] == 8 and sol.total_cost == 16


def test_flat_cost_goes_to_left_end_of_argmin():
    inst = SingleRowInstance((Cell("a", 1, PWQ.quadratic(0, 0, 0, 0, 10)),), 0, 10)
    assert solve(inst).positions[0] == 0
    inst = SingleRowInstance((Cell("a", 1, PWQ.dead_zone(5, 2, 0, 10)),), 0, 10)
    assert solve(inst).positions[0] == 3


def test_window_boundary_pushes_back():
    f = PWQ.displacement(-5, 0, 10)
    inst = SingleRowInstance((Cell("a", 3, f), Cell("b", 3, f)), 0, 10)
    assert list(solve(inst).positions) == [0, 3]


def test_linear_costs_tie():
    f = PWQ.abs_displacement(2, 0, 10)
    inst = SingleRowInstance((Cell("a", 2, f), Cell("b", 2, f)), 0, 10)
    sol = solve(inst)
    assert check_row_feasible(inst.widths, sol.positions, 0, 10)
    assert sol.total_cost == pytest.approx(2)


def test_empty_instance():
    sol = solve(SingleRowInstance((), 0, 10))
    assert len(sol.positions) == 0 and sol.total_cost == 0


def test_infeasible_instance():
    f = PWQ.displacement(0, 0, 3)
    with pytest.raises(InfeasibleError):
        SingleRowInstance((Cell("a", 2, f), Cell("b", 2, f)), 0, 3)


def test_zero_width_rejected():
    with pytest.raises(ValidationError):
        SingleRowInstance((Cell("a", 0, PWQ.displacement(0, 0, 3)),), 0, 3)


def test_cost_domain_must_cover_feasible_range():
    with pytest.raises(ValidationError):
        SingleRowInstance((Cell("a", 1, PWQ.displacement(0, 2, 3)),), 0, 3)


def test_restrict_left_clamp():
    inst = SingleRowInstance((Cell("a", 1, PWQ.displacement(2, 0, 10)),), 0, 10)
    sol = solve(inst)
    assert restrict_solution(inst, sol, 3, 10).positions[0] == 3


def test_restrict_identity():
    inst = clump_instance()
    sol = solve(inst)
    assert list(restrict_solution(inst, sol, 0, 10).positions) == list(sol.positions)


def test_restrict_errors():
    inst = clump_instance()
    sol = solve(inst)
    with pytest.raises(DomainError):
        restrict_solution(inst, sol, -1, 10)
    with pytest.raises(InfeasibleError):
        restrict_solution(inst, sol, 2, 5)


def test_block_function_singleton():
    inst = SingleRowInstance((Cell("a", 2, PWQ.displacement(5, 0, 10)),), 0, 10)
    g = block_cost_function(inst, Block(0, 1, 2, 5))
    for x in samples(0, 8):
        assert g(x) == pytest.approx((x - 5) ** 2)


def test_block_function_two_cells():
    inst = clump_instance()
    g = block_cost_function(inst, solve(inst).blocks[0])
    for x in samples(0, 6):
        assert g(x) == pytest.approx((x - 5) ** 2 + (x - 3) ** 2)


@given(seeds, st.integers(1, 6))
def test_matches_exact_oracle(seed, n):
    inst = random_single_row(np.random.default_rng(seed), n)
    sol = solve(inst)
    assert check_row_feasible(inst.widths, sol.positions, inst.x_min, inst.x_max)
    assert rel_close(sol.total_cost, oracle.single_row_exact(inst).total_cost, 1e-6)


@given(seeds, st.integers(1, 8))
def test_restrict_matches_resolve(seed, n):
    rng = np.random.default_rng(seed)
    inst = random_single_row(rng, n)
    sol = solve(inst)
    slack = inst.x_max - inst.x_min - inst.prefix[-1]
    a = float(rng.uniform(0, slack))
    b = float(rng.uniform(a + inst.prefix[-1], inst.x_max))
    got = restrict_solution(inst, sol, a, b)
    fresh = solve(inst.with_window(a, b))
    assert check_row_feasible(inst.widths, got.positions, a, b)
    assert rel_close(got.total_cost, fresh.total_cost, 1e-9)


@given(seeds, st.integers(1, 12))
def test_monotone_left(seed, n):
    inst = random_single_row(np.random.default_rng(seed), n)
    sol = solve(inst, trace=True)
    worst, final = replay_trace(inst, sol.trace)
    assert worst <= 1e-9 * max(1.0, abs(inst.x_max))
    assert np.allclose(final, sol.positions)


@given(seeds, st.integers(1, 10))
def test_blocks_contiguous_and_reps_optimal(seed, n):
    inst = random_single_row(np.random.default_rng(seed), n)
    sol = solve(inst)
    S = inst.prefix
    assert sol.blocks[0].rep == 0 and sol.blocks[-1].stop == n
    for b, nxt in zip(sol.blocks, sol.blocks[1:]):
        assert b.stop == nxt.rep
    for b in sol.blocks:
        assert np.allclose(sol.positions[b.rep:b.stop], b.position + S[b.rep:b.stop] - S[b.rep])
        g = block_cost_function(inst, b)
        # the rep minimizes its cumulated cost between the neighbouring blocks
        lo = inst.x_min + S[b.rep] if b.rep == 0 else sol.positions[b.rep - 1] + inst.widths[b.rep - 1]
        hi = inst.x_max - (S[-1] - S[b.rep]) if b.stop == n else sol.positions[b.stop] - b.width
        lo, hi = max(lo, g.lo), min(hi, g.hi)
        best = min(g(x) for x in np.linspace(lo, hi, 201))
        assert g(b.position) <= best + 1e-9 * max(1.0, abs(best))


@given(seeds)
def test_block_function_pointwise(seed):
    inst = random_single_row(np.random.default_rng(seed), 6, slack=2)
    S = inst.prefix
    for b in solve(inst).blocks:
        g = block_cost_function(inst, b)
        for x in samples(g.lo, g.hi, n=30):
            want = sum(inst.cells[l].cost(x + S[l] - S[b.rep]) for l in range(b.rep, b.stop))
            assert rel_close(g(x), want, 1e-9)


def test_large_instance_feasible():
    rng = np.random.default_rng(7)
    inst = random_single_row(rng, 300, max_kinks=3, slack=50)
    sol = solve(inst)
    assert check_row_feasible(inst.widths, sol.positions, inst.x_min, inst.x_max)
    assert sol.total_cost == pytest.approx(inst.objective(sol.positions))
