import numpy as np
import pytest

from helpers import check_row_feasible
from rowlegal import double_row as dr
from rowlegal import oracle
from rowlegal.errors import OracleLimitError
from rowlegal.generate import random_double_row, random_single_row
from rowlegal.pwq import PiecewiseQuadratic as PWQ
from rowlegal.single_row import Cell, SingleRowInstance


def clump_instance():
    f = PWQ.displacement(5, 0, 10)
    return SingleRowInstance((Cell("a", 2, f), Cell("b", 2, f)), 0, 10)


def test_exact_clump():
    sol = oracle.single_row_exact(clump_instance())
    assert list(sol.positions) == pytest.approx([4, 6])
    assert sol.total_cost == pytest.approx(2)


def test_exact_clamped():
    inst = SingleRowInstance((Cell("a", 2, PWQ.displacement(12, 0, 10)),), 0, 10)
    sol = oracle.single_row_exact(inst)
    assert sol.positions[0] == pytest.approx(8) and sol.total_cost == pytest.approx(16)


def test_exact_refuses_large():
    rng = np.random.default_rng(0)
    with pytest.raises(OracleLimitError):
        oracle.single_row_exact(random_single_row(rng, 9))


def test_exact_refuses_many_segments():
    f = sum((PWQ.abs_displacement(t, 0, 20) for t in (3, 6, 9, 12)), PWQ.quadratic(0, 0, 0, 0, 20))
    with pytest.raises(OracleLimitError):
        oracle.single_row_exact(SingleRowInstance((Cell("a", 1, f),), 0, 20))


def test_grid_exact_on_integral_optimum():
    sol = oracle.single_row_grid(clump_instance(), oracle.OracleConfig(step=1.0))
    assert sol.total_cost == 2


def test_grid_refinement_monotone():
    rng = np.random.default_rng(1)
    for _ in range(20):
        inst = random_single_row(rng, 4)
        costs = [oracle.single_row_grid(inst, oracle.OracleConfig(step=s)).total_cost for s in (0.5, 0.25, 0.125)]
        assert costs[0] >= costs[1] - 1e-9 and costs[1] >= costs[2] - 1e-9


def test_exact_and_grid_agree():
    rng = np.random.default_rng(2)
    step = 0.05
    for _ in range(40):
        inst = random_single_row(rng, 4)
        ex = oracle.single_row_exact(inst)
        gr = oracle.single_row_grid(inst, oracle.OracleConfig(step=step))
        assert check_row_feasible(inst.widths, gr.positions, inst.x_min, inst.x_max)
        assert check_row_feasible(inst.widths, ex.positions, inst.x_min, inst.x_max)
        bound = oracle.refinement_bound(inst.cells, inst.x_min, inst.x_max, step)
        assert ex.total_cost - 1e-9 <= gr.total_cost <= ex.total_cost + bound + 1e-9


def test_double_grid_doubles_only():
    inst = dr.DoubleRowInstance(
        (Cell("C", 2, PWQ.displacement(3, 0, 10)), Cell("D", 3, PWQ.displacement(4, 0, 10))),
        (dr.Gap(), dr.Gap(), dr.Gap()), 0, 10)
    cfg = oracle.OracleConfig(step=0.5)
    got = oracle.double_row_grid(inst, cfg)
    ref = oracle.single_row_grid(SingleRowInstance(inst.doubles, 0, 10), cfg)
    assert got.total_cost == pytest.approx(ref.total_cost)


def test_double_grid_squeeze():
    t = lambda v: PWQ.displacement(v, 0, 10)
    inst = dr.DoubleRowInstance((Cell("C", 2, t(4)),),
                                (dr.Gap((), (Cell("t0", 4, t(6)),)), dr.Gap((Cell("b1", 4, t(0)),), ())), 0, 10)
    for step in (0.01, 0.005):
        assert oracle.double_row_grid(inst, oracle.OracleConfig(step=step)).total_cost == pytest.approx(72)


def test_double_grid_refuses():
    rng = np.random.default_rng(0)
    with pytest.raises(OracleLimitError):
        oracle.double_row_grid(random_double_row(rng, k=4))
    with pytest.raises(OracleLimitError):
        oracle.double_row_grid(random_double_row(rng, k=2), oracle.OracleConfig(step=1e-4))


def test_double_grid_feasible_and_bounds_solver():
    rng = np.random.default_rng(4)
    step = 0.05
    for _ in range(20):
        inst = random_double_row(rng, widths=(0.5, 1.0))
        gr = oracle.double_row_grid(inst, oracle.OracleConfig(step=step))
        assert inst.violation(gr.x, gr.y, gr.z) <= 1e-9
        best = dr.solve(inst).total_cost
        assert best - 1e-9 <= gr.total_cost <= best + oracle.double_row_refinement_bound(inst, step) + 1e-9


def test_config_validation():
    with pytest.raises(ValueError):
        oracle.OracleConfig(step=0)
