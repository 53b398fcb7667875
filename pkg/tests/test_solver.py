import numpy as np
import pytest

from hamcone import DiscreteOperator, Grid, GridPair, example_system, in_cone, order_leq
from hamcone.solver import (Diverged, NonMonotoneStep, NotBracketed, monotone_iterate, newton_solve, picard,
                            residual)

from conftest import exact_u1, exact_u2, random_monotone_system

# Frozen from tests/oracles.py::nystrom_newton: trapezoid Nystrom at n=513 and
# n=1025, Richardson-extrapolated.  Keys are t, values (u1(t), u2(t)).
ORACLE = {
    0.0: (0.3095305004286581, 0.9679687988103076),
    0.5: (0.2771860878120478, 0.7214605842032377),
    1.0: (0.19493824432045925, 0.18036514605080942),
}


@pytest.fixture(scope="module")
def newton_report(exf_system, grid, exf_operator):
    return newton_solve(exf_system, grid, GridPair.constant(grid, 3.0, 3.0), operator=exf_operator)


def exact_pair(grid):
    return GridPair.from_functions(grid, exact_u1, exact_u2)


def test_residual_examples(const_system, exf_system, grid):
    assert residual(const_system, grid, exact_pair(grid)) <= 1e-10
    assert residual(exf_system, grid, GridPair.zeros(grid)) == 0.0
    assert residual(const_system, grid, GridPair.constant(grid, 1.0, 1.0)) == pytest.approx(7 / 8, abs=1e-12)


def test_nonlocal_condition_of_exact_solution(const_system, grid):
    up, _ = monotone_iterate(const_system, grid, GridPair.zeros(grid), GridPair.constant(grid, 2.0, 2.0))
    u2 = up.solution.component(1)
    assert abs(u2(1.0) - 0.25 * u2(0.5)) <= 1e-9


def test_monotone_constant_f_one_step(const_system, grid):
    up, down = monotone_iterate(const_system, grid, GridPair.zeros(grid), GridPair.constant(grid, 2.0, 2.0))
    want = exact_pair(grid).values
    for rep in (up, down):
        assert rep.converged
        assert len(rep.monotone_trace) == 2
        assert np.max(np.abs(rep.solution.values - want)) <= 1e-10


def test_monotone_from_small_beta_goes_to_zero(exf_system, grid):
    up, down = monotone_iterate(exf_system, grid, GridPair.zeros(grid), GridPair.constant(grid, 0.1, 0.1))
    assert down.converged and down.solution.norm() < 1e-9
    assert all(b <= a + 1e-12 for a, b in zip(down.monotone_trace, down.monotone_trace[1:]))
    assert up.solution.norm() == 0.0


def test_not_bracketed(exf_system, grid):
    with pytest.raises(NotBracketed):
        monotone_iterate(exf_system, grid, GridPair.constant(grid, 0.2, 0.2), GridPair.constant(grid, 0.1, 0.1))
    with pytest.raises(NotBracketed):
        # T beta <= beta fails for a large constant
        monotone_iterate(exf_system, grid, GridPair.zeros(grid), GridPair.constant(grid, 5.0, 5.0))


def test_decreasing_f_breaks_monotonicity(grid):
    sys = example_system(f1="1/(1 + u1)", f2="1/(1 + u2)")
    with pytest.raises(NonMonotoneStep), pytest.warns(RuntimeWarning, match="non-monotone"):
        monotone_iterate(sys, grid, GridPair.zeros(grid), GridPair.constant(grid, 2.0, 2.0))


def test_picard_examples(const_system, exf_system, grid):
    rep = picard(const_system, grid, GridPair.zeros(grid))
    assert rep.converged and np.max(np.abs(rep.solution.values - exact_pair(grid).values)) <= 1e-10
    small = picard(exf_system, grid, GridPair.constant(grid, 0.05, 0.05))
    assert small.converged and small.solution.norm() < 1e-9
    with pytest.raises(Diverged):
        picard(exf_system, grid, GridPair.constant(grid, 100.0, 100.0))


def test_newton_linear_problem(const_system, grid):
    rep = newton_solve(const_system, grid, GridPair.constant(grid, 1.0, 1.0))
    assert rep.converged and rep.iterations == 1


def test_newton_rejects_negative_start(exf_system, grid):
    vals = np.ones((2, grid.n))
    vals[0, 3] = -0.1
    with pytest.raises(ValueError):
        newton_solve(exf_system, grid, GridPair(grid, vals))


def test_newton_nontrivial_solution(newton_report):
    rep = newton_report
    assert rep.converged and rep.residual_sup <= 1e-8
    assert rep.solution.norm() > 0.5
    assert rep.cone_verdict.ok


def test_newton_matches_oracle(newton_report):
    u = newton_report.solution
    for t, (a, b) in ORACLE.items():
        assert u.component(0)(t) == pytest.approx(a, abs=2e-5)
        assert u.component(1)(t) == pytest.approx(b, abs=2e-5)


def test_newton_nonlocal_condition(newton_report):
    u2 = newton_report.solution.component(1)
    assert abs(u2(1.0) - 0.25 * u2(0.5)) <= 1e-8


def test_converged_report_reverifies(newton_report, exf_system, grid):
    assert residual(exf_system, grid, newton_report.solution) <= newton_report.tol


def test_grid_consistency(newton_report, exf_system, grid):
    fine, finer = grid.refine(), grid.refine().refine()
    u513 = newton_solve(exf_system, fine, newton_report.solution.interpolate(fine)).solution
    u1025 = newton_solve(exf_system, finer, u513.interpolate(finer)).solution
    # Richardson estimate of the n=513 discretization error (second order)
    estimate = 4 / 3 * np.max(np.abs(u513.values - u1025.values[:, ::2]))
    res = residual(exf_system, fine, newton_report.solution.interpolate(fine))
    assert res <= 10 * estimate


@pytest.mark.parametrize("seed", range(5))
def test_random_monotone_systems(seed):
    rng = np.random.default_rng(seed)
    system, beta = random_monotone_system(rng)
    grid = Grid(0.0, 1.0, 129)
    T = DiscreteOperator(system, grid)
    alpha0, beta0 = GridPair.zeros(grid), GridPair.constant(grid, *beta)
    assert order_leq(T(beta0), beta0, system.cone)
    up, down = monotone_iterate(system, grid, alpha0, beta0, operator=T)
    assert up.converged and down.converged
    assert up.max_order_violation < 1e-12 and down.max_order_violation < 1e-12
    assert all(b >= a - 1e-12 for a, b in zip(up.monotone_trace, up.monotone_trace[1:]))
    assert all(b <= a + 1e-12 for a, b in zip(down.monotone_trace, down.monotone_trace[1:]))
    assert order_leq(up.solution, down.solution, system.cone, tol=1e-9)
    for rep in (up, down):
        assert residual(system, grid, rep.solution, T) <= rep.tol
        assert in_cone(rep.solution, system.cone).ok
