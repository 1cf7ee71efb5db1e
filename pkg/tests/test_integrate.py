import math

import numpy as np
import pytest

from homoglab.fields import catalog, single_scale
from homoglab.integrate import IntegrationError, StiffnessError, solve, solve_fast
from homoglab.quadrature import adaptive_simpson

HARMONIC = catalog("harmonic").field
SQRT3 = math.sqrt(3.0)


_CELL_TIME = adaptive_simpson(
    lambda r: 1.0 / (2.0 + math.sin(2.0 * math.pi * r)), 0.0, 1.0, 1e-14
)


def harmonic_time_of_flight(v):
    """Exact (quadrature) fast time to reach v from 0 for v' = 2 + sin(2 pi v).

    Whole periodicity cells contribute the cell crossing time exactly; only
    the fractional remainder needs fresh quadrature.
    """
    whole = math.floor(v)
    frac = v - whole
    out = whole * _CELL_TIME
    if frac > 0.0:
        out += adaptive_simpson(
            lambda r: 1.0 / (2.0 + math.sin(2.0 * math.pi * r)), 0.0, frac, 1e-14
        )
    return out


def harmonic_state_oracle(tau):
    """Invert the time-of-flight identity by bisection."""
    lo, hi = 0.0, 3.0 * tau + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if harmonic_time_of_flight(mid) < tau:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14 * max(1.0, tau):
            break
    return 0.5 * (lo + hi)


def test_constant_rhs():
    traj = solve(lambda t, y: 1.0, 0.0, 5.0, 1e-10)
    assert abs(traj.final - 5.0) <= 1e-10


def test_cosine_rhs():
    traj = solve(lambda t, y: math.cos(t), 0.0, math.pi, 1e-10)
    assert abs(traj.final - math.sin(math.pi)) <= 1e-10


def test_harmonic_against_quadrature_inversion_oracle():
    budget = 1e-8
    traj = solve(HARMONIC.flow().rhs, 0.0, 10.0, budget)
    assert abs(traj.final - harmonic_state_oracle(10.0)) <= 2.0 * budget


def test_budget_discipline_quartering():
    # halving the budget at least halves the observed error; test the
    # monotone consequence err(b/4) <= err(b)/2 for robustness
    oracle = harmonic_state_oracle(10.0)
    b = 1e-6
    err_b = abs(solve(HARMONIC.flow().rhs, 0.0, 10.0, b).final - oracle)
    err_q = abs(solve(HARMONIC.flow().rhs, 0.0, 10.0, b / 4.0).final - oracle)
    assert err_q <= err_b / 2.0
    assert err_b <= b


def test_solve_fast_constant_field():
    const = single_scale("1.5")
    for eps in (0.5, 0.01):
        traj = solve_fast(const, eps, 2.0, 4.0, 1e-9)
        assert abs(traj.final - (2.0 + 1.5 * 4.0)) <= 1e-9


def test_solve_fast_harmonic_thm_bound():
    eps, budget = 0.01, 1e-5
    traj = solve_fast(HARMONIC, eps, 0.0, 10.0, budget)
    assert abs(traj.final - SQRT3 * 10.0) <= eps + budget


def test_rescaling_consistency():
    # rescaled fast-time integration vs direct slow-time integration
    eps, budget = 0.05, 1e-8
    fc = HARMONIC.component_callable(0)
    direct = solve(lambda t, u: fc(u / eps, t / eps), 0.0, 1.0, budget)
    rescaled = solve_fast(HARMONIC, eps, 0.0, 1.0, budget)
    assert abs(direct.final - rescaled.final) <= 2.0 * budget


def test_translation_equivariance():
    rng = np.random.default_rng(11)
    budget = 1e-8
    rhs = HARMONIC.flow().rhs
    for _ in range(5):
        tau = rng.uniform(1.0, 50.0)
        c = rng.uniform(0.0, 1.0)
        a = solve(rhs, c + 1.0, tau, budget).final
        b = solve(rhs, c, tau, budget).final + 1.0
        assert abs(a - b) <= 2.0 * budget


def test_comparison_monotonicity():
    budget = 1e-8
    rhs = catalog("sharpness").field.flow().rhs
    t1 = solve(rhs, 0.2, 20.0, budget)
    t2 = solve(rhs, 0.7, 20.0, budget)
    grid = np.linspace(0.0, 20.0, 201)
    assert np.all(t1.sample(grid) <= t2.sample(grid) + 2.0 * budget)


def test_uniform_speed_bound():
    budget = 1e-8
    traj = solve(HARMONIC.flow().rhs, 0.0, 10.0, budget)
    dy = np.abs(np.diff(traj.ys))
    dt = np.diff(traj.ts)
    assert np.all(dy <= (3.0 + budget) * dt + 1e-14)


def test_dense_output_and_range_errors():
    traj = solve(lambda t, y: math.cos(t), 0.0, 2.0, 1e-10)
    # node values are reproduced exactly, interior queries are accurate
    k = len(traj.ts) // 2
    assert traj.state(traj.ts[k]) == pytest.approx(traj.ys[k], abs=1e-13)
    assert traj.state(1.234) == pytest.approx(math.sin(1.234), abs=1e-7)
    with pytest.raises(ValueError):
        traj.state(-0.5)
    with pytest.raises(ValueError):
        traj.state(2.5)


def test_stiffness_error_on_singularity():
    with pytest.raises((StiffnessError, IntegrationError)):
        solve(lambda t, y: 1.0 / (1.0 - t), 0.0, 2.0, 1e-8)


def test_nonfinite_rhs_rejected():
    with pytest.raises(IntegrationError):
        solve(lambda t, y: math.inf, 0.0, 1.0, 1e-8)


def test_bad_arguments():
    with pytest.raises(ValueError):
        solve(lambda t, y: 1.0, 0.0, -1.0, 1e-8)
    with pytest.raises(ValueError):
        solve(lambda t, y: 1.0, 0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        solve_fast(HARMONIC, 1.5, 0.0, 1.0, 1e-8)


def test_node_thinning_bounded_memory():
    traj = solve(HARMONIC.flow().rhs, 0.0, 200.0, 1e-6, max_nodes=500)
    assert len(traj.ts) <= 501
    assert traj.ts[0] == 0.0 and traj.ts[-1] == 200.0
    assert abs(traj.final - harmonic_state_oracle(200.0)) <= 2e-6


def test_vector_solve_matches_componentwise():
    budget = 1e-9
    rhs = lambda t, y: np.array([math.cos(t), 1.0])  # noqa: E731
    traj = solve(rhs, np.array([0.0, 1.0]), 3.0, budget)
    assert traj.dimension == 2
    assert abs(traj.final[0] - math.sin(3.0)) <= budget
    assert abs(traj.final[1] - 4.0) <= budget
    mid = traj.state(1.5)
    assert mid.shape == (2,)
    assert abs(mid[0] - math.sin(1.5)) <= 3e-7


def test_trajectory_stats_exposed():
    traj = solve(lambda t, y: math.cos(t), 0.0, 2.0, 1e-10)
    assert traj.steps >= len(traj.ts) - 1
    assert traj.rejected >= 0
    assert traj.error_budget == 1e-10
