import math

import numpy as np
import pytest

from homoglab.fields import FieldError, catalog, single_scale
from homoglab.integrate import solve
from homoglab.transport import (
    homogenized_transport,
    solve_transport,
    transport_drift,
    transport_problem,
)

HARMONIC = catalog("harmonic")
SHEAR = catalog("shear-golden")
SQRT3 = math.sqrt(3.0)
GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def test_constant_speed_transport():
    field = single_scale("1")
    grid = np.linspace(-1.0, 1.0, 17)
    p = transport_problem(field, "u", 1.0, grid, t=1.5, eps=0.1)
    res = solve_transport(p, budget=1e-9)
    assert np.allclose(res.values, grid - 1.5, atol=2e-9)


def test_harmonic_transport_sharp_bound():
    grid = np.linspace(0.0, 1.0, 64, endpoint=False)
    eps, budget = 0.01, 1e-4
    p = transport_problem(HARMONIC.field, "u", 1.0, grid, t=2.0, eps=eps)
    res = solve_transport(p, budget)
    ref = grid - SQRT3 * 2.0
    err = float(np.max(np.abs(res.values - ref)))
    assert err <= 1.0 * eps + budget


def test_sharpness_transport():
    grid = np.linspace(0.0, 1.0, 16, endpoint=False)
    eps, budget = 0.01, 1e-4
    p = transport_problem(catalog("sharpness").field, "u", 1.0, grid, t=2.0, eps=eps)
    res = solve_transport(p, budget)
    ref = grid + 2.0  # drift is -1, so the datum translates by +t
    err = float(np.max(np.abs(res.values - ref)))
    assert err <= (1.0 + 2.0 * 1.0) * eps + budget


def test_homogenized_transport_examples():
    assert homogenized_transport("u", 2.0, 5.0, 1.0) == 3.0
    assert homogenized_transport("u*u", 2.0, 5.0, 0.0) == 25.0
    xi = np.array([0.5, (1.0 + math.sqrt(5.0)) / 4.0])
    val = homogenized_transport("u1 + u2", xi, np.zeros(2), 4.0)
    assert val == pytest.approx(-(3.0 + math.sqrt(5.0)), abs=1e-12)


def test_transport_drift_constant():
    assert transport_drift(single_scale("0.7"), 1e-8).value == pytest.approx(0.7, abs=1e-7)


def test_transport_drift_harmonic():
    ec = transport_drift(HARMONIC.field, 1e-8)
    assert float(ec.value) == pytest.approx(SQRT3, abs=1e-7)


def test_transport_drift_shear():
    ec = transport_drift(SHEAR.field, 5e-2, c0=SHEAR.extras["c0_bound"])
    gap = np.abs(np.asarray(ec.value) - SHEAR.expected)
    assert np.all(gap <= np.asarray(ec.error_bar))


def test_foot_points_return_under_forward_flow():
    # re-solving forward from the foot point lands back on the grid point
    eps, budget = 0.05, 1e-8
    grid = np.array([0.0, 0.3, 0.8])
    p = transport_problem(HARMONIC.field, "u", 1.0, grid, t=1.0, eps=eps)
    res = solve_transport(p, budget)
    fc = HARMONIC.field.component_callable(0)
    for x, foot in zip(grid, res.feet):
        forward = solve(lambda t, u: fc(u / eps, t / eps), float(foot), 1.0, budget)
        assert abs(forward.final - x) <= 2.0 * budget


def test_quasi_periodic_transport_ratio_stable():
    field = catalog("qp-cosine").field
    grid = np.linspace(0.0, 1.0, 16, endpoint=False)
    from homoglab.quasiperiodic import effective_speed

    drift = effective_speed(field.qp)
    ratios = []
    for eps in (1e-1, 1e-2):
        p = transport_problem(field, "u", 1.0, grid, t=2.0, eps=eps)
        res = solve_transport(p, budget=1e-5)
        err = float(np.max(np.abs(res.values - (grid - drift * 2.0))))
        ratios.append(err / eps)
    assert max(ratios) / min(ratios) <= 2.0


def test_shear_transport_bound_small():
    # 2-D theorem bound with the conjugation-backed constant, small grid
    axes = [np.linspace(0.0, 1.0, 8, endpoint=False)] * 2
    mesh = np.meshgrid(*axes, indexing="ij")
    grid = np.stack([m.ravel() for m in mesh], axis=1)
    drift = SHEAR.expected
    c0 = SHEAR.extras["c0_bound"]
    for eps in (1e-1, 3e-2):
        p = transport_problem(SHEAR.field, "u1 + u2", 1.0, grid, t=2.0, eps=eps)
        res = solve_transport(p, budget=1e-5)
        ref = np.array([
            homogenized_transport("u1 + u2", drift, x, 2.0) for x in grid
        ])
        err = float(np.max(np.abs(res.values - ref)))
        assert err <= 1.0 * (1.0 + c0) * eps * 1.05


def test_lipschitz_declaration_enforced():
    grid = np.linspace(0.0, 1.0, 8)
    with pytest.raises(FieldError, match="Lipschitz"):
        transport_problem(HARMONIC.field, "2*u", 1.0, grid, t=1.0, eps=0.1)
    # matching declaration passes
    transport_problem(HARMONIC.field, "2*u", 2.0, grid, t=1.0, eps=0.1)


def test_problem_validation():
    grid = np.linspace(0.0, 1.0, 8)
    with pytest.raises(FieldError):
        transport_problem(HARMONIC.field, "u1 + u2", 1.0, grid, t=1.0, eps=0.1)
    with pytest.raises(ValueError):
        transport_problem(HARMONIC.field, "u", 1.0, grid, t=-1.0, eps=0.1)
    with pytest.raises(FieldError):
        transport_problem(catalog("wiggly-gradient").field, "u", 1.0, grid, t=1.0, eps=0.1)
