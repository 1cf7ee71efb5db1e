import math

import numpy as np
import pytest

from homoglab.fields import GOLDEN, FieldError, catalog, single_scale
from homoglab.highdim import (
    ResonanceError,
    conjugation_theta,
    estimate_c0,
    rotation_vector,
    shear_field,
)
from homoglab.integrate import solve

SHEAR = catalog("shear-golden")


def test_estimate_c0_time_only_field():
    field = single_scale("sin(2*pi*tau)", "cos(2*pi*tau)")
    rep = estimate_c0(field, T=20.0, pairs_per_axis=3, budget=1e-6)
    assert rep.c0_hat <= 2e-6
    assert rep.pair_count == 81
    assert rep.horizon == 20.0


def test_estimate_c0_constant_drift():
    field = single_scale("1", "2")
    rep = estimate_c0(field, T=10.0, pairs_per_axis=2, budget=1e-8)
    assert rep.c0_hat <= 2e-8


def test_estimate_c0_shear_below_proof_bound():
    rep = estimate_c0(SHEAR.field, T=40.0, pairs_per_axis=3, budget=1e-6)
    assert 0.0 <= rep.c0_hat <= SHEAR.extras["c0_bound"]
    c2, c1 = rep.worst_pair
    diff = np.asarray(c1) - np.asarray(c2)
    assert np.all(diff >= 0.0) and np.all(diff <= 1.0)
    assert rep.per_component.shape == (2,)


def test_estimate_c0_monotone_in_horizon():
    a = estimate_c0(SHEAR.field, T=10.0, pairs_per_axis=2, budget=1e-6)
    b = estimate_c0(SHEAR.field, T=20.0, pairs_per_axis=2, budget=1e-6)
    assert b.c0_hat >= a.c0_hat - 1e-9


def test_estimate_c0_rejects_scalar():
    with pytest.raises(ValueError):
        estimate_c0(catalog("harmonic").field, T=5.0)


def test_rotation_vector_constant_field():
    field = single_scale("1.25", "-0.5")
    rv = rotation_vector(field, c0=0.0, tol=1e-2)
    assert np.allclose(rv.value, [1.25, -0.5], atol=1e-6)
    assert np.all(np.asarray(rv.error_bar) > 0.0)


def test_rotation_vector_product_embedding():
    # harmonic in the first axis, frozen second axis
    field = single_scale("2 + sin(2*pi*r1)", "0")
    rv = rotation_vector(field, c0=1.0, tol=2e-2)
    assert abs(rv.value[0] - math.sqrt(3.0)) <= rv.error_bar[0]
    assert abs(rv.value[1]) <= rv.error_bar[1]


def test_rotation_vector_shear_inside_rigorous_bar():
    rv = rotation_vector(SHEAR.field, SHEAR.extras["c0_bound"], tol=1e-2)
    gap = np.abs(np.asarray(rv.value) - SHEAR.expected)
    assert np.all(gap <= np.asarray(rv.error_bar))
    assert rv.rigorous


def test_shear_field_constant_g():
    field = shear_field((1.0, 1.0), {(0, 0): 2.0})
    flow = field.flow()
    out = flow.rhs(0.0, np.array([0.3, 0.7]))
    assert np.allclose(out, [0.5, 0.5], atol=1e-14)


def test_shear_field_rejects_vanishing_g():
    with pytest.raises(FieldError):
        shear_field((1.0, GOLDEN), {(0, 0): 1.0, (1, 1): 0.5, (-1, -1): 0.5})


def test_conjugation_theta_constant_g():
    theta = conjugation_theta({(0, 0): 2.0}, (1.0, GOLDEN))
    assert theta.sup_bound == 0.0
    assert theta(np.array([0.2, 0.4])) == 0.0


def test_conjugation_theta_golden_two_mode_sum():
    theta = conjugation_theta(SHEAR.extras["modes"], SHEAR.extras["xi"])
    expected = 1.0 / (2.0 * math.pi * (1.0 + GOLDEN))
    assert theta.sup_bound == pytest.approx(expected, abs=1e-15)
    assert theta.sup_bound == pytest.approx(0.0608, abs=1e-4)
    # theta(v) = sin(2 pi (v1 + v2)) / (2 pi (1 + golden))
    v = np.array([0.1, 0.05])
    assert theta(v) == pytest.approx(
        math.sin(2.0 * math.pi * 0.15) * expected, abs=1e-14
    )


def test_conjugation_theta_resonance():
    with pytest.raises(ResonanceError):
        conjugation_theta({(1, -2): 0.5, (-1, 2): 0.5}, (2.0, 1.0))


def test_linear_flow_conjugation_residual():
    budget = 1e-6
    theta = conjugation_theta(SHEAR.extras["modes"], SHEAR.extras["xi"])
    flow = SHEAR.field.flow()
    traj = solve(flow.rhs, np.array([0.2, 0.4]), 100.0, budget)
    speed = np.asarray(SHEAR.extras["xi"]) / SHEAR.extras["g_mean"]
    w = traj.ys + np.outer(theta.values(traj.ys), speed)
    resid = float(np.max(np.abs(w - w[0] - np.outer(traj.ts, speed))))
    assert resid <= 5.0 * budget


def test_two_sided_separation_bound():
    # one-sided sampling bound implies the reverse bound with +1
    budget = 1e-6
    rep = estimate_c0(SHEAR.field, T=20.0, pairs_per_axis=3, budget=budget)
    flow = SHEAR.field.flow()
    times = np.linspace(0.0, 20.0, 201)
    rng = np.random.default_rng(2)
    for _ in range(4):
        c2 = rng.random(2)
        y = rng.random(2)
        s2 = solve(flow.rhs, c2, 20.0, budget).sample(times)
        s1 = solve(flow.rhs, c2 + y, 20.0, budget).sample(times)
        assert float(np.max(s1 - s2)) <= 1.0 + rep.c0_hat + 4.0 * budget


def test_vector_subadditivity_bound():
    budget = 1e-6
    rep = estimate_c0(SHEAR.field, T=20.0, pairs_per_axis=2, budget=budget)
    flow = SHEAR.field.flow()
    sup = SHEAR.field.sup_norm_bound()
    rng = np.random.default_rng(7)
    for _ in range(4):
        sigma, l, t = rng.uniform(0.3, 3.0, size=3)
        c = rng.random(2)
        total = solve(flow.rhs, (sigma + l) * c, (sigma + l) * t, budget).final
        first = solve(flow.rhs, sigma * c, sigma * t, budget).final
        second = solve(flow.rhs, l * c, l * t, budget).final
        defect = total - first - second
        bound = 2.0 * (sup + rep.c0_hat + 1.0) + 6.0 * budget
        assert np.all(defect <= bound)


def test_homogenization_bound_shear():
    # autonomous theorem constant (1 + C0) eps with the proof-backed C0
    c0 = SHEAR.extras["c0_bound"]
    from homoglab.integrate import solve_fast

    for eps in (1e-1, 1e-2):
        traj = solve_fast(SHEAR.field, eps, np.zeros(2), 10.0, 1e-4)
        ref = np.outer(traj.ts, SHEAR.expected)
        err = float(np.max(np.abs(traj.ys - ref)))
        assert err <= (1.0 + c0) * eps * 1.05
