import math

import numpy as np
import pytest

from homoglab.effective import effective_constant
from homoglab.fields import GOLDEN, QuasiPeriodicField, catalog
from homoglab.integrate import solve_fast
from homoglab.quadrature import adaptive_simpson
from homoglab.quasiperiodic import (
    check_diophantine,
    effective_speed,
    hs_norm,
    mean_value,
    verify_qp_rate,
)

QP_COSINE = catalog("qp-cosine").field.qp


def test_mean_value_examples():
    assert mean_value(QP_COSINE) == 3.0
    const = QuasiPeriodicField(frequency=(1.0, GOLDEN), modes={(0, 0): 5.0})
    assert mean_value(const) == 5.0


def test_check_diophantine_golden():
    rep = check_diophantine((1.0, GOLDEN), sigma=1.0, k_max=50, c_xi=0.38)
    assert rep.passes
    assert rep.worst_ratio >= 0.38
    assert rep.k_max == 50


def test_check_diophantine_rational_resonance():
    rep = check_diophantine((1.0, 0.5), sigma=1.0, k_max=5)
    assert rep.worst_ratio == 0.0
    assert tuple(sorted(abs(k) for k in rep.worst_k)) == (1, 2)
    assert not rep.passes


def test_check_diophantine_axis_frequency():
    rep = check_diophantine((1.0, 0.0), sigma=1.0, k_max=3)
    assert rep.worst_ratio == 0.0
    assert rep.worst_k[0] == 0
    assert not rep.passes


def test_check_diophantine_bad_args():
    with pytest.raises(ValueError):
        check_diophantine((0.0, 0.0), 1.0, 5)
    with pytest.raises(ValueError):
        check_diophantine((1.0, GOLDEN), 1.0, 0)


def test_hs_norm_examples():
    const = QuasiPeriodicField(frequency=(1.0, GOLDEN), modes={(0, 0): 5.0})
    assert hs_norm(const, 0.0) == 5.0
    assert hs_norm(const, 3.0) == 5.0
    cosine = QuasiPeriodicField(
        frequency=(1.0, GOLDEN), modes={(0, 0): 2.0, (1, 0): 0.5, (-1, 0): 0.5}
    )
    # the pure-cosine part carries two modes of magnitude 1/2
    pure = math.sqrt(hs_norm(cosine, 0.0) ** 2 - 4.0)
    assert pure == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-12)
    # direct finite-sum oracle for qp-cosine at s = 1
    expected = math.sqrt(9.0 + 4.0 * (2.0**1) * 0.25)
    assert hs_norm(QP_COSINE, 1.0) == pytest.approx(expected, abs=1e-12)
    with pytest.raises(ValueError):
        hs_norm(QP_COSINE, -1.0)


def test_effective_speed_periodic_special_case():
    # n = 1, F = 2 + sin(2 pi xi): the drift must match the single-scale
    # harmonic-mean constant sqrt(3), not the arithmetic mean 2
    line = QuasiPeriodicField(
        frequency=(1.0,), modes={(0,): 2.0, (1,): -0.5j, (-1,): 0.5j}
    )
    assert mean_value(line) == 2.0
    speed = effective_speed(line)
    assert speed == pytest.approx(math.sqrt(3.0), abs=1e-10)
    cross = effective_constant(catalog("harmonic").field, 1e-10)
    assert speed == pytest.approx(float(cross.value), abs=1e-8)


def test_effective_speed_against_long_trajectory():
    # independent oracle: rotation number from a long fast solve
    spec = catalog("qp-cosine").field
    traj = solve_fast(spec, 1.0, 0.0, 2000.0, 1e-4)
    rot = traj.final / 2000.0
    assert effective_speed(QP_COSINE) == pytest.approx(rot, abs=5e-3)


def test_jensen_direction():
    # reciprocal mean of 1/F is strictly below the mean of F for non-constant F
    assert effective_speed(QP_COSINE) < mean_value(QP_COSINE)
    const = QuasiPeriodicField(frequency=(1.0, GOLDEN), modes={(0, 0): 2.0})
    assert effective_speed(const) == pytest.approx(2.0, abs=1e-13)


def test_mean_matches_long_line_average():
    # mean value vs the sliding average of f(r) over [0, T], T = 1e3
    f = QP_COSINE.line_function()
    T = 1000.0
    avg = sum(
        adaptive_simpson(f, 100.0 * k, 100.0 * (k + 1), 1e-8) for k in range(10)
    ) / T
    assert abs(avg - mean_value(QP_COSINE)) <= (2.0 * QP_COSINE.sup_bound() + 1.0) / T


def test_verify_qp_rate_constant_field():
    const = QuasiPeriodicField(frequency=(1.0, GOLDEN), modes={(0, 0): 2.0})
    table = verify_qp_rate(const, [1e-1, 3e-2, 1e-2], c=0.0, T=5.0, budget=1e-8)
    for row in table.rows:
        assert row.sup_error <= 1e-8 + 1e-12


def test_verify_qp_rate_golden_cosine():
    table = verify_qp_rate(QP_COSINE, [1e-1, 3e-2, 1e-2], c=0.0, T=10.0, budget=1e-4)
    assert table.ratio_spread <= 2.0
    assert table.max_ratio < 1.0  # empirical constant is comfortably bounded
    assert table.mean == 3.0


def test_arithmetic_mean_reference_is_not_the_drift():
    # against c + mean * t the error stays O(1) as eps shrinks: the flow's
    # drift is the reciprocal mean of 1/F, strictly below the mean value
    spec = catalog("qp-cosine").field
    gap = abs(mean_value(QP_COSINE) - effective_speed(QP_COSINE))
    assert gap > 0.3
    for eps in (1e-1, 1e-2):
        traj = solve_fast(spec, eps, 0.0, 10.0, 1e-4)
        err = float(np.max(np.abs(traj.ys - 3.0 * traj.ts)))
        assert err > 0.9 * gap * 10.0 * 0.5  # O(1), not O(eps)
