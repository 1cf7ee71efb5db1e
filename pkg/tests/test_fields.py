import math

import numpy as np
import pytest

from homoglab.fields import (
    FieldError,
    FieldKind,
    QuasiPeriodicField,
    catalog,
    catalog_names,
    estimate_lipschitz,
    estimate_sup_norm,
    multi_scale,
    quasi_periodic,
    single_scale,
)

TWO_PI = 2.0 * math.pi


def test_catalog_names_and_unknown():
    assert set(catalog_names()) == {
        "harmonic",
        "sharpness",
        "qp-cosine",
        "shear-golden",
        "wiggly-gradient",
        "free-boundary",
    }
    with pytest.raises(FieldError, match="harmonic"):
        catalog("nope")


def test_every_catalog_field_validates():
    for name in catalog_names():
        entry = catalog(name)
        assert entry.field.dimension >= 1


def test_sharpness_expected_constant():
    entry = catalog("sharpness")
    assert entry.expected == -1.0
    assert entry.field.declared_sup == (1.0,)


def test_lipschitz_estimates():
    sine = single_scale("sin(2*pi*r)")
    est = estimate_lipschitz(sine, grid_per_axis=64)
    assert est.sampled == pytest.approx(TWO_PI, rel=0.05)
    const = single_scale("3")
    assert float(estimate_lipschitz(const)) == 0.0
    tri_field = single_scale("tri(r + tau) - 1")
    est = estimate_lipschitz(tri_field, grid_per_axis=64)
    assert est.sampled == pytest.approx(1.0, rel=0.05)


def test_lipschitz_declared_override_reports_sample():
    entry = catalog("harmonic")
    est = estimate_lipschitz(entry.field, grid_per_axis=64)
    assert est.declared
    assert float(est) == TWO_PI
    assert est.sampled == pytest.approx(TWO_PI, rel=0.05)


def test_sup_norm_estimates():
    harmonic = single_scale("2 + sin(2*pi*r)")
    assert float(np.max(estimate_sup_norm(harmonic).sampled)) == pytest.approx(3.0, abs=1e-12)
    zero = single_scale("0")
    assert float(np.max(estimate_sup_norm(zero).sampled)) == 0.0
    tri_field = single_scale("tri(r + tau) - 1")
    assert float(np.max(estimate_sup_norm(tri_field).sampled)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize(
    "name",
    ["harmonic", "sharpness", "shear-golden", "wiggly-gradient", "free-boundary"],
)
def test_sup_norm_monotone_under_grid_refinement(name):
    field = catalog(name).field
    values = [float(np.max(field.sup_norm_estimate(g))) for g in (16, 32, 64)]
    assert values[0] <= values[1] + 1e-15 <= values[2] + 2e-15


def test_qp_sup_norm_monotone():
    qp = catalog("qp-cosine").field
    values = [float(np.max(qp.sup_norm_estimate(g))) for g in (32, 64, 128)]
    assert values[0] <= values[1] + 1e-15 <= values[2] + 2e-15


def test_single_scale_rejects_non_periodic():
    with pytest.raises(FieldError, match="periodic"):
        single_scale("r")


def test_single_scale_rejects_wrong_vars():
    with pytest.raises(FieldError):
        single_scale("u + sin(2*pi*r)")


def test_multi_scale_requires_monotone_u():
    with pytest.raises(FieldError, match="non-increasing"):
        multi_scale("u + sin(2*pi*r)*0.01")
    # non-increasing passes
    multi_scale("-u*0.1 + sin(2*pi*r)", u_box=(-2.0, 2.0))


def test_multi_scale_box_validation():
    field = catalog("free-boundary").field
    assert field.u_box == (0.5, 10.0)
    with pytest.raises(FieldError, match="u box"):
        field.frozen_flow(0.2, 1.0)
    with pytest.raises(FieldError, match="t box"):
        field.frozen_flow(1.0, 99.0)


def test_quasi_periodic_validation():
    with pytest.raises(FieldError, match="conjugate"):
        QuasiPeriodicField(frequency=(1.0, 0.5), modes={(0, 0): 1.0, (1, 0): 0.5})
    with pytest.raises(FieldError, match="positive"):
        QuasiPeriodicField(
            frequency=(1.0,), modes={(0,): 0.5, (1,): 0.5, (-1,): 0.5}
        )
    with pytest.raises(FieldError, match="nonzero"):
        QuasiPeriodicField(frequency=(0.0, 0.0), modes={(0, 0): 1.0})


def test_qp_field_values_and_bounds():
    qp = catalog("qp-cosine").field.qp
    assert qp.mean == 3.0
    assert qp.value((0.0, 0.0)) == pytest.approx(5.0, abs=1e-12)
    assert qp.sup_bound() == pytest.approx(5.0, abs=1e-12)
    f = qp.line_function()
    assert f(0.0) == pytest.approx(5.0, abs=1e-12)
    # imaginary parts cancel: field is real everywhere on a grid
    grid = qp.grid_values(32)
    assert np.all(np.isreal(grid))
    assert float(np.min(grid)) > 0.0


def test_traveling_declaration_validated():
    field = single_scale("tri(r + tau) - 1", traveling=1)
    assert field.traveling == 1
    with pytest.raises(FieldError, match="traveling"):
        single_scale("tri(r) + 0*tau", traveling=1)
    with pytest.raises(FieldError, match="scalar"):
        single_scale("sin(2*pi*r1)", "sin(2*pi*r2)", traveling=1)


def test_wiggly_gradient_structure():
    entry = catalog("wiggly-gradient")
    field = entry.field
    assert field.kind is FieldKind.MULTI_SCALE
    flow = field.frozen_flow(2.0, 0.0)
    assert flow.autonomous
    # frozen at u0 = 2: f(r) = -2 - 0.5 sin(2 pi r), strictly negative
    vals = [flow.cell_fn(j / 64.0) for j in range(64)]
    assert max(vals) < 0.0


def test_shear_field_declared_sup_exact():
    field = catalog("shear-golden").field
    sup = field.sup_norm_bound()
    assert sup[0] == pytest.approx(1.0, abs=1e-12)
    assert sup[1] == pytest.approx((1 + math.sqrt(5)) / 2, abs=1e-12)


def test_quasi_periodic_wrapper_type():
    qp = catalog("qp-cosine").field.qp
    spec = quasi_periodic(qp)
    assert spec.kind is FieldKind.QUASI_PERIODIC
    assert spec.dimension == 1
    with pytest.raises(FieldError):
        quasi_periodic("not a field")
