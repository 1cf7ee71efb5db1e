import math
import os

import numpy as np
import pytest
from click.testing import CliRunner

from homoglab.cli import main as cli_main
from homoglab.fields import catalog, multi_scale
from homoglab.harness import (
    coupled_sweep,
    fit_rate,
    run_selftest,
    sweep,
    transport_sweep,
    verify_multiscale,
)
from homoglab import report
from homoglab.coupled import coupled_spec


def test_fit_rate_exact_power_laws():
    fit = fit_rate([(0.1, 0.3), (0.01, 0.03), (0.001, 0.003)])
    assert fit.slope == pytest.approx(1.0, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(3.0), abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    quad = fit_rate([(0.1, 0.1**2), (0.01, 0.01**2), (0.001, 0.001**2)])
    assert quad.slope == pytest.approx(2.0, abs=1e-12)


def test_fit_rate_preconditions():
    with pytest.raises(ValueError):
        fit_rate([(0.1, 0.1), (0.01, 0.01)])
    with pytest.raises(ValueError):
        fit_rate([(0.1, 0.1), (0.01, 0.0), (0.001, 0.001)])
    fit = fit_rate([(0.1, 0.1), (0.01, 0.0), (0.001, 0.001)], floor=1e-8)
    assert fit.floored


def test_sweep_validates_eps_list():
    with pytest.raises(ValueError):
        sweep("harmonic", [0.1, 0.01], 1.0)
    with pytest.raises(ValueError):
        sweep("harmonic", [0.01, 0.03, 0.1], 1.0)


def test_sweep_harmonic_small():
    table = sweep("harmonic", [1e-1, 3e-2, 1e-2], T=5.0)
    assert table.ok
    assert 0.9 <= table.fit.slope <= 1.1
    assert table.rows[0].epsilon == 1e-1
    assert all(r.ratio <= 1.05 for r in table.rows)


def test_sweep_qp_has_no_bound_column():
    table = sweep("qp-cosine", [1e-1, 3e-2, 1e-2], T=5.0)
    assert all(math.isnan(r.theory_bound) for r in table.rows)
    assert table.ok  # no bound rows -> vacuously fine
    assert math.isnan(table.max_ratio)


def test_verify_multiscale_separable_field_reduces_to_single_scale():
    # f = g(r) only: the effective equation is linear drift and both
    # regimes stay O(eps)
    field = multi_scale("2 + sin(2*pi*r)", u_box=(-1.0, 40.0), t_box=(0.0, 20.0))
    rep = verify_multiscale(field, c=0.0, T=4.0, eps_list=[1e-1, 3e-2, 1e-2],
                            tol=1e-5, budget=1e-5)
    assert rep.ok
    for row in rep.rows:
        # sup error stays proportional to eps for the separable field
        assert row.sup_error <= 2.0 * row.epsilon
    assert rep.stability_factor_long <= 2.0


def test_coupled_sweep_table():
    spec = coupled_spec((2.0, 3.0), ("sin(2*pi*t)", "0"), (0.0, 0.0))
    table = coupled_sweep(spec, [1e-1, 3e-2, 1e-2], T=3.0)
    assert table.ok
    assert 0.9 <= table.fit.slope <= 1.1
    assert table.fit.r_squared >= 0.98


def test_transport_sweep_table():
    grid = np.linspace(0.0, 1.0, 64, endpoint=False)
    table = transport_sweep("harmonic", "u", 1.0, grid, 2.0,
                            [1e-1, 3e-2, 1e-2], drift=math.sqrt(3.0))
    assert table.ok
    assert 0.9 <= table.fit.slope <= 1.1


def test_selftest_deterministic():
    a = run_selftest(7)
    b = run_selftest(7)
    assert a.ok and b.ok
    assert a.checks == b.checks
    c = run_selftest(8)
    assert c.ok
    assert c.checks != a.checks  # seeded draws differ


def test_csv_formatting(tmp_path):
    path = tmp_path / "rows.csv"
    report.write_csv(path, ("a", "b"), [(np.float64(0.5), float("nan")),
                                        (1.0, np.int64(3))])
    text = path.read_text()
    assert text == "a,b\n0.5,\n1.0,3\n"


def test_sweep_csv_and_figure(tmp_path):
    table = sweep("harmonic", [1e-1, 3e-2, 1e-2], T=2.0)
    csv_path = str(tmp_path / "out.csv")
    report.write_sweep_csv(table, csv_path)
    png = report.figure_path(csv_path)
    report.sweep_figure(table, png)
    assert os.path.exists(csv_path) and os.path.exists(png)
    header = open(csv_path).readline().strip()
    assert header == "scenario,epsilon,horizon,sup_error,theory_bound,ratio"


def test_cli_scenarios_and_effective():
    runner = CliRunner()
    out = runner.invoke(cli_main, ["scenarios"])
    assert out.exit_code == 0
    assert "harmonic" in out.output
    out = runner.invoke(cli_main, ["effective", "harmonic", "--tol", "1e-6"])
    assert out.exit_code == 0
    assert "1.7320508" in out.output


def test_cli_sweep_writes_outputs(tmp_path):
    runner = CliRunner()
    csv_path = str(tmp_path / "sweep.csv")
    out = runner.invoke(
        cli_main,
        ["sweep", "harmonic", "-e", "0.1", "-e", "0.03", "-e", "0.01",
         "--horizon", "2.0", "--out", csv_path],
    )
    assert out.exit_code == 0, out.output
    assert os.path.exists(csv_path)
    assert os.path.exists(report.figure_path(csv_path))


def test_cli_unknown_scenario_fails():
    runner = CliRunner()
    out = runner.invoke(cli_main, ["sweep", "not-a-scenario"])
    assert out.exit_code != 0


def test_cli_selftest_byte_identical(tmp_path):
    runner = CliRunner()
    d1, d2 = str(tmp_path / "a"), str(tmp_path / "b")
    out1 = runner.invoke(cli_main, ["selftest", "--seed", "3", "--out", d1])
    out2 = runner.invoke(cli_main, ["selftest", "--seed", "3", "--out", d2])
    assert out1.exit_code == 0, out1.output
    assert out2.exit_code == 0
    for name in ("selftest_checks.csv", "selftest_sweeps.csv"):
        b1 = open(os.path.join(d1, name), "rb").read()
        b2 = open(os.path.join(d2, name), "rb").read()
        assert b1 == b2
