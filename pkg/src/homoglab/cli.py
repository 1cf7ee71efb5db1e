"""Command line interface.

Every subcommand prints a human-readable summary, optionally writes a
CSV (with a companion figure next to it unless --no-plot), and exits
with status 0 exactly when all asserted bounds hold.
"""

from __future__ import annotations

import math
import os
import sys

import click
import numpy as np

from . import config as config_mod
from . import coupled as coupled_mod
from . import report
from . import transport as transport_mod
from .effective import effective_constant
from .fields import FieldKind, catalog, catalog_names
from .harness import (
    coupled_sweep,
    run_selftest,
    sweep as run_sweep,
    transport_sweep,
    verify_multiscale,
)
from .highdim import conjugation_theta, estimate_c0, rotation_vector
from .quasiperiodic import check_diophantine, mean_value, effective_speed, verify_qp_rate

_EPS_DEFAULT = (1e-1, 3e-2, 1e-2)


def _load_scenario(token):
    """Catalog name or config path -> (entry_or_field, cfg dict)."""
    if os.path.exists(token):
        cfg = config_mod.load_config(token)
        return config_mod.field_from_config(cfg), cfg
    return catalog(token), {}


def _finish(ok):
    click.echo("RESULT: " + ("pass" if ok else "FAIL"))
    sys.exit(0 if ok else 1)


def _print_sweep(table):
    click.echo(f"scenario {table.scenario}  horizon {table.horizon:g}")
    for r in table.rows:
        bound = "-" if math.isnan(r.theory_bound) else f"{r.theory_bound:.6e}"
        ratio = "-" if math.isnan(r.ratio) else f"{r.ratio:.4f}"
        click.echo(
            f"  eps={r.epsilon:<9g} sup_error={r.sup_error:.6e} "
            f"bound={bound} ratio={ratio}"
        )
    click.echo(
        f"  fit: slope={table.fit.slope:.4f} intercept={table.fit.intercept:.4f} "
        f"R2={table.fit.r_squared:.5f}"
    )


def _write_sweep_outputs(tables, out, plot):
    if out:
        report.write_sweep_csv(tables, out)
        click.echo(f"wrote {out}")
        if plot:
            png = report.figure_path(out)
            report.sweep_figure(tables, png)
            click.echo(f"wrote {png}")


@click.group()
def main():
    """Numerical laboratory for oscillatory first-order ODEs.

    Scenario arguments accept a catalog name (see `homoglab scenarios`)
    or a TOML config path.  The expression grammar for field components:
    numbers, pi, variables r, r1..r8, tau, u, u1..u8, t, operators
    + - * / and unary minus, functions sin, cos, abs, exp, min, max,
    frac(x) = x - floor(x) and the 1-periodic triangle wave
    tri(x) = |frac(x) - 1/2| (so the catalog's sharpness field is the
    one-liner "tri(r + tau) - 1").
    """


@main.command()
def scenarios():
    """List the scenario catalog."""
    for name in catalog_names():
        entry = catalog(name)
        click.echo(f"{name:16s} {entry.description}")


@main.command()
@click.argument("scenario")
@click.option("--tol", default=1e-4, show_default=True, help="error-bar target")
def effective(scenario, tol):
    """Effective drift with a rigorous error bar."""
    target, _ = _load_scenario(scenario)
    field = target.field if hasattr(target, "field") else target
    if field.kind is FieldKind.QUASI_PERIODIC:
        speed = effective_speed(field.qp)
        click.echo(f"mean value      = {mean_value(field.qp)!r}")
        click.echo(f"effective drift = {speed!r} (reciprocal mean of 1/F, exact quadrature)")
        sys.exit(0)
    ec = effective_constant(field, tol)
    click.echo(f"value     = {float(ec.value)!r}")
    click.echo(f"error_bar = {float(ec.error_bar):.3e}")
    click.echo(f"method    = {ec.method}  horizon K = {ec.horizon}")
    sys.exit(0)


@main.command("sweep")
@click.argument("scenario")
@click.option("--eps", "-e", multiple=True, type=float, help="descending eps list")
@click.option("--horizon", "-T", default=10.0, show_default=True)
@click.option("--budget", default=None, type=float,
              help="integrator budget (default 0.01 * smallest eps)")
@click.option("--out", default=None, type=click.Path(), help="CSV output path")
@click.option("--plot/--no-plot", default=True, show_default=True)
def sweep_cmd(scenario, eps, horizon, budget, out, plot):
    """Homogenization-error sweep against the theorem bound."""
    target, cfg = _load_scenario(scenario)
    params = config_mod.run_params(cfg, eps=list(eps) or list(_EPS_DEFAULT),
                                   horizon=horizon, budget=budget)
    table = run_sweep(target, params["eps"], params["horizon"], params.get("budget"))
    _print_sweep(table)
    _write_sweep_outputs([table], out, plot)
    _finish(table.ok and 0.9 <= table.fit.slope <= 1.1)


@main.command()
@click.argument("scenario", default="wiggly-gradient")
@click.option("--eps", "-e", multiple=True, type=float)
@click.option("--horizon", "-T", default=5.0, show_default=True)
@click.option("--c", default=2.0, show_default=True, help="initial state")
@click.option("--tol", default=1e-3, show_default=True)
@click.option("--budget", default=1e-4, show_default=True)
@click.option("--out", default=None, type=click.Path())
@click.option("--plot/--no-plot", default=True, show_default=True)
def multiscale(scenario, eps, horizon, c, tol, budget, out, plot):
    """Two-regime multi-scale verification (long time vs eps |log eps|)."""
    target, cfg = _load_scenario(scenario)
    params = config_mod.run_params(cfg, eps=list(eps) or list(_EPS_DEFAULT),
                                   horizon=horizon, tol=tol, budget=budget)
    rep = verify_multiscale(target, c, params["horizon"], params["eps"],
                            params["tol"], params["budget"], avg_tol=0.01)
    for r in rep.rows:
        click.echo(
            f"  eps={r.epsilon:<9g} split={r.split_time:.4f} "
            f"long_norm={r.long_norm:.4e} short_C={r.short_c:.4e} "
            f"speed_ok={r.short_speed_ok}"
        )
    click.echo(
        f"  stability factors: long {rep.stability_factor_long:.3f}, "
        f"short {rep.stability_factor_short:.3f} (gate: <= 2)"
    )
    if out:
        report.write_multiscale_csv(rep, out)
        click.echo(f"wrote {out}")
        if plot:
            report.multiscale_figure(rep, report.figure_path(out))
    _finish(rep.ok)


@main.command()
@click.argument("scenario", default="qp-cosine")
@click.option("--eps", "-e", multiple=True, type=float)
@click.option("--horizon", "-T", default=10.0, show_default=True)
@click.option("--budget", default=None, type=float)
@click.option("--out", default=None, type=click.Path())
@click.option("--plot/--no-plot", default=True, show_default=True)
def qp(scenario, eps, horizon, budget, out, plot):
    """Quasi-periodic uniform-in-time rate check."""
    target, cfg = _load_scenario(scenario)
    field = target.field if hasattr(target, "field") else target
    if field.kind is not FieldKind.QUASI_PERIODIC:
        raise click.UsageError("qp expects a quasi-periodic scenario")
    params = config_mod.run_params(cfg, eps=list(eps) or list(_EPS_DEFAULT),
                                   horizon=horizon, budget=budget)
    eps_list = params["eps"]
    budget = params.get("budget") or 0.01 * min(eps_list)
    qp_field = field.qp
    dio = check_diophantine(qp_field.frequency, qp_field.diophantine_index, k_max=50,
                            c_xi=qp_field.diophantine_constant)
    click.echo(
        f"diophantine: worst |xi.k| |k|^sigma = {dio.worst_ratio:.4f} at k={dio.worst_k} "
        f"(k_max={dio.k_max}, passes={dio.passes})"
    )
    table = verify_qp_rate(qp_field, eps_list, c=0.0, T=params["horizon"], budget=budget)
    click.echo(f"mean value {table.mean!r}; effective drift {table.drift!r}")
    for r in table.rows:
        click.echo(f"  eps={r.epsilon:<9g} sup_error={r.sup_error:.6e} ratio={r.ratio:.4f}")
    click.echo(f"  ratio spread {table.ratio_spread:.3f} (gate: <= 2)")
    if out:
        report.write_qp_csv(table, out)
        click.echo(f"wrote {out}")
        if plot:
            report.qp_figure(table, report.figure_path(out))
    _finish(dio.passes and table.ratio_spread <= 2.0)


@main.command()
@click.argument("scenario", default="shear-golden")
@click.option("--eps", "-e", multiple=True, type=float)
@click.option("--horizon", "-T", default=10.0, show_default=True)
@click.option("--tol", default=1e-2, show_default=True, help="rotation-vector bar")
@click.option("--estimate-c0/--no-estimate-c0", "estimate_c0_flag", default=False,
              show_default=True, help="also sample the bounded-motion constant (slow)")
@click.option("--out", default=None, type=click.Path())
@click.option("--plot/--no-plot", default=True, show_default=True)
def shear(scenario, eps, horizon, tol, estimate_c0_flag, out, plot):
    """Shear-flow checks: rotation vector, conjugation residual, sweep."""
    entry, cfg = _load_scenario(scenario)
    if hasattr(entry, "extras") and "modes" in getattr(entry, "extras", {}):
        xi = entry.extras["xi"]
        modes = entry.extras["modes"]
        field = entry.field
    else:
        hp = config_mod.highdim_params(cfg)
        from .highdim import shear_field

        xi = hp["frequency"]
        modes = hp["modes"]
        field = shear_field(xi, modes)
        from .fields import CatalogEntry

        theta0 = conjugation_theta(modes, xi)
        entry = CatalogEntry(
            "shear", field, np.asarray(xi, dtype=float) / theta0.g_mean,
            "config shear field",
            {"xi": xi, "modes": modes, "g_mean": theta0.g_mean,
             "c0_bound": 1.0 + 2.0 * max(abs(x) for x in xi) * theta0.sup_bound / theta0.g_mean},
        )
    theta = conjugation_theta(modes, xi)
    c0_bound = entry.extras["c0_bound"]
    click.echo(f"theta sup bound {theta.sup_bound!r}; C0 bound {c0_bound!r}")
    ok = True
    rv = rotation_vector(field, c0_bound, tol)
    gap = np.abs(np.asarray(rv.value) - np.asarray(entry.expected))
    inside = bool(np.all(gap <= np.asarray(rv.error_bar)))
    ok &= inside
    click.echo(
        f"rotation vector {np.asarray(rv.value)!r} +- {np.asarray(rv.error_bar)!r} "
        f"(K={rv.horizon}, expected inside bar: {inside})"
    )
    # conjugation residual over tau <= 100
    from .integrate import solve

    budget = 1e-6
    flow = field.flow()
    traj = solve(flow.rhs, np.zeros(flow.dim), 100.0, budget)
    speed = np.asarray(xi, dtype=float) / theta.g_mean
    w = traj.ys + np.outer(theta.values(traj.ys), speed)
    resid = float(np.max(np.abs(w - w[0] - np.outer(traj.ts, speed))))
    ok &= resid <= 5.0 * budget
    click.echo(f"linear-flow conjugation residual {resid:.3e} (gate {5.0 * budget:.1e})")
    if estimate_c0_flag:
        hp = config_mod.highdim_params(cfg)
        rep = estimate_c0(field, hp["horizon"], hp["pairs_per_axis"])
        click.echo(
            f"sampled C0 {rep.c0_hat:.4f} over horizon {rep.horizon:g} "
            f"({rep.pair_count} pairs; sampling exhibits, never certifies)"
        )
    eps_list = list(eps) or list(_EPS_DEFAULT)
    table = run_sweep(entry, eps_list, horizon)
    _print_sweep(table)
    ok &= table.ok
    _write_sweep_outputs([table], out, plot)
    _finish(ok)


@main.command("coupled")
@click.argument("config_path", required=False)
@click.option("--eps", "-e", multiple=True, type=float)
@click.option("--horizon", "-T", default=5.0, show_default=True)
@click.option("--out", default=None, type=click.Path())
@click.option("--plot/--no-plot", default=True, show_default=True)
def coupled_cmd(config_path, eps, horizon, out, plot):
    """Fast-switching pair against its explicit limit."""
    if config_path:
        cfg = config_mod.load_config(config_path)
        spec = config_mod.coupled_from_config(cfg)
        params = config_mod.run_params(cfg, eps=list(eps) or list(_EPS_DEFAULT),
                                       horizon=horizon)
    else:
        spec = coupled_mod.coupled_spec((2.0, 3.0), ("sin(2*pi*t)", "0"), (0.0, 0.0))
        params = {"eps": list(eps) or list(_EPS_DEFAULT), "horizon": horizon}
    table = coupled_sweep(spec, params["eps"], params["horizon"])
    _print_sweep(table)
    _write_sweep_outputs([table], out, plot)
    _finish(table.ok and 0.9 <= table.fit.slope <= 1.1)


@main.command("transport")
@click.argument("scenario", default="harmonic")
@click.option("--eps", "-e", multiple=True, type=float)
@click.option("--t", "t_eval", default=2.0, show_default=True, help="evaluation time")
@click.option("--out", default=None, type=click.Path())
@click.option("--plot/--no-plot", default=True, show_default=True)
def transport_cmd(scenario, eps, t_eval, out, plot):
    """Backward-characteristics transport against the translated datum."""
    target, cfg = _load_scenario(scenario)
    field = target.field if hasattr(target, "field") else target
    if cfg.get("transport"):
        tp = config_mod.transport_params(cfg)
        phi, lip_phi, grid = tp["phi"], tp["lip_phi"], tp["grid"]
        t_eval = tp["t"]
        eps_list = list(eps) or tp["eps_list"]
    else:
        if field.dimension == 1:
            phi, lip_phi = "u", 1.0
            grid = np.linspace(0.0, 1.0, 64, endpoint=False)
        else:
            phi, lip_phi = " + ".join(f"u{i+1}" for i in range(field.dimension)), 1.0
            axes = [np.linspace(0.0, 1.0, 16, endpoint=False)] * field.dimension
            mesh = np.meshgrid(*axes, indexing="ij")
            grid = np.stack([m.ravel() for m in mesh], axis=1)
        eps_list = list(eps) or list(_EPS_DEFAULT)
    table = transport_sweep(target, phi, lip_phi, grid, t_eval, eps_list)
    _print_sweep(table)
    if out:
        budget = table.meta["budget"]
        drift = table.meta["drift"]
        runs = []
        for e in eps_list:
            problem = transport_mod.transport_problem(field, phi, lip_phi, grid, t_eval, e)
            result = transport_mod.solve_transport(problem, budget)
            ref = np.array([
                transport_mod.homogenized_transport(phi, drift, x, t_eval)
                for x in problem.grid
            ])
            runs.append((e, problem.grid, result.values, ref))
        report.write_transport_csv(runs, out, field.dimension)
        click.echo(f"wrote {out}")
        if plot:
            report.transport_figure(runs, report.figure_path(out), field.dimension)
    _finish(table.ok)


@main.command()
@click.option("--seed", default=0, show_default=True)
@click.option("--out", default="selftest_out", show_default=True, type=click.Path(),
              help="directory for the deterministic CSV outputs")
def selftest(seed, out):
    """Deterministic property suite; exit 0 iff every bound holds."""
    st = run_selftest(seed)
    os.makedirs(out, exist_ok=True)
    checks_path = os.path.join(out, "selftest_checks.csv")
    report.write_csv(
        checks_path,
        ("check", "value", "bound", "pass"),
        [(name, value, bound, int(ok)) for name, value, bound, ok in st.checks],
    )
    sweeps_path = os.path.join(out, "selftest_sweeps.csv")
    report.write_sweep_csv(st.sweeps, sweeps_path)
    for name, value, bound, ok in st.checks:
        click.echo(f"{'PASS' if ok else 'FAIL'} {name}: {value:.6e} vs {bound:.6e}")
    click.echo(f"wrote {checks_path}")
    click.echo(f"wrote {sweeps_path}")
    _finish(st.ok)


if __name__ == "__main__":
    main()
