"""Sweep orchestration: per-epsilon supremum errors against theorem
bounds, log-log rate fits, the multi-scale two-regime verification, and
the deterministic self-test suite behind ``homoglab selftest``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from . import coupled as coupled_mod
from . import transport as transport_mod
from .effective import EffectiveFieldMap, effective_constant, lambert_w, \
    oscillation, solve_effective, subadditivity_defect
from .fields import CatalogEntry, FieldKind, FieldSpec, catalog
from .highdim import conjugation_theta, rotation_vector
from .integrate import solve, solve_fast
from .quasiperiodic import effective_speed, verify_qp_rate

__all__ = [
    "RateFit",
    "SweepRow",
    "SweepTable",
    "fit_rate",
    "sweep",
    "MultiscaleRow",
    "MultiscaleReport",
    "verify_multiscale",
    "coupled_sweep",
    "transport_sweep",
    "SelfTest",
    "run_selftest",
]

DEFAULT_SLACK = 0.05
DEFAULT_EPS = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    count: int
    floored: bool = False


def fit_rate(points, floor=None):
    """Least-squares fit of log(error) against log(eps).

    Zero or negative error values are replaced by ``floor`` (and the fit
    flagged) when a floor is given; otherwise they are an error.
    """
    pts = [(float(e), float(v)) for e, v in points]
    if len(pts) < 3:
        raise ValueError("rate fit needs at least 3 points")
    floored = False
    errs = []
    for eps, v in pts:
        if eps <= 0:
            raise ValueError("eps values must be positive")
        if v <= 0:
            if floor is None:
                raise ValueError("error values must be positive (or supply a floor)")
            v = float(floor)
            floored = True
        errs.append(v)
    x = np.log([e for e, _ in pts])
    y = np.log(errs)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return RateFit(float(slope), float(intercept), r2, len(pts), floored)


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    sup_error: float
    theory_bound: float  # nan when the theorem carries no numeric constant
    ratio: float  # sup_error / theory_bound (nan when no bound)


@dataclass(frozen=True)
class SweepTable:
    scenario: str
    horizon: float
    rows: tuple
    fit: RateFit
    slack: float = DEFAULT_SLACK
    meta: dict = dataclass_field(default_factory=dict)

    @property
    def bounded(self):
        """Rows that carry a theorem bound."""
        return [r for r in self.rows if not math.isnan(r.theory_bound)]

    @property
    def max_ratio(self):
        bounded = self.bounded
        return max(r.ratio for r in bounded) if bounded else math.nan

    @property
    def ok(self):
        bounded = self.bounded
        if not bounded:
            return True
        return all(r.ratio <= 1.0 + self.slack for r in bounded)


def _validate_eps(eps_list):
    eps = [float(e) for e in eps_list]
    if len(eps) < 3:
        raise ValueError("sweeps need at least 3 epsilon values")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("epsilon list must be strictly descending")
    if eps[-1] <= 0:
        raise ValueError("epsilon values must be positive")
    return eps


def _resolve_entry(scenario):
    if isinstance(scenario, CatalogEntry):
        return scenario
    if isinstance(scenario, FieldSpec):
        return CatalogEntry("field", scenario, None, "user field", {})
    return catalog(scenario)


def sweep(scenario, eps_list, T, budget=None, *, c=None, slack=DEFAULT_SLACK):
    """Per-epsilon sup-norm homogenization error with the theorem bound.

    ``scenario`` is a catalog name, CatalogEntry or FieldSpec.  The
    supremum runs over the stored trajectory nodes of the fast solve; the
    theory bound column carries the theorem's right-hand side where the
    theorem provides a numeric constant (nan otherwise, e.g. the
    quasi-periodic case whose constant is not computed by the theory).
    """
    eps_list = _validate_eps(eps_list)
    entry = _resolve_entry(scenario)
    field = entry.field
    if budget is None:
        budget = 0.01 * eps_list[-1]

    drift_bar = 0.0
    if field.kind is FieldKind.QUASI_PERIODIC:
        drift = effective_speed(field.qp)
        bound_coeff = math.nan
    elif field.dimension == 1:
        if entry.expected is not None:
            drift = float(entry.expected)
        else:
            ec = effective_constant(field, tol=1e-6)
            drift = float(ec.value)
            drift_bar = float(ec.error_bar)
        sup = float(np.max(field.sup_norm_bound()))
        bound_coeff = 1.0 if field.is_autonomous else 1.0 + 2.0 * sup
    else:
        if entry.expected is None:
            raise ValueError(
                "vector sweeps need a known rotation vector (catalog scenario)"
            )
        drift = np.asarray(entry.expected, dtype=float)
        c0 = entry.extras.get("c0_bound")
        if c0 is None:
            raise ValueError("vector sweeps need a bounded-motion constant in extras")
        sup = field.sup_norm_bound()
        if field.is_autonomous:
            bound_coeff = 1.0 + c0
        else:
            bound_coeff = float(np.max(1.0 + c0 + 2.0 * sup))

    if c is None:
        c = 0.0 if field.dimension == 1 else np.zeros(field.dimension)

    rows = []
    for eps in eps_list:
        traj = solve_fast(field, eps, c, T, budget)
        if field.dimension == 1:
            errs = np.abs(traj.ys - (c + drift * traj.ts))
        else:
            ref = np.asarray(c) + np.outer(traj.ts, drift)
            errs = np.max(np.abs(traj.ys - ref), axis=1)
        sup_err = float(np.max(errs))
        if math.isnan(bound_coeff):
            bound = math.nan
            ratio = math.nan
        else:
            bound = bound_coeff * eps + drift_bar * T
            ratio = sup_err / bound
        rows.append(SweepRow(eps, sup_err, bound, ratio))
    fit = fit_rate([(r.epsilon, r.sup_error) for r in rows], floor=budget)
    return SweepTable(
        scenario=entry.name,
        horizon=float(T),
        rows=tuple(rows),
        fit=fit,
        slack=slack,
        meta={"budget": budget, "drift": drift, "initial": c},
    )


# ---------------------------------------------------------------------------
# Multi-scale two-regime verification (long time vs eps |log eps|)


@dataclass(frozen=True)
class MultiscaleRow:
    epsilon: float
    split_time: float  # eps |log eps|
    long_norm: float  # sup_{t > split} |u_eps - ubar| |log eps| / t
    short_c: float  # sup_{t <= split} |u_eps - ubar| / eps
    short_speed_ok: bool  # |u_eps - ubar| <= 2 ||f|| t * 1.05 + slack below split
    sup_error: float


@dataclass(frozen=True)
class MultiscaleReport:
    scenario: str
    horizon: float
    rows: tuple
    stability_factor_long: float
    stability_factor_short: float
    tol: float

    @property
    def ok(self):
        return (
            self.stability_factor_long <= 2.0
            and self.stability_factor_short <= 2.0
            and all(r.short_speed_ok for r in self.rows)
        )


def verify_multiscale(field_or_entry, c, T, eps_list, tol, budget, *,
                      h=None, avg_tol=None):
    """Two-regime error report for a multi-scale field against its
    effective equation.

    The effective trajectory is built once (it does not depend on eps)
    from the memoized frozen-coefficient drift and implicit Euler with
    step ``h`` (default T/1000, tied to tol).  Per eps the oscillatory
    solution is integrated directly in slow time and compared on its
    stored nodes; the long-time errors are normalized by t/|log eps| and
    the short-time errors by eps, and both normalized constants must be
    stable across eps (the theory provides no numeric constant here).
    """
    entry = _resolve_entry(field_or_entry)
    field = entry.field
    if field.kind is not FieldKind.MULTI_SCALE:
        raise ValueError("verify_multiscale expects a multi-scale field")
    eps_list = _validate_eps(eps_list)
    if h is None:
        h = max(tol * T, T / 1000.0)
    fbar = EffectiveFieldMap(field, tol, avg_tol=avg_tol)
    ubar = solve_effective(fbar, c, T, h, mono_slack=max(1e-6, 3.0 * tol))
    sup_f = float(np.max(field.sup_norm_bound()))
    slack_abs = 2.0 * (budget + h * sup_f) + 2.0 * tol

    rows = []
    for eps in eps_list:
        traj = solve_fast(field, eps, c, T, budget)
        ts = traj.ts
        errs = np.abs(traj.ys - ubar.sample(ts))
        split = eps * abs(math.log(eps))
        log_eps = abs(math.log(eps))
        long_mask = ts > split
        short_mask = (ts > 0) & ~long_mask
        long_norm = (
            float(np.max(errs[long_mask] * log_eps / ts[long_mask]))
            if long_mask.any()
            else 0.0
        )
        short_c = float(np.max(errs[short_mask] / eps)) if short_mask.any() else 0.0
        speed_ok = bool(
            np.all(errs[short_mask] <= 2.0 * sup_f * ts[short_mask] * 1.05 + slack_abs)
        )
        rows.append(MultiscaleRow(eps, split, long_norm, short_c, speed_ok,
                                  float(np.max(errs))))

    longs = [r.long_norm for r in rows]
    shorts = [r.short_c for r in rows if r.short_c > 0]
    fac_long = max(longs) / min(longs) if min(longs) > 0 else math.inf
    fac_short = max(shorts) / min(shorts) if shorts and min(shorts) > 0 else 1.0
    return MultiscaleReport(
        scenario=entry.name,
        horizon=float(T),
        rows=tuple(rows),
        stability_factor_long=fac_long,
        stability_factor_short=fac_short,
        tol=tol,
    )


# ---------------------------------------------------------------------------
# Coupled and transport sweeps (reused by the CLI and the acceptance gate)


def coupled_sweep(spec, eps_list, T, budget=None, *, slack=DEFAULT_SLACK):
    """Max over components of sup_t |u_i - m_i(t)| against the explicit
    per-component error constants."""
    eps_list = _validate_eps(eps_list)
    if budget is None:
        budget = 0.01 * eps_list[-1]
    consts = (coupled_mod.coupled_bound_constant(spec, 1),
              coupled_mod.coupled_bound_constant(spec, 2))
    rows = []
    for eps in eps_list:
        trajs = coupled_mod.solve_coupled(spec, eps, T, budget)
        worst_ratio = 0.0
        worst_err = 0.0
        worst_bound = math.nan
        for i, traj in enumerate(trajs, start=1):
            limits = np.array(
                [coupled_mod.explicit_limit(spec, eps, t, i) for t in traj.ts]
            )
            err = float(np.max(np.abs(traj.ys - limits)))
            bound = consts[i - 1] * eps + budget
            ratio = err / bound
            if ratio >= worst_ratio:
                worst_ratio, worst_err, worst_bound = ratio, err, bound
        rows.append(SweepRow(eps, worst_err, worst_bound, worst_ratio))
    fit = fit_rate([(r.epsilon, r.sup_error) for r in rows], floor=budget)
    return SweepTable("coupled", float(T), tuple(rows), fit, slack,
                      meta={"budget": budget, "constants": consts})


def transport_sweep(field_or_entry, phi, lip_phi, grid, t, eps_list,
                    budget=None, *, drift=None, bound_coeff=None,
                    slack=DEFAULT_SLACK):
    """Sup over the grid of |V_eps - phi(x - drift t)| per epsilon."""
    eps_list = _validate_eps(eps_list)
    entry = _resolve_entry(field_or_entry)
    field = entry.field
    if budget is None:
        budget = 0.01 * eps_list[-1]
    if drift is None:
        if field.kind is FieldKind.QUASI_PERIODIC:
            drift = effective_speed(field.qp)
        elif entry.expected is not None:
            drift = entry.expected
        else:
            drift = float(transport_mod.transport_drift(field, tol=1e-6).value)
    if bound_coeff is None:
        if field.kind is FieldKind.QUASI_PERIODIC:
            bound_coeff = math.nan
        elif field.dimension == 1:
            sup = float(np.max(field.sup_norm_bound()))
            bound_coeff = lip_phi * (1.0 if field.is_autonomous else 1.0 + 2.0 * sup)
        else:
            c0 = entry.extras.get("c0_bound")
            if c0 is None:
                raise ValueError("vector transport sweeps need a c0 bound")
            sup = field.sup_norm_bound()
            if field.is_autonomous:
                bound_coeff = lip_phi * (1.0 + c0)
            else:
                bound_coeff = lip_phi * float(np.max(1.0 + c0 + 2.0 * sup))
    rows = []
    for eps in eps_list:
        problem = transport_mod.transport_problem(field, phi, lip_phi, grid, t, eps)
        result = transport_mod.solve_transport(problem, budget)
        ref = np.array(
            [transport_mod.homogenized_transport(phi, drift, x, t) for x in problem.grid]
        )
        err = float(np.max(np.abs(result.values - ref)))
        if math.isnan(bound_coeff):
            rows.append(SweepRow(eps, err, math.nan, math.nan))
        else:
            bound = bound_coeff * eps + lip_phi * budget
            rows.append(SweepRow(eps, err, bound, err / bound))
    fit = fit_rate([(r.epsilon, r.sup_error) for r in rows], floor=budget)
    return SweepTable(f"transport-{entry.name}", float(t), tuple(rows), fit, slack,
                      meta={"budget": budget, "drift": drift, "lip_phi": lip_phi})


# ---------------------------------------------------------------------------
# Self test (deterministic; used by `homoglab selftest`)


@dataclass
class SelfTest:
    seed: int
    checks: list
    sweeps: list

    def record(self, name, value, bound, ok=None):
        if ok is None:
            ok = value <= bound
        self.checks.append((name, float(value), float(bound), bool(ok)))
        return ok

    @property
    def ok(self):
        return all(ok for _, _, _, ok in self.checks)


def run_selftest(seed=0):
    """Curated deterministic property suite; returns a SelfTest record.

    Uses reduced epsilon lists and horizons so the whole run stays around
    a minute; the full acceptance gate lives in the test suite.
    """
    rng = np.random.default_rng(seed)
    st = SelfTest(seed=seed, checks=[], sweeps=[])
    eps3 = [1e-1, 3e-2, 1e-2]

    # Lambert W residuals
    xs = np.concatenate([[0.0], np.geomspace(1e-6, 1e6, 199)])
    resid = max(abs(lambert_w(x) * math.exp(lambert_w(x)) - x) / max(1.0, x) for x in xs)
    st.record("lambert_w_residual", resid, 1e-12)
    st.record("lambert_w_at_e", abs(lambert_w(math.e) - 1.0), 1e-12)

    # sharp single-scale sweep and the time-dependent variant
    tab = sweep("harmonic", eps3, T=10.0)
    st.sweeps.append(tab)
    st.record("harmonic_max_ratio", tab.max_ratio, 1.0 + tab.slack)
    st.record("harmonic_slope_gap", abs(tab.fit.slope - 1.0), 0.1)
    tab = sweep("sharpness", eps3, T=10.0)
    st.sweeps.append(tab)
    st.record("sharpness_max_ratio", tab.max_ratio, 1.0 + tab.slack)

    # quasi-periodic ratio stability
    entry = catalog("qp-cosine")
    qp_tab = verify_qp_rate(entry.field.qp, eps3, c=0.0, T=10.0, budget=1e-4)
    st.record("qp_ratio_spread", qp_tab.ratio_spread, 2.0)
    st.sweeps.append(
        SweepTable(
            "qp-cosine",
            10.0,
            tuple(SweepRow(r.epsilon, r.sup_error, math.nan, math.nan)
                  for r in qp_tab.rows),
            fit_rate([(r.epsilon, r.sup_error) for r in qp_tab.rows], floor=1e-4),
        )
    )

    # lemma probes on the harmonic scenario, seeded draws
    harmonic = catalog("harmonic").field
    flow = harmonic.flow()
    sup = 3.0
    budget = 1e-6
    worst = -math.inf
    for _ in range(10):
        sigma, l, t = rng.uniform(0.05, 5.0, size=3)
        c0 = rng.uniform(0.0, 1.0)
        defect = subadditivity_defect(harmonic, sigma, l, t, c0, budget)
        worst = max(worst, defect)
    st.record("subadditivity_defect", worst, 2.0 * (sup + 1.0) + 6.0 * budget)
    m_hi, m_lo = oscillation(harmonic, tau=7.0, grid=32, budget=budget)
    st.record("oscillation_width", m_hi - m_lo, 1.0 + 2.0 * budget)
    for _ in range(5):
        tau = rng.uniform(1.0, 50.0)
        c0 = rng.uniform(0.0, 1.0)
        a = solve(flow.rhs, c0 + 1.0, tau, budget).final
        b = solve(flow.rhs, c0, tau, budget).final + 1.0
        st.record(f"translation_equivariance_tau_{tau:.3f}", abs(a - b), 2.0 * budget)

    # coupled closed form and the sinusoidal bound
    spec = coupled_mod.coupled_spec((1.0, 1.0), ("1", "0"), (0.0, 0.0))
    eps = 1e-2
    t1, _ = coupled_mod.solve_coupled(spec, eps, 2.0, budget=1e-10)
    exact = t1.ts / 2.0 + (eps / 4.0) * (1.0 - np.exp(-2.0 * t1.ts / eps))
    st.record("coupled_closed_form", float(np.max(np.abs(t1.ys - exact))), 1e-9)
    sin_spec = coupled_mod.coupled_spec((2.0, 3.0), ("sin(2*pi*t)", "0"), (0.0, 0.0))
    tab = coupled_sweep(sin_spec, eps3, T=5.0)
    st.sweeps.append(tab)
    st.record("coupled_max_ratio", tab.max_ratio, 1.0 + tab.slack)

    # shear rotation vector inside its rigorous bar
    shear = catalog("shear-golden")
    theta = conjugation_theta(shear.extras["modes"], shear.extras["xi"])
    c0b = shear.extras["c0_bound"]
    rv = rotation_vector(shear.field, c0b, tol=5e-2)
    gap = float(np.max(np.abs(np.asarray(rv.value) - shear.expected)))
    st.record("shear_rotation_gap", gap, float(np.max(rv.error_bar)))
    st.record("shear_theta_sup", abs(theta.sup_bound - shear.extras["theta_sup"]), 1e-15)

    # transport, scalar autonomous sharp constant
    grid = np.linspace(0.0, 1.0, 33)
    tab = transport_sweep("harmonic", "u", 1.0, grid, t=2.0, eps_list=eps3,
                          drift=math.sqrt(3.0))
    st.sweeps.append(tab)
    st.record("transport_max_ratio", tab.max_ratio, 1.0 + tab.slack)
    return st
