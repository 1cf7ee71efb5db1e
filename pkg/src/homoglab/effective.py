"""Effective constants with rigorous a-posteriori error bars.

The long-time-average estimator exploits the deviation bound
|v(tau; c) - (c + fbar tau)| <= 1 + 2||f||_inf, which rearranged at
tau = K gives |v(K; 0)/K - fbar| <= (1 + 2||f||_inf)/K.  Choosing
K = ceil((1 + 2||f||_inf)/tol) pins the error bar at about tol plus the
integrator budget.  For autonomous sign-definite scalar fields the exact
time-of-flight identity t = integral dr/f(r) gives the drift as the
reciprocal cell average of 1/f, computed by adaptive Simpson quadrature
(cheap and accurate to the quadrature tolerance).

Also here: the principal-branch Lambert W (Newton from log(1+x)), the
explicit floor/W modulus-of-continuity bound for the frozen-coefficient
effective drift of multi-scale fields, the implicit-Euler solver for the
effective equation with monotone non-Lipschitz right side, and the
subadditivity / oscillation probes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import FieldKind, FieldSpec
from .integrate import solve
from .quadrature import adaptive_simpson

__all__ = [
    "EffectiveConstant",
    "ResourceError",
    "MonotonicityError",
    "effective_constant",
    "lambert_w",
    "modulus_bound",
    "effective_field",
    "EffectiveFieldMap",
    "EffectiveTrajectory",
    "solve_effective",
    "subadditivity_defect",
    "oscillation",
]

K_CAP = 2_000_000


class ResourceError(RuntimeError):
    """Requested tolerance needs more integration than the configured cap."""


class MonotonicityError(RuntimeError):
    """The supplied effective field is not non-increasing in u."""


@dataclass(frozen=True)
class EffectiveConstant:
    """Effective drift estimate with a rigorous a-posteriori error bar."""

    value: object  # float (scalar) or ndarray (rotation vector)
    error_bar: object
    horizon: int  # averaging horizon K (0 for the quadrature method)
    method: str  # "long-time-average" | "harmonic-mean"
    rigorous: bool = True  # False when the bar rests on a sampled C0

    def __float__(self):
        return float(self.value)


def _as_flow(field):
    if isinstance(field, FieldSpec):
        return field.flow()
    return field


def effective_constant(field, tol, *, budget=None, method="auto", k_cap=K_CAP,
                       avg_tol=None):
    """Effective drift of a scalar single-scale (or quasi-periodic) field.

    ``method`` is "auto", "long-time-average" or "harmonic-mean"; auto
    picks the quadrature shortcut for autonomous sign-definite fields and
    the long-time average otherwise.  The error bar of the long-time
    average is (1 + 2||f||_inf)/K + budget/K; the quadrature path is
    accurate to tol by construction.  ``avg_tol`` loosens the tolerance
    of the long-time-average branch only (performance knob for callers
    that mix both branches; the returned error bar stays honest).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    flow = _as_flow(field)
    if flow.dim != 1:
        raise ValueError("effective_constant handles scalar fields; use rotation_vector")
    sup = float(np.max(flow.sup_bound))

    sign_definite = False
    if flow.autonomous and flow.cell_fn is not None:
        samples = [flow.cell_fn(j / 512.0) for j in range(512)]
        lo, hi = min(samples), max(samples)
        sign_definite = lo > 0.0 or hi < 0.0

    if method not in ("auto", "long-time-average", "harmonic-mean"):
        raise ValueError(f"unknown method {method!r}")
    if method == "harmonic-mean" and not sign_definite:
        raise ValueError("harmonic-mean method needs an autonomous sign-definite field")

    if sign_definite and method in ("auto", "harmonic-mean"):
        cell = flow.cell_fn
        q_tol = tol / max(1.0, sup * sup)
        integral = adaptive_simpson(lambda r: 1.0 / cell(r), 0.0, 1.0, q_tol)
        return EffectiveConstant(1.0 / integral, tol, 0, "harmonic-mean")

    slow_tol = tol if avg_tol is None else max(tol, avg_tol)
    K = int(math.ceil((1.0 + 2.0 * sup) / slow_tol))
    if K > k_cap:
        hint = " (the harmonic-mean method applies here)" if sign_definite else ""
        raise ResourceError(
            f"averaging horizon K={K} exceeds the cap {k_cap}; relax tol{hint}"
        )
    if budget is None:
        budget = slow_tol * K / 10.0
    traveling = getattr(field, "traveling", None) if isinstance(field, FieldSpec) else None
    if traveling is not None:
        # integrate the autonomous co-moving phase w = v + alpha tau
        fc = field.component_callable(0)
        rhs = lambda tau, w, _f=fc, _a=traveling: _f(w, 0.0) + _a  # noqa: E731
        final = solve(rhs, 0.0, float(K), budget).final - traveling * K
    else:
        final = solve(flow.rhs, 0.0, float(K), budget).final
    value = final / K
    bar = (1.0 + 2.0 * sup) / K + budget / K
    return EffectiveConstant(value, bar, K, "long-time-average")


def lambert_w(x):
    """Principal-branch Lambert W on [0, inf), Newton from log(1+x).

    Satisfies |W e^W - x| <= 1e-12 * max(1, x).
    """
    x = float(x)
    if x < 0.0:
        raise ValueError("lambert_w is restricted to x >= 0")
    if x == 0.0:
        return 0.0
    w = math.log1p(x)
    target = 1e-13 * max(1.0, x)
    for _ in range(100):
        ew = math.exp(w)
        resid = w * ew - x
        if abs(resid) <= target:
            break
        w -= resid / (ew * (1.0 + w))
    return w


def modulus_bound(kappa, delta):
    """Explicit modulus of continuity for the effective drift.

    Returns 2 / floor(W(1/delta)/kappa), or +inf when the floor vanishes
    (the bound is vacuous at that separation).
    """
    if kappa <= 0 or delta <= 0:
        raise ValueError("kappa and delta must be positive")
    steps = math.floor(lambert_w(1.0 / delta) / kappa)
    if steps < 1:
        return math.inf
    return 2.0 / steps


def effective_field(field, u0, t0, tol, *, budget=None, method="auto", avg_tol=None):
    """Frozen-coefficient effective drift fbar(u0, t0) of a multi-scale field."""
    if field.kind is not FieldKind.MULTI_SCALE:
        raise ValueError("effective_field expects a multi-scale field")
    flow = field.frozen_flow(u0, t0)
    return effective_constant(flow, tol, budget=budget, method=method, avg_tol=avg_tol)


class EffectiveFieldMap:
    """Memoized (u, t) -> fbar(u, t) map for the effective-equation solver.

    Keys are rounded to tol/10 so the memo never injects more error than
    the estimator itself; arguments are clamped to the declared sampling
    box.  Thread note: the memo is a plain dict with last-writer-wins
    semantics; every writer computes the same value within tol.
    """

    def __init__(self, field, tol, *, budget=None, avg_tol=None):
        if field.kind is not FieldKind.MULTI_SCALE:
            raise ValueError("EffectiveFieldMap expects a multi-scale field")
        self.field = field
        self.tolerance = float(tol)
        self._budget = budget
        self._avg_tol = avg_tol
        self._quantum = self.tolerance / 10.0
        self._memo = {}
        self.sup_bound = float(np.max(field.sup_norm_bound()))
        self.evaluations = 0

    def __call__(self, u, t):
        q = self._quantum
        u = min(max(float(u), self.field.u_box[0]), self.field.u_box[1])
        t = min(max(float(t), self.field.t_box[0]), self.field.t_box[1])
        key = (round(u / q), round(t / q))
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        uq = min(max(key[0] * q, self.field.u_box[0]), self.field.u_box[1])
        tq = min(max(key[1] * q, self.field.t_box[0]), self.field.t_box[1])
        ec = effective_field(self.field, uq, tq, self.tolerance,
                             budget=self._budget, avg_tol=self._avg_tol)
        self.evaluations += 1
        value = float(ec.value)
        self._memo[key] = value
        return value


class EffectiveTrajectory:
    """Uniform-grid record of the effective equation solution."""

    def __init__(self, ts, us):
        self.ts = np.asarray(ts, dtype=float)
        self.us = np.asarray(us, dtype=float)

    @property
    def t_end(self):
        return float(self.ts[-1])

    @property
    def final(self):
        return float(self.us[-1])

    def sample(self, tq):
        tq = np.asarray(tq, dtype=float)
        lo, hi = float(self.ts[0]), float(self.ts[-1])
        slack = 1e-9 * max(1.0, hi - lo)
        if np.any(tq < lo - slack) or np.any(tq > hi + slack):
            raise ValueError("query time outside effective trajectory range")
        return np.interp(tq, self.ts, self.us)

    def state(self, t):
        return float(self.sample(np.asarray([float(t)]))[0])


def _fbar_value(fbar, u, t):
    out = fbar(u, t)
    return float(out.value) if isinstance(out, EffectiveConstant) else float(out)


def solve_effective(fbar, c, T, h, *, sup_bound=None, mono_slack=1e-6,
                    mono_check=True):
    """Implicit Euler for du/dt = fbar(u, t) with monotone right side.

    Each step solves u_{k+1} = u_k + h fbar(u_{k+1}, t_{k+1}) by bisection
    on [u_k - h S, u_k + h S] (S a bound on |fbar|); the root is unique
    because u - h fbar(u, t) is strictly increasing for non-increasing
    fbar.  Bracket failure signals a monotonicity violation.
    """
    if h <= 0 or T <= 0:
        raise ValueError("horizon and step must be positive")
    S = sup_bound if sup_bound is not None else getattr(fbar, "sup_bound", None)
    if S is None:
        raise ValueError("solve_effective needs a bound on |fbar| (sup_bound)")
    S = float(S)

    if mono_check:
        probe = [c - 2.0 * S * h, c, c + 2.0 * S * h]
        du = max(1e-3, 0.1 * S * h)
        for u in probe:
            if _fbar_value(fbar, u + du, 0.0) > _fbar_value(fbar, u, 0.0) + mono_slack:
                raise MonotonicityError(
                    f"fbar increases in u near u={u!r}; reject field"
                )

    n_steps = max(1, int(round(T / h)))
    dt = T / n_steps
    pad = 1e-12 * (1.0 + abs(c)) + 1e-15
    ts = np.arange(n_steps + 1) * dt
    us = np.empty(n_steps + 1)
    us[0] = u = float(c)
    for k in range(n_steps):
        t1 = ts[k + 1]
        lo = u - dt * S - pad
        hi = u + dt * S + pad
        g_lo = lo - u - dt * _fbar_value(fbar, lo, t1)
        g_hi = hi - u - dt * _fbar_value(fbar, hi, t1)
        if g_lo > 0.0 or g_hi < 0.0:
            raise MonotonicityError(
                f"implicit step bracket failed at t={t1!r} "
                "(monotonicity violation; reject field)"
            )
        width_tol = 1e-12 * max(1.0, abs(u))
        for _ in range(200):
            if hi - lo <= width_tol:
                break
            mid = 0.5 * (lo + hi)
            if mid - u - dt * _fbar_value(fbar, mid, t1) < 0.0:
                lo = mid
            else:
                hi = mid
        u = 0.5 * (lo + hi)
        us[k + 1] = u
    return EffectiveTrajectory(ts, us)


def subadditivity_defect(field, sigma, l, t, c, budget):
    """v((sigma+l)t; (sigma+l)c) - v(sigma t; sigma c) - v(l t; l c)."""
    if min(sigma, l, t) <= 0:
        raise ValueError("sigma, l, t must be positive")
    flow = _as_flow(field)
    total = solve(flow.rhs, (sigma + l) * c, (sigma + l) * t, budget).final
    first = solve(flow.rhs, sigma * c, sigma * t, budget).final
    second = solve(flow.rhs, l * c, l * t, budget).final
    return total - first - second


def oscillation(field, tau, grid=32, budget=1e-6):
    """(max, min) over a starting-point grid of v(tau; c) - c.

    Periodicity reduces the sup/inf over all of R to one cell [0, 1).
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    if grid < 32:
        raise ValueError("grid must be >= 32")
    flow = _as_flow(field)
    vals = []
    for j in range(grid):
        c = j / grid
        vals.append(solve(flow.rhs, c, tau, budget).final - c)
    return max(vals), min(vals)
