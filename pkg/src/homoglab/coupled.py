"""Weakly coupled fast-switching pair with a stiffness-exact scheme.

The change of variables z = a2 u1 + a1 u2, d = u1 - u2 decouples the
system: z is a plain integral of the forcing and d solves a linear
equation with the explicit integrating-factor solution

    d(t) = d(0) e^{-l t/eps}
         + int_0^t e^{-l (t-s)/eps} (f1 - f2)(s/eps) ds,   l = a1 + a2.

Both pieces are evaluated by adaptive quadrature, so the 1/eps stiffness
never enters a time stepper; a naive explicit integrator would need
steps much smaller than eps.
"""

from __future__ import annotations

import math

import numpy as np

from .expr import as_expression, compile_expression
from .integrate import Trajectory
from .quadrature import adaptive_simpson

__all__ = [
    "CoupledSpec",
    "coupled_spec",
    "solve_coupled",
    "explicit_limit",
    "coupled_bound_constant",
]

_PERIOD_TOL = 1e-9
_SUP_GRID = 4096


class CoupledSpec:
    """Switching rates, periodic forcings, initial pair and their averages."""

    def __init__(self, a, f, c):
        a1, a2 = (float(x) for x in a)
        if a1 <= 0 or a2 <= 0:
            raise ValueError("switching rates must be positive")
        self.a1, self.a2 = a1, a2
        exprs = tuple(as_expression(e) for e in f)
        if len(exprs) != 2:
            raise ValueError("exactly two forcing expressions required")
        for e in exprs:
            bad = e.free_vars - {"t"}
            if bad:
                raise ValueError(f"forcing '{e.source}' may only use 't', got {sorted(bad)}")
        self.f1, self.f2 = exprs
        self._g1 = compile_expression(self.f1, ("t",))
        self._g2 = compile_expression(self.f2, ("t",))
        for expr, g in ((self.f1, self._g1), (self.f2, self._g2)):
            if "t" in expr.free_vars:
                dev = max(abs(g(x + 1.0) - g(x)) for x in np.linspace(0.0, 1.0, 97))
                if dev > _PERIOD_TOL:
                    raise ValueError(f"forcing '{expr.source}' is not 1-periodic in t")
        self.c = (float(c[0]), float(c[1]))
        self.fbar1 = adaptive_simpson(self._g1, 0.0, 1.0, 1e-13)
        self.fbar2 = adaptive_simpson(self._g2, 0.0, 1.0, 1e-13)

    @property
    def rate_sum(self):
        return self.a1 + self.a2

    def sup_norms(self):
        grid = np.arange(_SUP_GRID) / _SUP_GRID
        s1 = max(abs(self._g1(x)) for x in grid)
        s2 = max(abs(self._g2(x)) for x in grid)
        return s1, s2


def coupled_spec(a, f, c):
    """Validated :class:`CoupledSpec` (rates > 0, 1-periodic forcings)."""
    return CoupledSpec(a, f, c)


def _fast_antiderivative(g, g_mean, tau, tol):
    """int_0^tau g, using exact whole periods plus Simpson on the remainder."""
    whole = math.floor(tau)
    frac = tau - whole
    out = whole * g_mean
    if frac > 0.0:
        out += adaptive_simpson(g, 0.0, frac, tol)
    return out


def _default_times(eps, T, points):
    """Output grid: uniform on [0, T] plus a geometric cluster resolving
    the eps-scale transient near t = 0."""
    uniform = np.linspace(0.0, T, points)
    tail = eps * np.geomspace(1e-3, min(20.0, T / eps), 40) if T > 0 else []
    times = np.unique(np.concatenate([uniform, tail, [0.0, T]]))
    return times[(times >= 0.0) & (times <= T)]


def solve_coupled(spec, eps, T, budget, *, times=None, points=801):
    """Trajectories of the fast-switching pair, error at most ``budget``.

    States are produced on an output grid (dense near the initial
    transient); derivatives at the nodes come from the original system,
    so the returned Trajectories support Hermite dense output.
    """
    if not 0 < eps <= 1:
        raise ValueError("eps must be in (0, 1]")
    if T <= 0 or budget <= 0:
        raise ValueError("horizon and budget must be positive")
    lam = spec.rate_sum
    if times is None:
        times = _default_times(eps, T, points)
    else:
        times = np.asarray(times, dtype=float)
    g1, g2 = spec._g1, spec._g2
    a1, a2 = spec.a1, spec.a2
    c1, c2 = spec.c

    def g_z(tau):
        return a2 * g1(tau) + a1 * g2(tau)

    def g_d(tau):
        return g1(tau) - g2(tau)

    gz_mean = a2 * spec.fbar1 + a1 * spec.fbar2
    tol_z = budget * lam / 4.0
    tol_d = budget * lam / (4.0 * max(a1, a2))

    zs = np.empty(len(times))
    ds = np.empty(len(times))
    sup_gd = sum(spec.sup_norms())
    for i, t in enumerate(times):
        zs[i] = (c1 * a2 + c2 * a1) + eps * _fast_antiderivative(
            g_z, gz_mean, t / eps, tol_z / max(eps, 1e-300)
        )
        # exponentially weighted convolution; the kernel is dead beyond
        # max(10, log-scaled) multiples of eps/lam, so integrate the live
        # window only
        if t == 0.0:
            conv = 0.0
        else:
            live = 10.0
            if sup_gd > 0.0:
                live = max(live, math.log(max(2.0 * sup_gd * eps / (lam * tol_d), 2.0)))
            r_max = min(t, live * eps / lam)

            def kernel(s, _t=t):
                return math.exp(-lam * (_t - s) / eps) * g_d(s / eps)

            conv = adaptive_simpson(kernel, t - r_max, t, tol_d / 2.0)
        ds[i] = (c1 - c2) * math.exp(-lam * t / eps) + conv

    u1 = (zs + a1 * ds) / lam
    u2 = (zs - a2 * ds) / lam
    du1 = np.array([-(a1 / eps) * (p - q) + g1(t / eps) for p, q, t in zip(u1, u2, times)])
    du2 = np.array([-(a2 / eps) * (q - p) + g2(t / eps) for p, q, t in zip(u1, u2, times)])
    traj1 = Trajectory(times, u1, du1, budget, steps=len(times) - 1, rejected=0)
    traj2 = Trajectory(times, u2, du2, budget, steps=len(times) - 1, rejected=0)
    return traj1, traj2


def explicit_limit(spec, eps, t, i):
    """Closed-form limit m_i(t) (rate-weighted average plus eps transient)."""
    if i not in (1, 2):
        raise ValueError("component index must be 1 or 2")
    lam = spec.rate_sum
    c1, c2 = spec.c
    base = (c1 * spec.a2 + c2 * spec.a1) / lam
    drift = (spec.a2 * spec.fbar1 + spec.a1 * spec.fbar2) / lam
    if i == 1:
        ai, ci, cj = spec.a1, c1, c2
    else:
        ai, cj, ci = spec.a2, c1, c2
    transient = ai * (ci - cj) / lam * math.exp(-lam * t / eps)
    return base + drift * t + transient


def coupled_bound_constant(spec, i):
    """Error constant of the O(eps) bound for component i."""
    if i not in (1, 2):
        raise ValueError("component index must be 1 or 2")
    lam = spec.rate_sum
    s1, s2 = spec.sup_norms()
    ai = spec.a1 if i == 1 else spec.a2
    return (2.0 * spec.a2 * lam + ai) / lam**2 * s1 + (2.0 * spec.a1 * lam + ai) / lam**2 * s2
