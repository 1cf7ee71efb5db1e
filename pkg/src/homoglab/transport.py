"""Oscillatory linear transport via backward characteristics.

Characteristics are exact for linear transport; a grid scheme would add
numerical diffusion that an O(eps) verification cannot tolerate.  For
each evaluation point x the backward characteristic

    z'(s) = -f(z/eps, (t - s)/eps),   z(0) = x,   s in [0, t]

is integrated (in rescaled fast time) and the solution value is the
initial datum at the foot point, V(x, t) = phi(z(t)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .effective import EffectiveConstant, effective_constant
from .expr import Expression, as_expression, compile_expression, compile_vector
from .fields import FieldError, FieldKind, SAFETY_FACTOR
from .highdim import rotation_vector
from .integrate import solve

__all__ = [
    "TransportProblem",
    "transport_problem",
    "TransportResult",
    "solve_transport",
    "homogenized_transport",
    "transport_drift",
]


def _phi_vars(dimension):
    if dimension == 1:
        return ("u",)
    return tuple(f"u{i}" for i in range(1, dimension + 1))


class TransportProblem:
    """Initial datum, evaluation grid, time and scale for one transport run."""

    def __init__(self, field, phi, lip_phi, grid, t, eps):
        if field.kind is FieldKind.MULTI_SCALE:
            raise FieldError("transport uses single-scale or quasi-periodic fields")
        self.field = field
        self.phi = as_expression(phi)
        self.lip_phi = float(lip_phi)
        self.t = float(t)
        self.eps = float(eps)
        if self.t <= 0:
            raise ValueError("evaluation time must be positive")
        if not 0 < self.eps <= 1:
            raise ValueError("eps must be in (0, 1]")
        n = field.dimension
        names = _phi_vars(n)
        bad = self.phi.free_vars - set(names)
        if bad:
            raise FieldError(
                f"initial datum may use {list(names)} for dimension {n}, got {sorted(bad)}"
            )
        pts = np.asarray(grid, dtype=float)
        if n == 1:
            pts = pts.reshape(-1)
        elif pts.ndim != 2 or pts.shape[1] != n:
            raise ValueError(f"grid must be an (N, {n}) array of points")
        self.grid = pts
        self._phi_fn = compile_expression(self.phi, names)
        self._check_lipschitz(names)

    def _check_lipschitz(self, names):
        """Sampled per-axis slope of phi on the grid window must not exceed
        the declared constant by more than the safety factor."""
        n = self.field.dimension
        margin = float(np.max(self.field.sup_norm_bound())) * self.t + 1.0
        pts = self.grid.reshape(-1, n) if n > 1 else self.grid.reshape(-1, 1)
        lo = pts.min(axis=0) - margin
        hi = pts.max(axis=0) + margin
        axes = [np.linspace(lo[i], hi[i], 33) for i in range(n)]
        mesh = np.meshgrid(*axes, indexing="ij")
        used = [nm for nm in names if nm in self.phi.free_vars]
        if not used:
            self.lip_sampled = 0.0
            return
        fn = compile_vector(self.phi, used)
        named = dict(zip(names, mesh))
        worst = 0.0
        for i, nm in enumerate(names):
            if nm not in self.phi.free_vars:
                continue
            step = (hi[i] - lo[i]) / 128.0
            up = fn(*[named[m] + (step if m == nm else 0.0) for m in used])
            dn = fn(*[named[m] - (step if m == nm else 0.0) for m in used])
            worst = max(worst, float(np.max(np.abs(up - dn))) / (2.0 * step))
        self.lip_sampled = worst
        if worst > self.lip_phi * SAFETY_FACTOR:
            raise FieldError(
                f"sampled Lipschitz constant {worst:.4f} of the initial datum exceeds "
                f"the declared {self.lip_phi} by more than {SAFETY_FACTOR}x"
            )

    def phi_at(self, x):
        if self.field.dimension == 1:
            return self._phi_fn(float(x))
        return self._phi_fn(*np.asarray(x, dtype=float).tolist())


def transport_problem(field, phi, lip_phi, grid, t, eps):
    return TransportProblem(field, phi, lip_phi, grid, t, eps)


@dataclass(frozen=True)
class TransportResult:
    values: np.ndarray  # V_eps at the grid points
    feet: np.ndarray  # backward-characteristic foot points


def solve_transport(problem, budget):
    """V_eps on the grid by backward characteristics, foot error <= budget."""
    field = problem.field
    flow = field.flow()
    eps = problem.eps
    tf = problem.t / eps
    rhs = flow.rhs
    fast_budget = budget / eps
    feet = []
    values = []
    if getattr(field, "traveling", None) is not None and flow.dim == 1:
        # shifted co-moving phase w = z - alpha s: autonomous backward field
        # -f(w + alpha tf, 0) - alpha with the shift folded into one period
        alpha = field.traveling
        fc = field.component_callable(0)
        shift = alpha * (tf - math.floor(tf))
        back = lambda s, w, _f=fc, _a=alpha, _sh=shift: -_f(w + _sh, 0.0) - _a  # noqa: E731
        for x in problem.grid:
            w_end = solve(back, float(x) / eps, tf, fast_budget).final
            foot = (w_end + alpha * tf) * eps
            feet.append(foot)
            values.append(problem.phi_at(foot))
        return TransportResult(values=np.asarray(values), feet=np.asarray(feet))
    if flow.autonomous:
        back = (lambda s, z, _r=rhs: -_r(0.0, z)) if flow.dim == 1 else (
            lambda s, z, _r=rhs: -np.asarray(_r(0.0, z))
        )
    else:
        back = (lambda s, z, _r=rhs, _tf=tf: -_r(_tf - s, z)) if flow.dim == 1 else (
            lambda s, z, _r=rhs, _tf=tf: -np.asarray(_r(_tf - s, z))
        )
    for x in problem.grid:
        z0 = (float(x) if flow.dim == 1 else np.asarray(x, dtype=float)) / eps
        foot = solve(back, z0, tf, fast_budget).final
        foot = foot * eps
        feet.append(foot)
        values.append(problem.phi_at(foot))
    return TransportResult(values=np.asarray(values), feet=np.asarray(feet))


def homogenized_transport(phi, xi_bar, x, t):
    """phi(x - xi_bar * t) for a scalar or vector drift."""
    if callable(phi) and not isinstance(phi, (str, Expression)):
        if np.ndim(x) == 0:
            return phi(float(x) - float(xi_bar) * t)
        return phi(np.asarray(x) - np.asarray(xi_bar) * t)
    phi = as_expression(phi)
    if np.ndim(x) == 0:
        fn = compile_expression(phi, _phi_vars(1))
        return fn(float(x) - float(xi_bar) * t)
    x = np.asarray(x, dtype=float)
    fn = compile_expression(phi, _phi_vars(len(x)))
    shifted = x - np.asarray(xi_bar, dtype=float) * t
    return fn(*shifted.tolist())


def transport_drift(field, tol, *, c0=None, budget=None):
    """Forward drift xi_bar with V(x, t) ~ phi(x - xi_bar t).

    The backward characteristics follow the time-reversed field
    g(r, s) = -f(r, -s); its rotation number is computed and negated back
    to the forward convention.  Vector fields need a bounded-motion
    constant ``c0`` (proof-backed where available).
    """
    flow = field.flow()
    rev = flow.reversed()
    if flow.dim == 1:
        ec = effective_constant(rev, tol, budget=budget)
        return EffectiveConstant(-ec.value, ec.error_bar, ec.horizon, ec.method,
                                 ec.rigorous)
    if c0 is None:
        raise ValueError("vector transport drift needs a bounded-motion constant c0")
    ec = rotation_vector(rev, c0, tol, budget=budget)
    return EffectiveConstant(-np.asarray(ec.value), ec.error_bar, ec.horizon,
                             ec.method, ec.rigorous)
