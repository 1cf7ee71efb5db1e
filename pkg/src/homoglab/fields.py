"""Oscillatory right-hand sides with declared structure.

A :class:`FieldSpec` wraps one of three field shapes:

* single-scale: f(r, tau) (scalar) or f(r_1..r_n, tau) (vector), 1-periodic
  in every r_i and in tau;
* multi-scale: scalar f(r, tau, u, t), 1-periodic in r and tau and
  non-increasing in u on a declared (u, t) sampling box;
* quasi-periodic: scalar f(r) = F(xi0 * r) for a finite-mode torus
  function F > 0 with a Diophantine frequency vector.

Validation happens in the factory functions; instances are immutable
afterwards and safe to share across threads.  Lipschitz and sup-norm
constants estimated by sampling are lower bounds of the true constants,
so the bounds consumed by theorem checks multiply the estimates by a
safety factor (default 1.05) unless exact values were declared.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .expr import as_expression, compile_expression, compile_vector, evaluate


def evaluate_constant(expr):
    """Value of an expression with no free variables."""
    return float(evaluate(expr, {}))

__all__ = [
    "FieldKind",
    "FieldError",
    "FieldSpec",
    "QuasiPeriodicField",
    "Flow",
    "CatalogEntry",
    "single_scale",
    "multi_scale",
    "quasi_periodic",
    "estimate_lipschitz",
    "estimate_sup_norm",
    "catalog",
    "catalog_names",
    "GOLDEN",
]

PERIODICITY_TOL = 1e-9
MONOTONE_TOL = 1e-9
SAFETY_FACTOR = 1.05
GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0

_VALIDATION_SEED = 20260811


class FieldError(ValueError):
    """Field construction or validation failure."""


class FieldKind(enum.Enum):
    SINGLE_SCALE = "single-scale"
    MULTI_SCALE = "multi-scale"
    QUASI_PERIODIC = "quasi-periodic"


# ---------------------------------------------------------------------------
# Quasi-periodic fields (finite trigonometric polynomials on the torus)


class QuasiPeriodicField:
    """F on the n-torus given by finitely many Fourier modes, f(r) = F(xi0 r).

    Modes must be conjugate-symmetric (F real) and F must be strictly
    positive; both are checked at construction.  Finite modes make the
    mean value, Sobolev norms and the effective drift exactly computable.
    """

    def __init__(self, frequency, modes, sigma=1.0, c_xi=None):
        self.frequency = tuple(float(x) for x in frequency)
        if not self.frequency or all(x == 0.0 for x in self.frequency):
            raise FieldError("frequency vector must be nonzero")
        n = len(self.frequency)
        items = []
        for k, coeff in modes.items():
            k = tuple(int(ki) for ki in k)
            if len(k) != n:
                raise FieldError(f"mode index {k} does not match torus dimension {n}")
            items.append((k, complex(coeff)))
        items.sort(key=lambda kc: kc[0])
        self._mode_items = tuple(items)
        self.diophantine_index = float(sigma)
        self.diophantine_constant = None if c_xi is None else float(c_xi)
        self._validate_conjugate_symmetry()
        zero = tuple([0] * n)
        c0 = dict(self._mode_items).get(zero, 0.0 + 0.0j)
        self.mean = float(c0.real)
        # canonical half: first nonzero component positive
        half = []
        for k, c in self._mode_items:
            if k == zero:
                continue
            lead = next(x for x in k if x != 0)
            if lead > 0:
                half.append((k, c))
        self._half = tuple(half)
        grid = self.grid_values(32)
        if float(np.min(grid)) <= 0.0:
            raise FieldError("quasi-periodic field must be strictly positive on the torus")

    def _validate_conjugate_symmetry(self):
        table = dict(self._mode_items)
        for k, c in self._mode_items:
            kneg = tuple(-x for x in k)
            mate = table.get(kneg)
            if mate is None or abs(mate - c.conjugate()) > 1e-12 * (1.0 + abs(c)):
                raise FieldError(
                    f"modes are not conjugate-symmetric at k={k} (field would not be real)"
                )

    @property
    def torus_dim(self):
        return len(self.frequency)

    @property
    def modes(self):
        return dict(self._mode_items)

    def value(self, x):
        """F at the torus point x (any real vector; 1-periodic per axis)."""
        x = np.asarray(x, dtype=float)
        out = self.mean
        for k, c in self._half:
            phase = 2.0 * math.pi * float(np.dot(k, x))
            out += 2.0 * (c.real * math.cos(phase) - c.imag * math.sin(phase))
        return out

    def grid_values(self, m):
        """F on the uniform m^n torus grid (vectorized)."""
        n = self.torus_dim
        axes = [np.arange(m) / m for _ in range(n)]
        mesh = np.meshgrid(*axes, indexing="ij")
        out = np.full(mesh[0].shape, self.mean)
        for k, c in self._half:
            phase = np.zeros(mesh[0].shape)
            for ki, ax in zip(k, mesh):
                if ki:
                    phase = phase + ki * ax
            phase *= 2.0 * math.pi
            out = out + 2.0 * (c.real * np.cos(phase) - c.imag * np.sin(phase))
        return out

    def line_function(self):
        """Fast scalar callable r -> F(xi0 r)."""
        terms = []
        for k, c in self._half:
            omega = 2.0 * math.pi * float(np.dot(k, self.frequency))
            amp = 2.0 * abs(c)
            phase = math.atan2(c.imag, c.real)
            terms.append((amp, omega, phase))
        c0 = self.mean
        terms = tuple(terms)
        cos = math.cos

        def f(r, _terms=terms, _c0=c0, _cos=cos):
            s = _c0
            for a, w, p in _terms:
                s += a * _cos(w * r + p)
            return s

        return f

    def sup_bound(self):
        """Exact upper bound on |f|: sum of mode magnitudes."""
        return abs(self.mean) + sum(2.0 * abs(c) for _, c in self._half)

    def lipschitz_bound(self):
        """Exact upper bound on |f'| along the line."""
        return sum(
            2.0 * abs(c) * 2.0 * math.pi * abs(float(np.dot(k, self.frequency)))
            for k, c in self._half
        )

    def min_on_grid(self, m=64):
        return float(np.min(self.grid_values(m)))


# ---------------------------------------------------------------------------
# Flows (internal fast-variable view consumed by the solvers)


@dataclass(frozen=True)
class Flow:
    """Fast-variable vector field v' = rhs(tau, v) with declared bounds."""

    dim: int
    rhs: object  # callable (tau, state) -> state
    sup_bound: np.ndarray  # per-component upper bound on |f_i|
    autonomous: bool
    cell_fn: object = None  # scalar autonomous only: r -> f(r)

    def reversed(self):
        """The time-reversed backward field g(r, s) = -f(r, -s)."""
        orig = self.rhs
        if self.dim == 1:
            rev = lambda s, y, _f=orig: -_f(-s, y)  # noqa: E731
        else:
            rev = lambda s, y, _f=orig: -np.asarray(_f(-s, y))  # noqa: E731
        cell = None
        if self.cell_fn is not None:
            cell = lambda r, _g=self.cell_fn: -_g(r)  # noqa: E731
        return Flow(self.dim, rev, self.sup_bound, self.autonomous, cell)


# ---------------------------------------------------------------------------
# FieldSpec


def _state_vars(dimension):
    if dimension == 1:
        return ("r",)
    return tuple(f"r{i}" for i in range(1, dimension + 1))


class FieldSpec:
    """A validated oscillatory right-hand side; immutable after creation.

    Use the factories :func:`single_scale`, :func:`multi_scale`,
    :func:`quasi_periodic` (or the scenario :func:`catalog`) rather than
    constructing directly.
    """

    def __init__(self, kind, components, *, qp=None, declared_kappa=None,
                 declared_sup=None, u_box=None, t_box=None, arg_names=(),
                 traveling=None):
        self.kind = kind
        self.components = tuple(components)
        self.qp = qp
        self.declared_kappa = declared_kappa
        self.declared_sup = None if declared_sup is None else tuple(float(s) for s in declared_sup)
        self.u_box = u_box
        self.t_box = t_box
        self.arg_names = tuple(arg_names)
        self.traveling = traveling  # integer alpha with f(r, tau) = phi(r + alpha tau)
        if qp is not None:
            self.dimension = 1
        elif kind is FieldKind.MULTI_SCALE:
            self.dimension = 1
        else:
            self.dimension = len(self.components)
        self._compiled = tuple(
            compile_expression(e, self.arg_names) for e in self.components
        )
        self._vectorized = tuple(
            compile_vector(e, self.arg_names) for e in self.components
        )

    # -- evaluation hooks ---------------------------------------------------

    def component_callable(self, i):
        """Compiled scalar callable of component i (positional arg_names)."""
        return self._compiled[i]

    @property
    def is_autonomous(self):
        if self.kind is FieldKind.QUASI_PERIODIC:
            return True
        return all("tau" not in e.free_vars for e in self.components)

    def flow(self):
        """Fast-variable flow v' = f(v, tau) for single-scale / quasi-periodic."""
        if self.kind is FieldKind.MULTI_SCALE:
            raise FieldError("multi-scale fields have no autonomous fast flow; "
                             "use slow_rhs() or frozen_flow()")
        if self.kind is FieldKind.QUASI_PERIODIC:
            line = self.qp.line_function()
            rhs = lambda tau, v, _f=line: _f(v)  # noqa: E731
            sup = np.array([self.qp.sup_bound()])
            return Flow(1, rhs, sup, True, line)
        sup = self.sup_norm_bound()
        if self.dimension == 1:
            fc = self._compiled[0]
            rhs = lambda tau, v, _f=fc: _f(v, tau)  # noqa: E731
            cell = None
            if self.is_autonomous:
                cell = lambda r, _f=fc: _f(r, 0.0)  # noqa: E731
            return Flow(1, rhs, sup, self.is_autonomous, cell)
        comps = self._compiled

        def rhs(tau, y, _fs=comps):
            vals = y.tolist()
            return np.array([f(*vals, tau) for f in _fs])

        return Flow(self.dimension, rhs, sup, self.is_autonomous, None)

    def slow_rhs(self, eps):
        """Direct slow-time right-hand side u' = f(u/eps, t/eps, u, t)."""
        if self.kind is not FieldKind.MULTI_SCALE:
            raise FieldError("slow_rhs is defined for multi-scale fields")
        fc = self._compiled[0]
        inv = 1.0 / eps

        def rhs(t, u, _f=fc, _inv=inv):
            return _f(u * _inv, t * _inv, u, t)

        return rhs

    def frozen_flow(self, u0, t0):
        """Fast flow with the slow arguments frozen at (u0, t0)."""
        if self.kind is not FieldKind.MULTI_SCALE:
            raise FieldError("frozen_flow is defined for multi-scale fields")
        lo, hi = self.u_box
        if not lo <= u0 <= hi:
            raise FieldError(f"u0={u0!r} outside declared u box {self.u_box}")
        lo, hi = self.t_box
        if not lo <= t0 <= hi:
            raise FieldError(f"t0={t0!r} outside declared t box {self.t_box}")
        fc = self._compiled[0]
        rhs = lambda tau, v, _f=fc, _u=float(u0), _t=float(t0): _f(v, tau, _u, _t)  # noqa: E731
        cell = None
        if "tau" not in self.components[0].free_vars:
            cell = lambda r, _f=fc, _u=float(u0), _t=float(t0): _f(r, 0.0, _u, _t)  # noqa: E731
        # sup bound local to the frozen pair, from a grid sample with safety
        fv = self._vectorized[0]
        g = 64
        rr, tt = np.meshgrid(np.arange(g) / g, np.arange(g) / g, indexing="ij")
        vals = np.abs(fv(rr, tt, np.full_like(rr, u0), np.full_like(rr, t0)))
        sup = np.array([float(np.max(vals)) * SAFETY_FACTOR])
        return Flow(1, rhs, sup, cell is not None, cell)

    # -- constant estimation -------------------------------------------------

    def _axes(self, expr, grid):
        """Sampling axes for one component: (name, points, step) per free var."""
        axes = []
        for name in self.arg_names:
            if name not in expr.free_vars:
                continue
            if name == "u":
                lo, hi = self.u_box
                pts = lo + (hi - lo) * np.arange(grid + 1) / grid
                step = (hi - lo) / grid
            elif name == "t":
                lo, hi = self.t_box
                pts = lo + (hi - lo) * np.arange(grid + 1) / grid
                step = (hi - lo) / grid
            else:  # periodic axis, one fundamental cell
                pts = np.arange(grid) / grid
                step = 1.0 / grid
            axes.append((name, pts, step))
        return axes

    def _default_grid(self, requested):
        if requested is not None:
            if requested < 8:
                raise ValueError("grid_per_axis must be >= 8")
            return requested
        nargs = max(len(e.free_vars) for e in self.components) if self.components else 1
        return {1: 64, 2: 64, 3: 24, 4: 12}.get(nargs, 12)

    def sup_norm_estimate(self, grid_per_axis=None):
        """Sampled max |f_i| per component over one fundamental cell."""
        if self.kind is FieldKind.QUASI_PERIODIC:
            m = grid_per_axis or 64
            return np.array([float(np.max(np.abs(self.qp.grid_values(m))))])
        grid = self._default_grid(grid_per_axis)
        out = []
        for expr in self.components:
            axes = self._axes(expr, grid)
            if not axes:  # constant component
                out.append(abs(evaluate_constant(expr)))
                continue
            names = [name for name, _, _ in axes]
            fn = compile_vector(expr, names)
            mesh = np.meshgrid(*[pts for _, pts, _ in axes], indexing="ij")
            out.append(float(np.max(np.abs(fn(*mesh)))))
        return np.array(out)

    def sup_norm_bound(self):
        """Per-component upper bound: declared value or estimate * safety."""
        if self.declared_sup is not None:
            return np.array(self.declared_sup, dtype=float)
        if self.kind is FieldKind.QUASI_PERIODIC:
            return np.array([self.qp.sup_bound()])
        return self.sup_norm_estimate() * SAFETY_FACTOR

    def lipschitz_estimate(self, grid_per_axis=None):
        """Max sampled centered-difference slope over all components and axes."""
        if self.kind is FieldKind.QUASI_PERIODIC:
            return self.qp.lipschitz_bound()
        grid = self._default_grid(grid_per_axis)
        worst = 0.0
        for expr in self.components:
            names = [nm for nm in self.arg_names if nm in expr.free_vars]
            if not names:
                continue
            fn = compile_vector(expr, names)
            axes = self._axes(expr, grid)
            mesh = dict(zip(names, np.meshgrid(*[p for _, p, _ in axes], indexing="ij")))
            for name, _, step in axes:
                hi_args = [mesh[nm] + (step if nm == name else 0.0) for nm in names]
                lo_args = [mesh[nm] - (step if nm == name else 0.0) for nm in names]
                slope = np.max(np.abs(fn(*hi_args) - fn(*lo_args))) / (2.0 * step)
                worst = max(worst, float(slope))
        return worst

    def lipschitz_bound(self):
        if self.declared_kappa is not None:
            return float(self.declared_kappa)
        return self.lipschitz_estimate() * SAFETY_FACTOR


# ---------------------------------------------------------------------------
# Validation helpers


def _sample_bindings(rng, expr, u_box, t_box, n):
    cols = {}
    for name in sorted(expr.free_vars):
        if name == "u" and u_box is not None:
            lo, hi = u_box
            cols[name] = lo + (hi - lo) * rng.random(n)
        elif name == "t" and t_box is not None:
            lo, hi = t_box
            cols[name] = lo + (hi - lo) * rng.random(n)
        else:
            cols[name] = rng.random(n)
    return cols


def _periodic_deviation(expr, var, u_box=None, t_box=None, n=256):
    """Box-aware 1-periodicity deviation (u, t sampled on their boxes)."""
    names = sorted(expr.free_vars)
    fn = compile_vector(expr, names)
    rng = np.random.default_rng(_VALIDATION_SEED)
    cols = _sample_bindings(rng, expr, u_box, t_box, n)
    base = fn(*(cols[nm] for nm in names))
    shifted = fn(*((cols[nm] + 1.0 if nm == var else cols[nm]) for nm in names))
    return float(np.max(np.abs(np.asarray(shifted) - np.asarray(base))))


def _check_periodic_component(expr, periodic_vars, u_box=None, t_box=None):
    for var in periodic_vars:
        if var not in expr.free_vars:
            continue
        dev = _periodic_deviation(expr, var, u_box, t_box)
        if dev > PERIODICITY_TOL:
            raise FieldError(
                f"component '{expr.source}' is not 1-periodic in '{var}' "
                f"(deviation {dev:.3e} > {PERIODICITY_TOL:.0e})"
            )


# ---------------------------------------------------------------------------
# Factories


def single_scale(*components, kappa=None, sup=None, traveling=None):
    """Validated single-scale field f(r, tau) or f(r1..rn, tau).

    ``traveling`` declares the co-moving structure f(r, tau) =
    phi(r + traveling * tau) for a scalar field (integer shift speed);
    the declaration is verified by sampling and lets the solvers
    integrate the autonomous phase w = v + traveling * tau, which keeps
    degenerate kink equilibria numerically absorbing on long horizons.
    """
    exprs = tuple(as_expression(c) for c in components)
    if not exprs:
        raise FieldError("at least one component required")
    n = len(exprs)
    state = _state_vars(n)
    allowed = set(state) | {"tau"}
    for e in exprs:
        bad = e.free_vars - allowed
        if bad:
            raise FieldError(
                f"component '{e.source}' uses {sorted(bad)}; single-scale fields "
                f"of dimension {n} may use {sorted(allowed)}"
            )
        _check_periodic_component(e, list(state) + ["tau"])
    if traveling is not None:
        if n != 1:
            raise FieldError("traveling structure is declared for scalar fields only")
        traveling = int(traveling)
        fn = compile_expression(exprs[0], ("r", "tau"))
        rng = np.random.default_rng(_VALIDATION_SEED + 2)
        for r, tau, s in rng.random((64, 3)):
            if abs(fn(r, tau + s) - fn(r + traveling * s, tau)) > 1e-12:
                raise FieldError(
                    f"component '{exprs[0].source}' does not have the declared "
                    f"traveling structure f(r, tau) = phi(r + {traveling} tau)"
                )
    if sup is not None and np.ndim(sup) == 0:
        sup = (float(sup),) * n
    return FieldSpec(
        FieldKind.SINGLE_SCALE,
        exprs,
        declared_kappa=kappa,
        declared_sup=sup,
        arg_names=state + ("tau",),
        traveling=traveling,
    )


def multi_scale(component, *, u_box=(-10.0, 10.0), t_box=(-10.0, 10.0),
                kappa=None, sup=None, validate_box_margin=0.0):
    """Validated scalar multi-scale field f(r, tau, u, t).

    Periodicity in r, tau and monotonicity in u are checked by sampling
    with (u, t) drawn from the declared boxes.  ``validate_box_margin``
    enlarges the sampled boxes by that fraction during validation for
    callers who want a stricter check than the declared box.
    """
    e = as_expression(component)
    allowed = {"r", "tau", "u", "t"}
    bad = e.free_vars - allowed
    if bad:
        raise FieldError(f"multi-scale component may only use {sorted(allowed)}, got {sorted(bad)}")
    u_box = (float(u_box[0]), float(u_box[1]))
    t_box = (float(t_box[0]), float(t_box[1]))
    if not (u_box[0] < u_box[1] and t_box[0] < t_box[1]):
        raise FieldError("u_box and t_box must be nonempty intervals")

    def _widen(box):
        lo, hi = box
        pad = validate_box_margin * (hi - lo)
        return (lo - pad, hi + pad)

    vu, vt = _widen(u_box), _widen(t_box)
    _check_periodic_component(e, ["r", "tau"], u_box=vu, t_box=vt)
    if "u" in e.free_vars:
        names = sorted(e.free_vars)
        fn = compile_vector(e, names)
        rng = np.random.default_rng(_VALIDATION_SEED + 1)
        cols = _sample_bindings(rng, e, vu, vt, 512)
        du = (vu[1] - vu[0]) / 64.0
        cols["u"] = np.clip(cols["u"], vu[0], vu[1] - du)
        base = fn(*(cols[nm] for nm in names))
        upper = fn(*((cols[nm] + du if nm == "u" else cols[nm]) for nm in names))
        worst = float(np.max(np.asarray(upper) - np.asarray(base)))
        if worst > MONOTONE_TOL:
            raise FieldError(
                f"component '{e.source}' is not non-increasing in u on the box "
                f"(max increase {worst:.3e})"
            )
    if sup is not None and np.ndim(sup) == 0:
        sup = (float(sup),)
    return FieldSpec(
        FieldKind.MULTI_SCALE,
        (e,),
        declared_kappa=kappa,
        declared_sup=sup,
        u_box=u_box,
        t_box=t_box,
        arg_names=("r", "tau", "u", "t"),
    )


def quasi_periodic(qp):
    """FieldSpec wrapper around a validated QuasiPeriodicField."""
    if not isinstance(qp, QuasiPeriodicField):
        raise FieldError("quasi_periodic expects a QuasiPeriodicField")
    return FieldSpec(FieldKind.QUASI_PERIODIC, (), qp=qp, arg_names=())


# ---------------------------------------------------------------------------
# Module-level estimation ops (thin wrappers over the FieldSpec methods)


@dataclass(frozen=True)
class ConstantEstimate:
    """Estimated constant with the raw sample value kept alongside.

    ``value`` honors a declared override when one was given; ``sampled``
    is always the raw grid estimate.
    """

    value: object  # float or ndarray
    sampled: object
    declared: bool

    def __float__(self):
        return float(self.value)


def estimate_lipschitz(field, grid_per_axis=None):
    sampled = field.lipschitz_estimate(grid_per_axis)
    if field.declared_kappa is not None:
        return ConstantEstimate(float(field.declared_kappa), sampled, True)
    return ConstantEstimate(sampled, sampled, False)


def estimate_sup_norm(field, grid_per_axis=None):
    sampled = field.sup_norm_estimate(grid_per_axis)
    if field.declared_sup is not None:
        return ConstantEstimate(np.array(field.declared_sup), sampled, True)
    return ConstantEstimate(sampled, sampled, False)


# ---------------------------------------------------------------------------
# Scenario catalog


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    field: FieldSpec
    expected: object  # known effective constant (float or ndarray) or None
    description: str
    extras: dict


def _build_harmonic():
    field = single_scale("2 + sin(2*pi*r)", kappa=2.0 * math.pi, sup=3.0)
    return CatalogEntry(
        name="harmonic",
        field=field,
        expected=math.sqrt(3.0),
        description="autonomous scalar 2+sin(2 pi r); drift is the harmonic mean sqrt(3)",
        extras={"sharp_bound": True},
    )


def _build_sharpness():
    field = single_scale("tri(r + tau) - 1", kappa=1.0, sup=1.0, traveling=1)
    return CatalogEntry(
        name="sharpness",
        field=field,
        expected=-1.0,
        description="triangle-wave traveling field with drift -1; error ~ eps at "
                    "t = eps |log eps| (rate sharpness witness)",
        extras={"sharp_bound": False},
    )


def _build_qp_cosine():
    qp = QuasiPeriodicField(
        frequency=(1.0, GOLDEN),
        modes={(0, 0): 3.0, (1, 0): 0.5, (-1, 0): 0.5, (0, 1): 0.5, (0, -1): 0.5},
        sigma=1.0,
        c_xi=0.38,
    )
    return CatalogEntry(
        name="qp-cosine",
        field=quasi_periodic(qp),
        expected=None,
        description="quasi-periodic 3 + cos(2 pi xi1) + cos(2 pi xi2) sampled along "
                    "the golden-mean line; mean value 3",
        extras={"mean": 3.0},
    )


_SHEAR_XI = (1.0, GOLDEN)
_SHEAR_MODES = {(0, 0): 2.0 + 0.0j, (1, 1): 0.5 + 0.0j, (-1, -1): 0.5 + 0.0j}


def _build_shear_golden():
    from .highdim import conjugation_theta, shear_field  # local import avoids a cycle

    field = shear_field(_SHEAR_XI, _SHEAR_MODES, sup=(1.0, GOLDEN))
    theta = conjugation_theta(_SHEAR_MODES, _SHEAR_XI)
    mean_g = 2.0
    c0_bound = 1.0 + 2.0 * max(abs(x) for x in _SHEAR_XI) * theta.sup_bound / mean_g
    return CatalogEntry(
        name="shear-golden",
        field=field,
        expected=np.array([0.5, GOLDEN / 2.0]),
        description="irrational shear flow xi/G with golden-mean xi and "
                    "G = 2 + cos(2 pi (v1+v2)); rotation vector xi/mean(G)",
        extras={
            "xi": _SHEAR_XI,
            "modes": dict(_SHEAR_MODES),
            "g_mean": mean_g,
            "theta_sup": theta.sup_bound,
            "c0_bound": c0_bound,
        },
    )


def _build_wiggly_gradient():
    field = multi_scale(
        "-(min(max(u, -5.0), 5.0)) - 0.5*sin(2*pi*r)",
        u_box=(-10.0, 10.0),
        t_box=(-10.0, 10.0),
        kappa=math.pi,
        sup=5.5,
    )
    return CatalogEntry(
        name="wiggly-gradient",
        field=field,
        expected=None,
        description="gradient descent on a wiggly slope: smooth drive u clamped to "
                    "[-5, 5] plus oscillatory force; effective drift is "
                    "-sign(u) sqrt(max(u^2 - 1/4, 0)) with a sticking zone |u| <= 1/2",
        extras={"clamp": 5.0, "sticking_halfwidth": 0.5},
    )


def _build_free_boundary():
    field = multi_scale(
        "(2 + sin(2*pi*r)*cos(2*pi*tau)) / u",
        u_box=(0.5, 10.0),
        t_box=(0.0, 10.0),
        sup=6.0,
    )
    return CatalogEntry(
        name="free-boundary",
        field=field,
        expected=None,
        description="one-dimensional moving-front model g(r, tau)/u on u >= 1/2",
        extras={},
    )


_CATALOG_BUILDERS = {
    "harmonic": _build_harmonic,
    "sharpness": _build_sharpness,
    "qp-cosine": _build_qp_cosine,
    "shear-golden": _build_shear_golden,
    "wiggly-gradient": _build_wiggly_gradient,
    "free-boundary": _build_free_boundary,
}


def catalog_names():
    return sorted(_CATALOG_BUILDERS)


def catalog(name):
    """Return the named scenario as a validated CatalogEntry."""
    try:
        builder = _CATALOG_BUILDERS[name]
    except KeyError:
        raise FieldError(
            f"unknown scenario '{name}'; available: {', '.join(catalog_names())}"
        ) from None
    return builder()
