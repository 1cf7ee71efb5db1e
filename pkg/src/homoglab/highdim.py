"""Higher-dimensional flows: bounded-mean-motion probing, rotation
vectors with error bars, and irrational shear flows with their exact
conjugation to a linear flow.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .effective import EffectiveConstant
from .fields import FieldError, FieldSpec, QuasiPeriodicField, single_scale
from .integrate import solve

__all__ = [
    "BoundedMotionReport",
    "ResonanceError",
    "estimate_c0",
    "rotation_vector",
    "shear_field",
    "ConjugationTheta",
    "conjugation_theta",
]


class ResonanceError(ValueError):
    """A Fourier mode of G is resonant with the frequency (k . xi = 0)."""


@dataclass(frozen=True)
class BoundedMotionReport:
    """Empirical bound for the one-sided trajectory-separation constant.

    Finite sampling can exhibit a large constant but never certify the
    bounded-motion condition, so the report carries the grid and horizon
    that produced it.
    """

    c0_hat: float
    horizon: float
    pairs_per_axis: int
    pair_count: int
    worst_pair: tuple  # (c2, c1) with c1 - c2 in [0, 1]^n
    per_component: np.ndarray
    budget: float


def estimate_c0(field, T, pairs_per_axis=8, budget=1e-6, sample_dt=0.1):
    """Sample max_i, tau, pairs of v_i(tau; c2) - v_i(tau; c1), c1 = c2 + y.

    c2 runs over a grid of [0, 1)^n and the offsets y over a grid of
    [0, 1]^n.  Identical initial states are integrated once (trajectories
    are pure functions of their inputs) and all trajectories are compared
    on a fixed uniform time grid.
    """
    flow = field.flow()
    n = flow.dim
    if n < 2:
        raise ValueError("estimate_c0 expects a field of dimension >= 2")
    if T <= 0:
        raise ValueError("horizon must be positive")
    p = int(pairs_per_axis)
    if p < 2:
        raise ValueError("pairs_per_axis must be >= 2")
    base_axis = np.arange(p) / p
    offset_axis = np.linspace(0.0, 1.0, p)
    bases = [np.array(c) for c in itertools.product(base_axis, repeat=n)]
    offsets = [np.array(y) for y in itertools.product(offset_axis, repeat=n)]
    times = np.linspace(0.0, T, int(round(T / sample_dt)) + 1)

    cache = {}

    def samples(state):
        key = tuple(float(x) for x in state)
        hit = cache.get(key)
        if hit is None:
            hit = solve(flow.rhs, np.array(key), T, budget).sample(times)
            cache[key] = hit
        return hit

    worst = -math.inf
    worst_pair = None
    per_component = np.full(n, -math.inf)
    count = 0
    for c2 in bases:
        s2 = samples(c2)
        for y in offsets:
            c1 = c2 + y
            diff = s2 - samples(c1)
            comp_max = diff.max(axis=0)
            per_component = np.maximum(per_component, comp_max)
            top = float(comp_max.max())
            if top > worst:
                worst = top
                worst_pair = (tuple(c2), tuple(c1))
            count += 1
    return BoundedMotionReport(
        c0_hat=max(worst, 0.0),
        horizon=float(T),
        pairs_per_axis=p,
        pair_count=count,
        worst_pair=worst_pair,
        per_component=per_component,
        budget=float(budget),
    )


def rotation_vector(field, c0, tol, budget=None, *, c0_is_rigorous=True):
    """Rotation vector with per-component error bars.

    Averaging horizon K = ceil(max_i (1 + C0 + 2||f_i||_inf) / tol);
    bars are (1 + C0 + 2||f_i||_inf)/K + budget/K.  The ``rigorous`` flag
    records whether C0 came from a proof-backed bound or from sampling.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    flow = field.flow() if isinstance(field, FieldSpec) else field
    sup = np.asarray(flow.sup_bound, dtype=float)
    K = int(math.ceil(float(np.max(1.0 + c0 + 2.0 * sup)) / tol))
    if budget is None:
        budget = tol * K / 10.0
    traj = solve(flow.rhs, np.zeros(flow.dim), float(K), budget)
    value = traj.final / K
    bars = (1.0 + c0 + 2.0 * sup) / K + budget / K
    return EffectiveConstant(value, bars, K, "long-time-average", rigorous=c0_is_rigorous)


def _mode_phase_expr(k, coeff):
    """Expression text for the real mode pair 2|c| cos(2 pi k.v + phase)."""
    amp = 2.0 * abs(coeff)
    phase = math.atan2(coeff.imag, coeff.real)
    terms = " + ".join(f"{float(ki)!r}*r{i + 1}" for i, ki in enumerate(k) if ki)
    inner = f"2*pi*({terms})"
    if phase != 0.0:
        inner += f" + {phase!r}"
    return f"{amp!r}*cos({inner})"


def shear_field(xi, modes, *, sup=None, grid=64):
    """Autonomous shear field f(v) = xi / G(v) from the modes of G.

    G must be a real (conjugate-symmetric) trigonometric polynomial,
    strictly positive on the torus.
    """
    xi = tuple(float(x) for x in xi)
    n = len(xi)
    if n < 2:
        raise FieldError("shear fields need dimension >= 2")
    # QuasiPeriodicField validates conjugate symmetry and strict positivity
    g = QuasiPeriodicField(frequency=xi, modes=modes)
    if g.min_on_grid(grid) <= 0.0:
        raise FieldError("G must be strictly positive on the torus")
    terms = [repr(g.mean)]
    for k, c in modes.items():
        k = tuple(int(x) for x in k)
        if all(x == 0 for x in k):
            continue
        lead = next(x for x in k if x != 0)
        if lead > 0:
            terms.append(_mode_phase_expr(k, complex(c)))
    g_text = " + ".join(terms)
    components = [f"({x!r}) / ({g_text})" for x in xi]
    return single_scale(*components, sup=sup)


class ConjugationTheta:
    """Corrector theta with D theta . xi = G - mean(G), as an exact finite sum.

    Adding (xi_i / mean G) * theta(v) to each component maps the shear
    trajectories onto the linear flow with speed xi / mean(G); the sup
    bound sum |G_k| / (2 pi |k . xi|) is exact for finite mode sets.
    """

    def __init__(self, terms, sup_bound, g_mean):
        self._terms = tuple(terms)  # (k array, amp, phase)
        self.sup_bound = float(sup_bound)
        self.g_mean = float(g_mean)

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        out = 0.0
        for k, amp, phase in self._terms:
            out += amp * math.cos(2.0 * math.pi * float(np.dot(k, v)) + phase)
        return out

    def values(self, points):
        """theta at an (N, n) array of points (vectorized)."""
        points = np.asarray(points, dtype=float)
        out = np.zeros(points.shape[0])
        for k, amp, phase in self._terms:
            out += amp * np.cos(2.0 * math.pi * (points @ k) + phase)
        return out


def conjugation_theta(modes, xi, k_max=None):
    """Build the corrector from the modes of G and the frequency xi.

    Raises :class:`ResonanceError` when a present nonzero mode satisfies
    k . xi = 0 (the corrector coefficient would blow up).
    """
    xi = np.asarray(xi, dtype=float)
    terms = []
    sup = 0.0
    for k, c in modes.items():
        k = tuple(int(x) for x in k)
        if all(x == 0 for x in k):
            continue
        if k_max is not None and max(abs(x) for x in k) > k_max:
            continue
        c = complex(c)
        if c == 0:
            continue
        dot = float(np.dot(k, xi))
        scale = max(1.0, float(np.sum(np.abs(k))) * float(np.max(np.abs(xi))))
        if abs(dot) <= 1e-12 * scale:
            raise ResonanceError(f"mode k={k} is resonant with xi (k . xi = 0)")
        sup += abs(c) / (2.0 * math.pi * abs(dot))
        lead = next(x for x in k if x != 0)
        if lead <= 0:
            continue
        # a_k = c / (2 pi i (k . xi)); the pair (k, -k) contributes
        # 2 |a_k| cos(2 pi k.v + arg a_k)
        a = c / (2.0j * math.pi * dot)
        terms.append((np.array(k, dtype=float), 2.0 * abs(a), math.atan2(a.imag, a.real)))
    g_mean = float(complex(modes.get(tuple([0] * len(xi)), 0.0)).real)
    return ConjugationTheta(terms, sup, g_mean)
