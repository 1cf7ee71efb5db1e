"""Quasi-periodic fields: mean value, Diophantine checks, Sobolev norms
and the uniform-in-time rate verification.

Note on the reference drift.  For the positive quasi-periodic equation
u' = F(xi0 u / eps) the exact time-of-flight identity
t = eps * integral dr / f(r) shows that the solution's asymptotic slope
is the reciprocal torus average of 1/F (``effective_speed`` below), not
the arithmetic mean value of F; the two coincide only for constant F
(Jensen).  The periodic n = 1 special case makes this concrete:
F = 2 + sin(2 pi xi) has mean 2 but drift sqrt(3).  ``mean_value``
returns the k = 0 Fourier coefficient; ``verify_qp_rate`` measures the
O(eps) error against the drift that the flow actually has.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .fields import QuasiPeriodicField, quasi_periodic
from .integrate import solve_fast

__all__ = [
    "DiophantineReport",
    "mean_value",
    "effective_speed",
    "check_diophantine",
    "hs_norm",
    "QpRateRow",
    "QpRateTable",
    "verify_qp_rate",
]


def mean_value(field):
    """Mean value of F: the k = 0 Fourier coefficient (exact)."""
    return float(field.mean)


def effective_speed(field, rel_tol=1e-12, max_grid=2048):
    """Asymptotic drift of u' = F(xi0 u/eps): reciprocal mean of 1/F.

    The torus average of 1/F is computed on doubling uniform grids; for
    the analytic reciprocal of a trig polynomial the grid average
    converges geometrically, so a few doublings reach machine accuracy.
    """
    n = field.torus_dim
    m = 32
    cap = {1: max_grid, 2: max_grid, 3: 256, 4: 64}.get(n, 64)
    prev = None
    while True:
        avg = float(np.mean(1.0 / field.grid_values(m)))
        if prev is not None and abs(avg - prev) <= rel_tol * abs(avg):
            break
        if m >= cap:
            break
        prev = avg
        m *= 2
    return 1.0 / avg


@dataclass(frozen=True)
class DiophantineReport:
    k_max: int
    sigma: float
    worst_k: tuple
    worst_ratio: float
    threshold: float  # C_xi used for the pass verdict (0 = any resonance fails)
    passes: bool


def check_diophantine(xi, sigma, k_max, c_xi=None):
    """Exhaustive small-denominator scan over 0 < |k|_inf <= k_max.

    Reports min |xi . k| * |k|^sigma; a finite scan can only falsify a
    Diophantine condition, never prove it, so the report carries the grid
    that produced it.
    """
    xi = np.asarray(xi, dtype=float)
    if np.all(xi == 0.0):
        raise ValueError("xi must be nonzero")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    n = len(xi)
    count = (2 * k_max + 1) ** n
    if count > 5_000_000:
        raise ValueError("scan too large; reduce k_max or the dimension")
    ks = np.array(list(itertools.product(range(-k_max, k_max + 1), repeat=n)))
    ks = ks[np.any(ks != 0, axis=1)]
    dots = np.abs(ks @ xi)
    norms = np.sqrt(np.sum(ks.astype(float) ** 2, axis=1))
    ratios = dots * norms**sigma
    worst = float(np.min(ratios))
    near = np.nonzero(ratios <= worst + 1e-15 * (1.0 + worst))[0]
    # deterministic tie break: smallest norm, then lexicographic
    best = min(near, key=lambda i: (norms[i], tuple(ks[i])))
    threshold = 0.0 if c_xi is None else float(c_xi)
    passes = worst >= threshold if c_xi is not None else worst > 0.0
    return DiophantineReport(
        k_max=k_max,
        sigma=float(sigma),
        worst_k=tuple(int(x) for x in ks[best]),
        worst_ratio=worst,
        threshold=threshold,
        passes=bool(passes),
    )


def hs_norm(field, s):
    """Sobolev H^s norm from the finite mode set (exact sum)."""
    if s < 0:
        raise ValueError("s must be >= 0")
    total = 0.0
    for k, c in field.modes.items():
        k2 = float(sum(ki * ki for ki in k))
        total += (1.0 + k2) ** s * abs(c) ** 2
    return math.sqrt(total)


@dataclass(frozen=True)
class QpRateRow:
    epsilon: float
    sup_error: float
    ratio: float  # sup_error / epsilon


@dataclass(frozen=True)
class QpRateTable:
    rows: tuple
    drift: float
    mean: float
    horizon: float

    @property
    def max_ratio(self):
        return max(r.ratio for r in self.rows)

    @property
    def ratio_spread(self):
        ratios = [r.ratio for r in self.rows]
        return max(ratios) / min(ratios)


def verify_qp_rate(field, eps_list, c, T, budget):
    """Per-eps supremum of |u_eps(t; c) - (c + drift * t)| on [0, T].

    ``drift`` is the reciprocal-mean effective speed (see module note);
    the ratio column is sup_error / eps, which Theorem-style uniform
    O(eps) behavior keeps bounded and stable across eps.
    """
    if isinstance(field, QuasiPeriodicField):
        spec = quasi_periodic(field)
        qp = field
    else:
        spec = field
        qp = field.qp
    drift = effective_speed(qp)
    rows = []
    for eps in eps_list:
        traj = solve_fast(spec, eps, c, T, budget)
        errs = np.abs(traj.ys - (c + drift * traj.ts))
        sup = float(np.max(errs))
        rows.append(QpRateRow(epsilon=float(eps), sup_error=sup, ratio=sup / eps))
    return QpRateTable(rows=tuple(rows), drift=drift, mean=qp.mean, horizon=float(T))
