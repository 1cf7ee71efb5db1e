"""Adaptive Simpson quadrature (deterministic, recursion with Richardson)."""

from __future__ import annotations

__all__ = ["adaptive_simpson", "QuadratureError"]


class QuadratureError(RuntimeError):
    """Quadrature failed to reach the requested tolerance."""


def _recurse(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    # the second test is a roundoff floor: once the Richardson difference is
    # at the rounding scale of the panel sums, subdividing cannot help
    if abs(delta) <= 15.0 * tol or abs(delta) <= 4e-16 * (abs(left) + abs(right)):
        return left + right + delta / 15.0
    if depth <= 0:
        raise QuadratureError(
            f"adaptive Simpson did not converge on [{a!r}, {b!r}]"
        )
    half = 0.5 * tol
    return _recurse(f, a, m, fa, flm, fm, left, half, depth - 1) + _recurse(
        f, m, b, fm, frm, fb, right, half, depth - 1
    )


def adaptive_simpson(f, a, b, tol, max_depth=48):
    """Integral of f over [a, b] to absolute tolerance ``tol``."""
    if b == a:
        return 0.0
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    fa = f(a)
    fb = f(b)
    fm = f(0.5 * (a + b))
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _recurse(f, a, b, fa, fm, fb, whole, tol, max_depth)
