"""Scalar root-finding and maximization primitives.

The PV model needs two deterministic numeric helpers: a safeguarded
Newton iteration for the implicit diode equation and a golden-section
maximizer for the unimodal power-voltage curve.
"""

from __future__ import annotations

import math
from typing import Callable

from .errors import NonConvergence

# Inverse golden ratio: interval shrink factor per golden-section step.
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def newton_bisect(
    f: Callable[[float], float],
    df: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    f_tol: float,
    x0: float | None = None,
    max_iter: int = 100,
) -> float:
    """Find a root of ``f`` inside ``[lo, hi]``.

    Newton steps are taken whenever they land strictly inside the current
    bracket; otherwise the iteration falls back to bisection, so progress
    is guaranteed for any continuous ``f`` with a sign change on the
    bracket.  Convergence is judged on the residual, not the step size.

    Args:
        f: Residual function.
        df: Derivative of ``f``.
        lo: Lower bracket endpoint.
        hi: Upper bracket endpoint, ``hi > lo``.
        f_tol: Absolute residual tolerance; iteration stops at |f| <= f_tol.
        x0: Optional initial iterate inside the bracket.
        max_iter: Evaluation budget.

    Returns:
        A point where ``|f| <= f_tol``.

    Raises:
        ValueError: if the bracket does not straddle a sign change.
        NonConvergence: if the budget is exhausted first.
    """
    f_lo = f(lo)
    if abs(f_lo) <= f_tol:
        return lo
    f_hi = f(hi)
    if abs(f_hi) <= f_tol:
        return hi
    if (f_lo > 0.0) == (f_hi > 0.0):
        raise ValueError(f"no sign change on bracket [{lo!r}, {hi!r}]")

    x = x0 if x0 is not None and lo < x0 < hi else 0.5 * (lo + hi)
    for _ in range(max_iter):
        f_x = f(x)
        if abs(f_x) <= f_tol:
            return x
        if (f_x > 0.0) == (f_lo > 0.0):
            lo, f_lo = x, f_x
        else:
            hi, f_hi = x, f_x
        d = df(x)
        step_ok = d != 0.0
        if step_ok:
            x_new = x - f_x / d
            step_ok = lo < x_new < hi
        x = x_new if step_ok else 0.5 * (lo + hi)
    raise NonConvergence(
        f"newton_bisect: no root to |f| <= {f_tol:g} within {max_iter} iterations"
    )


def golden_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    x_tol: float,
    max_iter: int = 500,
) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on ``[lo, hi]`` by golden-section search.

    Args:
        f: Objective, unimodal on the interval.
        lo: Lower endpoint.
        hi: Upper endpoint.
        x_tol: Interval-width stopping tolerance.
        max_iter: Evaluation budget guard.

    Returns:
        ``(x, f(x))`` at the located maximum.

    Raises:
        NonConvergence: if the interval cannot be reduced to ``x_tol``
            within the budget.
    """
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    f_c, f_d = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= x_tol:
            x = 0.5 * (a + b)
            return x, f(x)
        if f_c > f_d:
            b, d, f_d = d, c, f_c
            c = b - _INVPHI * (b - a)
            f_c = f(c)
        else:
            a, c, f_c = c, d, f_d
            d = a + _INVPHI * (b - a)
            f_d = f(d)
    raise NonConvergence(
        f"golden_max: interval not reduced to {x_tol:g} within {max_iter} iterations"
    )
