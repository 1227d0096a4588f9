"""Quadrature helpers used by the statistical formulas.

Two workhorses: an adaptive Simpson rule for smooth deterministic integrands
(relative tolerance driven), and fixed Gauss-Legendre panels for integrands
whose values come from Monte Carlo averages, where adaptivity on noisy data
would be meaningless but node placement still matters.
"""

import numpy as np

from .errors import ConvergenceError

_GL_CACHE = {}


def gauss_legendre(a, b, n):
    """Nodes and weights of the ``n``-point Gauss-Legendre rule on [a, b]."""
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    x, w = _GL_CACHE[n]
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def panel_nodes(breakpoints, n_per_panel):
    """Concatenated Gauss-Legendre nodes/weights over consecutive panels."""
    xs, ws = [], []
    for a, b in zip(breakpoints[:-1], breakpoints[1:]):
        x, w = gauss_legendre(a, b, n_per_panel)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def adaptive_simpson(f, a, b, rel_tol=1e-8, abs_tol=0.0, max_depth=40):
    """Adaptive Simpson integral of a scalar function on [a, b].

    The function is evaluated pointwise; the recursion splits any interval
    whose Simpson estimate changes by more than the tolerance when halved.
    Raises ConvergenceError if the depth cap is hit with the tolerance still
    unmet (in practice only for non-integrable inputs).
    """
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_rec(f, a, b, fa, fm, fb, whole, rel_tol, abs_tol, max_depth)


def _simpson_rec(f, a, b, fa, fm, fb, whole, rel_tol, abs_tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    tol = max(abs_tol, rel_tol * abs(left + right))
    if abs(delta) <= 15.0 * tol or (b - a) < 1e-14 * max(1.0, abs(a) + abs(b)):
        return left + right + delta / 15.0
    if depth <= 0:
        raise ConvergenceError(
            f"adaptive Simpson hit depth cap on [{a}, {b}] with residual {delta:.3e}"
        )
    return _simpson_rec(f, a, m, fa, flm, fm, left, rel_tol, abs_tol, depth - 1) + _simpson_rec(
        f, m, b, fm, frm, fb, right, rel_tol, abs_tol, depth - 1
    )


def trapezoid_cumulative(y, x):
    """Cumulative trapezoid integral, starting at 0 at ``x[0]``."""
    out = np.zeros_like(np.asarray(y, dtype=float))
    dx = np.diff(x)
    out[1:] = np.cumsum(0.5 * dx * (y[1:] + y[:-1]))
    return out
