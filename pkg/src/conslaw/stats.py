"""Small statistics utilities: empirical CDFs and Kolmogorov-Smirnov distances."""

import numpy as np


def ks_sample_vs_cdf(sample, cdf):
    """KS distance between a sample and a model CDF.

    Parameters
    ----------
    sample : array
        Draws from the candidate distribution.
    cdf : callable
        Vectorized model CDF.

    Returns
    -------
    float
        sup_x |F_n(x) - F(x)| evaluated at the sample points (both one-sided
        gaps are taken, which realizes the sup for a monotone F).
    """
    s = np.sort(np.asarray(sample, dtype=float))
    n = s.size
    f = np.asarray(cdf(s), dtype=float)
    upper = np.max(np.arange(1, n + 1) / n - f)
    lower = np.max(f - np.arange(0, n) / n)
    return float(max(upper, lower))


def ks_two_sample(a, b):
    """Two-sample KS statistic (no p-value, just the distance)."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    both = np.concatenate([a, b])
    both.sort(kind="mergesort")
    fa = np.searchsorted(a, both, side="right") / a.size
    fb = np.searchsorted(b, both, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def cdf_from_density(t, density):
    """Trapezoid CDF of a tabulated density, normalized to end at its mass.

    Returns (cdf_callable, total_mass).  The callable interpolates linearly
    and clamps outside the table.
    """
    t = np.asarray(t, dtype=float)
    density = np.asarray(density, dtype=float)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * np.diff(t) * (density[1:] + density[:-1]))])
    mass = float(cum[-1])

    def cdf(x):
        return np.interp(x, t, cum, left=0.0, right=mass)

    return cdf, mass
