"""Excursion-exponential functionals and the closed-form laws built on them.

Everything here evaluates variants of one object: the expectation of
exp(-integral of a convex curvature weight against a Brownian excursion),
multiplied by a deterministic Girsanov factor.  From it come p(t,u), the
density factor f(t), the argmax (generalized Chernoff) density, the
two-sided kernel K(y,z), and the shock jump kernel n(rho-, rho+, t).

Numerical backbone, shared by every improper integral in this module:
the integrand (1 - p(u)) / sqrt(2 pi u^3) is split exactly as
(1 - G) + G (1 - E) with G the Girsanov factor and E the excursion
factor.  The deterministic (1 - G) piece carries the large-|phi'|
cancellation and is integrated adaptively after u = v^2; the Monte Carlo
piece has a nonnegative integrand, shares one excursion ensemble across
all quadrature nodes (common random numbers, Brownian scaling), and is
integrated on Gauss-Legendre panels.  The u -> infinity tail closes
analytically as 2 / sqrt(2 pi U).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, ConfigError, ConvergenceError, DomainError
from .hamiltonian import legendre_derivative_vec
from .paths import sample_excursion_std_batch
from .quadrature import adaptive_simpson, gauss_legendre

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_GIRSANOV_FLOOR = 1e-9  # G below this ends the finite integration range
_U_CAP = 2.0 ** 24

_DEFAULT_MC = {"n_samples": 20_000, "n_steps": 512}


@dataclass(frozen=True)
class ExcursionFunctionalEstimate:
    """Monte Carlo estimate of an excursion exponential functional."""

    mean: float
    std_error: float
    n_samples: int


# -- deterministic Girsanov exponents ---------------------------------------

def _sq_deriv_antiderivative(phi):
    """Antiderivative P of (phi')^2 in base coordinates, or None.

    With phi(x) = s * B(x - c), (phi')^2 = s^2 * B'(x - c)^2, so
    integral of (phi')^2 over [z0, z1] = s^2 (P(z1 - c) - P(z0 - c)).
    """
    f, p = phi.family, phi.params
    if f == "quadratic":
        a2 = p["a"] ** 2
        return lambda x: a2 * x**3 / 3.0
    if f == "quartic":
        a2 = p["a"] ** 2
        return lambda x: a2 * x**7 / 7.0
    if f == "power":
        a2, pe = p["a"] ** 2, p["p"]
        q = 2.0 * pe - 1.0
        return lambda x: a2 * np.sign(x) * np.abs(x) ** q / q
    if f == "cosh":
        a2 = p["a"] ** 2
        return lambda x: a2 * (np.sinh(2.0 * x) / 4.0 - x / 2.0)
    return None


def girsanov_halfint(phi):
    """Callable (z0, z1) -> 0.5 * integral of phi'(z)^2 over [z0, z1]."""
    P = _sq_deriv_antiderivative(phi)
    c, s = phi.shift, phi.scale
    if P is not None:
        return lambda z0, z1: 0.5 * s * s * (P(z1 - c) - P(z0 - c))

    def by_quadrature(z0, z1):
        if z0 == z1:
            return 0.0
        return 0.5 * adaptive_simpson(
            lambda z: float(phi.derivative(z)) ** 2, z0, z1, rel_tol=1e-10)

    return by_quadrature


# -- shared excursion ensembles ---------------------------------------------

_TRAP_CHUNK = 4096


class ExcursionEnsemble:
    """One reusable ensemble of standard excursions on [0,1].

    Common random numbers: every functional evaluated through the same
    ensemble sees the same paths, so integrands built from many intervals
    (via Brownian scaling) vary smoothly across quadrature nodes.
    """

    def __init__(self, seed, n_samples, n_steps):
        self.seed = int(seed)
        self.n_samples = int(n_samples)
        self.n_steps = int(n_steps)
        self.s_grid = np.linspace(0.0, 1.0, self.n_steps + 1)
        self._moments = {}

    def moments(self, max_power):
        """Matrix A[m, k] = integral of s^k e_m(s) ds, trapezoid rule."""
        have = self._moments.get(max_power)
        if have is not None:
            return have
        powers = np.arange(max_power + 1)
        w = np.full(self.n_steps + 1, 1.0 / self.n_steps)
        w[0] = w[-1] = 0.5 / self.n_steps
        basis = self.s_grid[:, None] ** powers[None, :] * w[:, None]
        out = np.empty((self.n_samples, max_power + 1))
        for start in range(0, self.n_samples, _TRAP_CHUNK):
            stop = min(start + _TRAP_CHUNK, self.n_samples)
            e = sample_excursion_std_batch(stop - start, self.n_steps,
                                           self.seed, first_index=start)
            out[start:stop] = e @ basis
        self._moments[max_power] = out
        return out

    def exp_linear_means(self, coeffs, scales):
        """Means and s.e. of exp(-scale * sum_k c_k A_k) per column.

        coeffs: (max_power+1, n_nodes); scales: (n_nodes,).  Used for
        weights polynomial in s.
        """
        A = self.moments(coeffs.shape[0] - 1)
        x = (A @ coeffs) * scales[None, :]
        vals = np.exp(-x)
        mean = vals.mean(axis=0)
        se = vals.std(axis=0, ddof=1) / math.sqrt(self.n_samples)
        return mean, se

    def exp_weighted_means(self, weight_cols, scales):
        """Means and s.e. of exp(-scale * integral w(s) e(s) ds) per column.

        weight_cols: (n_steps+1, n_nodes) of trapezoid-weighted values of
        the curvature along the excursion grid (endpoint rows zeroed by
        the caller: the excursion vanishes there).  Streams over sample
        chunks so only chunk-sized matrices are live.
        """
        n_nodes = weight_cols.shape[1]
        tot = np.zeros(n_nodes)
        tot2 = np.zeros(n_nodes)
        for start in range(0, self.n_samples, _TRAP_CHUNK):
            stop = min(start + _TRAP_CHUNK, self.n_samples)
            e = sample_excursion_std_batch(stop - start, self.n_steps,
                                           self.seed, first_index=start)
            vals = np.exp(-(e @ weight_cols) * scales[None, :])
            tot += vals.sum(axis=0)
            tot2 += (vals * vals).sum(axis=0)
        m = self.n_samples
        mean = tot / m
        var = np.maximum(tot2 / m - mean**2, 0.0) * m / (m - 1)
        return mean, np.sqrt(var / m)


def _second_derivative_weights(phi, z_lo, lengths, s_grid):
    """Trapezoid-weighted curvature columns for intervals [z_lo, z_lo+len].

    Endpoint rows carry zero weight (the excursion is 0 there), which also
    sidesteps boundary singularities of phi''.  Interior singularities are
    a configuration error.
    """
    n = s_grid.size - 1
    w = np.full(n + 1, 1.0 / n)
    w[0] = w[-1] = 0.0
    z = z_lo + s_grid[:, None] * lengths[None, :]
    vals = np.asarray(phi.second_derivative(z), dtype=float)
    vals[0, :] = 0.0
    vals[-1, :] = 0.0
    if not np.all(np.isfinite(vals)):
        raise DomainError("curvature weight is singular inside an excursion "
                          "interval; shift the grid or regularize phi")
    return vals * w[:, None]


def _poly_curvature_coeffs(phi, t, u_nodes):
    """Coefficients c_k(t,u) with phi''(t + u s) = sum_k c_k s^k, or None.

    Exact for the quadratic (constant curvature) and quartic families;
    other families use the generic weighted path.
    """
    f, p = phi.family, phi.params
    s = phi.scale
    if f == "quadratic":
        return np.full((1, u_nodes.size), s * p["a"])
    if f == "quartic":
        b = t - phi.shift
        c = np.empty((3, u_nodes.size))
        c[0] = 3.0 * s * p["a"] * b * b
        c[1] = 6.0 * s * p["a"] * b * u_nodes
        c[2] = 3.0 * s * p["a"] * u_nodes**2
        return c
    return None


# -- public operations -------------------------------------------------------

def excursion_laplace(weight, interval, n_samples, n_steps, seed):
    """E[exp(-integral_y^z weight(u) e(u) du)] over Brownian excursions.

    Brownian scaling maps the interval to [0,1]: the integral equals
    (z-y)^{3/2} * integral_0^1 weight(y + (z-y)s) e_std(s) ds.
    """
    y, z = float(interval[0]), float(interval[1])
    if not (y < z):
        raise ConfigError("interval needs y < z", field="interval")
    ens = ExcursionEnsemble(seed, n_samples, n_steps)
    s_grid = ens.s_grid
    n = n_steps
    w = np.full(n + 1, 1.0 / n)
    w[0] = w[-1] = 0.0
    vals = np.asarray([float(weight(y + (z - y) * s)) for s in s_grid])
    vals[0] = vals[-1] = 0.0
    if not np.all(np.isfinite(vals)):
        raise DomainError("weight is singular inside the excursion interval")
    cols = (vals * w)[:, None]
    scale = np.array([(z - y) ** 1.5])
    mean, se = ens.exp_weighted_means(cols, scale)
    return ExcursionFunctionalEstimate(float(mean[0]), float(se[0]), n_samples)


def p_phi(phi, t, u, n_samples=None, n_steps=None, seed=0):
    """p(t, u): Girsanov factor times the excursion factor on [t, t+u]."""
    if u <= 0:
        raise ConfigError("u must be positive", field="u")
    n_samples = n_samples or _DEFAULT_MC["n_samples"]
    n_steps = n_steps or _DEFAULT_MC["n_steps"]
    A = girsanov_halfint(phi)
    g = math.exp(-A(t, t + u))
    est = excursion_laplace(lambda z: float(phi.second_derivative(z)),
                            (t, t + u), n_samples, n_steps, seed)
    return g * est.mean


def _finite_range(A, t):
    """Smallest power-of-two U with Girsanov factor below the floor."""
    U = 1.0
    while math.exp(-A(t, t + U)) >= _GIRSANOV_FLOOR:
        U *= 2.0
        if U > _U_CAP:
            raise ConvergenceError(
                "Girsanov factor does not decay; phi may not be superlinear")
    return U


def _panel_breaks(v_star, v_hi):
    """Geometric panel edges resolving the scale v_star inside [0, v_hi]."""
    lo = min(v_star / 8.0, v_hi / 4.0)
    breaks = [0.0, lo]
    while breaks[-1] < v_hi:
        breaks.append(min(breaks[-1] * 2.0, v_hi))
    return np.array(breaks)


@dataclass(frozen=True)
class DensityFactor:
    """f(t) together with its decomposition and error estimates."""

    value: float
    drift_term: float
    deterministic_integral: float
    excursion_integral: float
    tail: float
    mc_std_error: float
    u_max: float


def f_phi(phi, t, n_samples=None, n_steps=None, seed=0, rel_tol=1e-8,
          mc_tol=None, ensemble=None, full=False):
    """Density factor f(t) = phi'(t) + integral_0^inf (1 - p(t,u)) / sqrt(2 pi u^3) du.

    Split integration as described in the module docstring.  Passing an
    ExcursionEnsemble shares paths across calls (used by the density and
    kernel builders for smoothness and exact symmetry); mc_tol, when set,
    raises ConvergenceError if the accumulated Monte Carlo standard error
    exceeds it.
    """
    t = float(t)
    n_samples = n_samples or _DEFAULT_MC["n_samples"]
    n_steps = n_steps or _DEFAULT_MC["n_steps"]
    A = girsanov_halfint(phi)
    dphi_t = float(phi.derivative(t))
    U = _finite_range(A, t)
    v_hi = math.sqrt(U)

    # deterministic piece: (1 - G) carries the exact u^{-3/2} cancellation
    # against phi'(t); u = v^2 removes the endpoint singularity
    limit0 = dphi_t * dphi_t / _SQRT_2PI

    def g_det(v):
        if v == 0.0:
            return limit0
        return (2.0 / _SQRT_2PI) * (-math.expm1(-A(t, t + v * v))) / (v * v)

    i_det = adaptive_simpson(g_det, 0.0, v_hi, rel_tol=rel_tol,
                             abs_tol=1e-14 * max(1.0, abs(dphi_t)))

    # Monte Carlo piece: G * (1 - E), all-positive integrand
    if ensemble is None:
        ensemble = ExcursionEnsemble(seed, n_samples, n_steps)
    v_star = min(1.0, math.sqrt(2.0) / (abs(dphi_t) + 1e-12))
    breaks = _panel_breaks(v_star, v_hi)
    v_nodes = []
    v_weights = []
    for a, b in zip(breaks[:-1], breaks[1:]):
        xs, ws = gauss_legendre(a, b, 16)
        v_nodes.append(xs)
        v_weights.append(ws)
    v_nodes = np.concatenate(v_nodes)
    v_weights = np.concatenate(v_weights)
    u_nodes = v_nodes**2

    coeffs = _poly_curvature_coeffs(phi, t, u_nodes)
    scales = u_nodes**1.5
    if coeffs is not None:
        e_mean, e_se = ensemble.exp_linear_means(coeffs, scales)
    else:
        cols = _second_derivative_weights(phi, t, u_nodes, ensemble.s_grid)
        e_mean, e_se = ensemble.exp_weighted_means(cols, scales)

    g_vals = np.array([math.exp(-A(t, t + u)) for u in u_nodes])
    kern = (2.0 / _SQRT_2PI) * v_weights / np.maximum(v_nodes, 1e-300) ** 2
    i_mc = float(np.sum(kern * g_vals * (1.0 - e_mean)))
    mc_se = float(np.sum(kern * g_vals * e_se))

    tail = 2.0 / math.sqrt(2.0 * math.pi * U)
    value = dphi_t + i_det + i_mc + tail
    if mc_tol is not None and mc_se > mc_tol:
        raise ConvergenceError(
            f"Monte Carlo error {mc_se:.2e} above requested {mc_tol:.2e}; "
            "raise n_samples")
    if not full:
        return value
    return DensityFactor(value=value, drift_term=dphi_t,
                         deterministic_integral=i_det,
                         excursion_integral=i_mc, tail=tail,
                         mc_std_error=mc_se, u_max=U)


def j_phi(phi, s, **kw):
    """Derivative of the survival probability of the maximizer location:
    j(s) = -f(s)."""
    return -f_phi(phi, s, **kw)


def chernoff_density(phi, t_grid, n_samples=None, n_steps=None, seed=0,
                     rel_tol=1e-8):
    """Argmax density 0.5 * f(t) * f_reflected(-t) on t_grid.

    One shared excursion ensemble is used for every factor, so for even
    phi the reflected factor reuses the same code path and the density is
    symmetric by construction.  Returns (density, mc_std_error) arrays.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    n_samples = n_samples or _DEFAULT_MC["n_samples"]
    n_steps = n_steps or _DEFAULT_MC["n_steps"]
    ens = ExcursionEnsemble(seed, n_samples, n_steps)
    refl = phi.reflected()

    def factor(fn_phi, s):
        return f_phi(fn_phi, s, seed=seed, ensemble=ens, rel_tol=rel_tol,
                     n_samples=n_samples, n_steps=n_steps, full=True)

    # cache by (which function, argument): for even phi both factors of a
    # symmetric pair resolve to the same entry, making symmetry exact
    cache = {}

    def cached(fn_phi, s):
        key = (fn_phi == phi, round(float(s), 14))
        if key not in cache:
            cache[key] = factor(fn_phi, s)
        return cache[key]

    dens = np.empty(t_grid.size)
    err = np.empty(t_grid.size)
    for i, t in enumerate(t_grid):
        a = cached(phi, t)
        b = cached(refl, -t) if refl != phi else cached(phi, -t)
        dens[i] = 0.5 * a.value * b.value
        err[i] = 0.5 * (abs(a.value) * b.mc_std_error
                        + abs(b.value) * a.mc_std_error)
    return dens, err


def kernel_K(phi, y, z, n_samples=None, n_steps=None, seed=0, ensemble=None):
    """Two-sided kernel K(y, z) for y < z:
    (phi'(z) - phi'(y)) / sqrt(2 pi (z-y)^3) * Girsanov * excursion factor."""
    if not (y < z):
        raise ConfigError("kernel needs y < z", field="y")
    n_samples = n_samples or _DEFAULT_MC["n_samples"]
    n_steps = n_steps or _DEFAULT_MC["n_steps"]
    A = girsanov_halfint(phi)
    pref = (float(phi.derivative(z)) - float(phi.derivative(y))) \
        / math.sqrt(2.0 * math.pi * (z - y) ** 3)
    g = math.exp(-A(y, z))
    if ensemble is None:
        ensemble = ExcursionEnsemble(seed, n_samples, n_steps)
    cols = _second_derivative_weights(phi, y, np.array([z - y]), ensemble.s_grid)
    e_mean, e_se = ensemble.exp_weighted_means(cols, np.array([(z - y) ** 1.5]))
    val = pref * g * float(e_mean[0])
    se = pref * g * float(e_se[0])
    return val, se



# -- shock jump kernel -------------------------------------------------------

def _check_curvature(H, lo, hi, n_probes=64):
    probes = np.linspace(lo, hi, n_probes)
    vals = np.asarray(H.second_derivative(probes), dtype=float)
    if np.any(vals <= 0.0) or not np.all(np.isfinite(vals)):
        raise DomainError("flux curvature must be positive on the kernel range")


def _rho_girsanov(H, t):
    """Callable (a, b) -> (t/2) integral_a^b rho^2 H''(rho) drho."""

    def val(a, b):
        if a == b:
            return 0.0
        return 0.5 * t * adaptive_simpson(
            lambda r: r * r * float(H.second_derivative(r)), a, b,
            rel_tol=1e-10)

    return val


def _kernel_K_rho(H, t, a, b, n_samples, n_steps, seed):
    """K(a, b, t) evaluated in density coordinates, as displayed:
    H''(b) * exp(-(t/2) int rho^2 H'') * E[exp(-int e(t H'(rho)) drho)].

    The excursion lives on the time interval [t H'(a), t H'(b)] and is
    observed directly at the nonuniform times t H'(rho) of a uniform rho
    grid; the integral in rho is a trapezoid on that grid.  Independent of
    the phi-coordinate machinery by construction.
    """
    from .paths import sample_excursion_at_times

    rho = np.linspace(a, b, n_steps + 1)
    times = t * np.asarray(H.derivative(rho), dtype=float)
    girs = math.exp(-_rho_girsanov(H, t)(a, b))
    w = np.full(n_steps + 1, (b - a) / n_steps)
    w[0] = w[-1] = 0.5 * (b - a) / n_steps
    tot = 0.0
    tot2 = 0.0
    chunk = 2048
    for start in range(0, n_samples, chunk):
        m = min(chunk, n_samples - start)
        e = sample_excursion_at_times(times, seed, sample_index=start // chunk,
                                      n_samples=m)
        vals = np.exp(-(e @ w))
        tot += vals.sum()
        tot2 += (vals * vals).sum()
    mean = tot / n_samples
    var = max(tot2 / n_samples - mean * mean, 0.0) * n_samples / (n_samples - 1)
    se = math.sqrt(var / n_samples)
    h2b = float(H.second_derivative(b))
    return h2b * girs * mean, h2b * girs * se


def _mass_factor_rho(H, t, a, n_samples, n_steps, seed, rel_tol=1e-8):
    """N(a) = a + integral_a^inf (H'' - K(a, rho, t)) / sqrt(2 pi t dH'^3) drho.

    Written in w = H'(rho) - H'(a): the integrand becomes
    (1 - K/H'') / sqrt(2 pi t w^3), with K/H'' in (0, 1]; the same split,
    substitution and tail closure as the density factor apply, with the
    excursion factor evaluated at nonuniform times like _kernel_K_rho.
    """
    from .paths import sample_excursion_at_times

    da = float(H.derivative(a))
    girs = _rho_girsanov(H, t)

    def rho_of_w(w):
        return legendre_derivative_vec(H, da + w)

    # finite range: double W until the deterministic factor is negligible
    W = 1.0
    while math.exp(-girs(a, float(rho_of_w(np.array([W]))[0]))) >= _GIRSANOV_FLOOR:
        W *= 2.0
        if W > _U_CAP:
            raise ConvergenceError("flux Girsanov factor does not decay")

    sqrt_t = math.sqrt(t)

    # v = sqrt(w); the deterministic integrand limit at 0 follows from
    # girsanov ~ (t/2) a^2 w near w = 0
    def g_det_v(v):
        if v == 0.0:
            return (2.0 / _SQRT_2PI) * 0.5 * t * a * a / sqrt_t
        w = v * v
        r = float(rho_of_w(np.array([w]))[0])
        return (2.0 / _SQRT_2PI) * (-math.expm1(-girs(a, r))) / (sqrt_t * v * v)

    i_det = adaptive_simpson(g_det_v, 0.0, math.sqrt(W), rel_tol=rel_tol,
                             abs_tol=1e-14)

    # Monte Carlo piece on Gauss panels in v
    v_star = min(1.0, math.sqrt(2.0) / (abs(a) * sqrt_t + 1e-12))
    breaks = _panel_breaks(v_star, math.sqrt(W))
    v_nodes, v_weights = [], []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        xs, ws = gauss_legendre(lo, hi, 12)
        v_nodes.append(xs)
        v_weights.append(ws)
    v_nodes = np.concatenate(v_nodes)
    v_weights = np.concatenate(v_weights)
    w_nodes = v_nodes**2

    g_vals = np.empty(w_nodes.size)
    e_mean = np.empty(w_nodes.size)
    e_se = np.empty(w_nodes.size)
    chunkc = max(1024, n_samples // 8)
    for i, w in enumerate(w_nodes):
        b = float(rho_of_w(np.array([w]))[0])
        g_vals[i] = math.exp(-girs(a, b))
        rho = np.linspace(a, b, n_steps + 1)
        times = t * np.asarray(H.derivative(rho), dtype=float)
        tw = np.full(n_steps + 1, (b - a) / n_steps)
        tw[0] = tw[-1] = 0.5 * (b - a) / n_steps
        tot = tot2 = 0.0
        for start in range(0, n_samples, chunkc):
            m = min(chunkc, n_samples - start)
            e = sample_excursion_at_times(times, seed + 1,
                                          sample_index=start // chunkc,
                                          n_samples=m)
            vals = np.exp(-(e @ tw))
            tot += vals.sum()
            tot2 += (vals * vals).sum()
        mu = tot / n_samples
        var = max(tot2 / n_samples - mu * mu, 0.0) * n_samples / (n_samples - 1)
        e_mean[i] = mu
        e_se[i] = math.sqrt(var / n_samples)

    kern = (2.0 / _SQRT_2PI) * v_weights / (sqrt_t * np.maximum(v_nodes, 1e-300) ** 2)
    i_mc = float(np.sum(kern * g_vals * (1.0 - e_mean)))
    mc_se = float(np.sum(kern * g_vals * e_se))
    tail = 2.0 / math.sqrt(2.0 * math.pi * t * W)
    return a + i_det + i_mc + tail, mc_se


def jump_kernel_n(H, t, rho_minus, rho_plus, n_samples=None, n_steps=None,
                  seed=0, rel_tol=1e-8):
    """Shock jump kernel n(rho-, rho+, t), evaluated in density coordinates.

    (rho+ - rho-) K(rho-, rho+, t) / sqrt(2 pi t (H'(rho+) - H'(rho-))^3)
    times the mass-factor ratio N(rho+) / N(rho-).  Returns (value,
    std_error) with the error propagated from the three Monte Carlo
    factors.
    """
    if not (rho_minus < rho_plus):
        raise ConfigError("kernel needs rho_minus < rho_plus", field="rho_minus")
    if t <= 0:
        raise ConfigError("t must be positive", field="t")
    n_samples = n_samples or _DEFAULT_MC["n_samples"]
    n_steps = n_steps or 256
    _check_curvature(H, rho_minus, rho_plus)

    dplus = float(H.derivative(rho_plus))
    dminus = float(H.derivative(rho_minus))
    K, K_se = _kernel_K_rho(H, t, rho_minus, rho_plus, n_samples, n_steps, seed)
    Np, Np_se = _mass_factor_rho(H, t, rho_plus, n_samples, n_steps, seed + 7,
                                 rel_tol=rel_tol)
    Nm, Nm_se = _mass_factor_rho(H, t, rho_minus, n_samples, n_steps, seed + 8,
                                 rel_tol=rel_tol)
    pref = (rho_plus - rho_minus) / math.sqrt(
        2.0 * math.pi * t * (dplus - dminus) ** 3)
    val = pref * K * Np / Nm
    rel = math.sqrt((K_se / K) ** 2 + (Np_se / max(Np, 1e-300)) ** 2
                    + (Nm_se / max(Nm, 1e-300)) ** 2)
    return val, abs(val) * rel


def jump_kernel_n_proof_form(H, t, rho_minus, rho_plus, n_samples=None,
                             n_steps=None, seed=0):
    """Cross-check route: t H''(rho+) * (f(z)/f(y)) * K(y, z) in shifted
    coordinates y = t H'(rho-), z = t H'(rho+) with the cost
    phi(.) = t L(./t); entirely phi-space machinery.
    """
    from .hamiltonian import phi_from_hamiltonian

    n_samples = n_samples or _DEFAULT_MC["n_samples"]
    n_steps = n_steps or _DEFAULT_MC["n_steps"]
    phi = phi_from_hamiltonian(H, t)
    y = t * float(H.derivative(rho_minus))
    z = t * float(H.derivative(rho_plus))
    ens = ExcursionEnsemble(seed, n_samples, n_steps)
    fz = f_phi(phi, z, ensemble=ens, seed=seed, full=True)
    fy = f_phi(phi, y, ensemble=ens, seed=seed, full=True)
    Kv, K_se = kernel_K(phi, y, z, ensemble=ens, seed=seed)
    h2 = float(H.second_derivative(rho_plus))
    val = t * h2 * (fz.value / fy.value) * Kv
    rel = math.sqrt((K_se / max(Kv, 1e-300)) ** 2
                    + (fz.mc_std_error / fz.value) ** 2
                    + (fy.mc_std_error / fy.value) ** 2)
    return val, abs(val) * rel


@dataclass(frozen=True)
class KernelTable:
    """Jump kernel on a density grid: n(rho_i, rho_j, t) for i < j, plus
    row rates lambda(rho_i) integrated above a small-jump cutoff."""

    t: float
    rho_grid: np.ndarray
    n_values: np.ndarray
    std_errors: np.ndarray
    lam: np.ndarray
    jump_cutoff: float

    def rows(self):
        """Flattened (rho_minus, rho_plus, n, std_error) arrays, i < j."""
        i, j = np.triu_indices(self.rho_grid.size, k=1)
        return (self.rho_grid[i], self.rho_grid[j],
                self.n_values[i, j], self.std_errors[i, j])


def build_kernel_table(H, t, rho_grid, n_samples=None, n_steps=None, seed=0,
                       jump_cutoff=None):
    """KernelTable via the shifted-coordinate form on a shared ensemble.

    One density factor per grid point and one kernel evaluation per pair,
    all on common excursions: ratios inside a row share fluctuations, so
    tabulated rates are smooth.  lambda integrates each row by trapezoid
    over columns above rho_i + jump_cutoff (default: one percent of the
    grid span); smaller jumps are exactly the regime where finiteness of
    the total rate is not guaranteed, so they are reported separately, not
    silently included.
    """
    from .hamiltonian import phi_from_hamiltonian

    rho_grid = np.asarray(rho_grid, dtype=float)
    if np.any(np.diff(rho_grid) <= 0):
        raise ConfigError("rho_grid must be strictly increasing", field="rho_grid")
    n_samples = n_samples or _DEFAULT_MC["n_samples"]
    n_steps = n_steps or _DEFAULT_MC["n_steps"]
    _check_curvature(H, rho_grid[0], rho_grid[-1])
    span = rho_grid[-1] - rho_grid[0]
    if jump_cutoff is None:
        jump_cutoff = 0.01 * span

    phi = phi_from_hamiltonian(H, t)
    zs = t * np.asarray(H.derivative(rho_grid), dtype=float)
    ens = ExcursionEnsemble(seed, n_samples, n_steps)
    fs = [f_phi(phi, z, ensemble=ens, seed=seed, full=True) for z in zs]
    for rho_i, fv in zip(rho_grid, fs):
        # the density factor sits in every row denominator; a node whose
        # estimate is within noise of zero poisons the whole row
        if fv.value <= 0.0 or fv.value < 3.0 * fv.mc_std_error:
            raise AccuracyError(
                f"density factor unresolved at rho = {rho_i:.4g} "
                f"({fv.value:.3g} vs s.e. {fv.mc_std_error:.3g}); shrink "
                "the grid or raise n_samples")

    m = rho_grid.size
    n_vals = np.zeros((m, m))
    n_errs = np.zeros((m, m))
    A = girsanov_halfint(phi)
    # batch the pair kernels through one weighted-mean call
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    cols = np.empty((n_steps + 1, len(pairs)))
    scales = np.empty(len(pairs))
    s_grid = ens.s_grid
    wrow = np.full(n_steps + 1, 1.0 / n_steps)
    wrow[0] = wrow[-1] = 0.0
    for c, (i, j) in enumerate(pairs):
        y, z = zs[i], zs[j]
        vals = np.asarray(phi.second_derivative(y + (z - y) * s_grid), dtype=float)
        vals[0] = vals[-1] = 0.0
        cols[:, c] = vals * wrow
        scales[c] = (z - y) ** 1.5
    if not np.all(np.isfinite(cols)):
        raise DomainError("cost curvature singular on the kernel grid")
    e_mean, e_se = ens.exp_weighted_means(cols, scales)

    h2 = np.asarray(H.second_derivative(rho_grid), dtype=float)
    for c, (i, j) in enumerate(pairs):
        y, z = zs[i], zs[j]
        pref = (float(phi.derivative(z)) - float(phi.derivative(y))) \
            / math.sqrt(2.0 * math.pi * (z - y) ** 3)
        Kv = pref * math.exp(-A(y, z)) * e_mean[c]
        K_err = pref * math.exp(-A(y, z)) * e_se[c]
        ratio = fs[j].value / fs[i].value
        n_vals[i, j] = t * h2[j] * ratio * Kv
        rel = math.sqrt((K_err / max(Kv, 1e-300)) ** 2
                        + (fs[j].mc_std_error / fs[j].value) ** 2
                        + (fs[i].mc_std_error / fs[i].value) ** 2)
        n_errs[i, j] = n_vals[i, j] * rel

    lam = np.zeros(m)
    for i in range(m):
        keep = rho_grid >= rho_grid[i] + jump_cutoff
        if keep.sum() >= 2:
            lam[i] = float(np.trapezoid(n_vals[i, keep], rho_grid[keep]))
    return KernelTable(t=float(t), rho_grid=rho_grid, n_values=n_vals,
                       std_errors=n_errs, lam=lam, jump_cutoff=float(jump_cutoff))
