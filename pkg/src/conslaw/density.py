"""Killed transition density of the drifted path, by two independent routes.

The object is the density f(s,x,t,y) of W(t) - phi(t) started below zero
at x and killed on first hitting zero.  Route one weights a
three-dimensional Bessel bridge by the curvature integral (exact in
distribution, Monte Carlo in the expectation).  Route two integrates the
forward equation on a grid: Crank-Nicolson diffusion, upwinded
advection, absorbing boundaries, warm-started from the method-of-images
kernel just after the initial time.  The derived objects - the hitting
density, the survival profile J and its boundary slope j, and the joint
law of the running maximum and its location - sit on top of these.

Sign bookkeeping: j is negative (slope at zero of a survival profile
increasing toward the interior).  Everywhere internally the positive
quantity f^phi = -j is used, via the excursion module.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import (AccuracyError, ConfigError, ConvergenceError, RangeError,
                     StabilityError)
from .excursion import f_phi, girsanov_halfint
from .paths import sample_bessel3_bridge_batch

_DENSITY_MC = {"n_samples": 20_000, "n_steps": 256}

# grid targets for the forward solver: cell size and step
_H_TARGET = 1e-3
_DT_TARGET = 2.5e-3
_N_Y_CAP = 24_000
_N_T_CAP = 12_000
_RANNACHER_STEPS = 4


@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo point estimate with its standard error."""

    value: float
    std_error: float
    n_samples: int


def images_kernel(s, x, t, y):
    """Transition density of Brownian motion killed at zero, x,y < 0."""
    tau = t - s
    y = np.asarray(y, dtype=float)
    pref = 1.0 / math.sqrt(2.0 * math.pi * tau)
    return pref * (np.exp(-((x - y) ** 2) / (2.0 * tau))
                   - np.exp(-((x + y) ** 2) / (2.0 * tau)))


def _check_window(s, t):
    if not t > s:
        raise ConfigError("need t > s", field="t")


def _trap_weights(n_steps, length):
    w = np.full(n_steps + 1, length / n_steps)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def _bridge_exponential(phi, s, t, a, b, n_samples, n_steps, seed):
    """mean and s.e. of exp(-int phi''(u) B(u) du), B a Bessel-3 bridge
    from (s, a) to (t, b)."""
    u = np.linspace(s, t, n_steps + 1)
    w = _trap_weights(n_steps, t - s) * phi.second_derivative(u)
    paths = sample_bessel3_bridge_batch(a, b, (s, t), n_steps, seed, n_samples)
    vals = np.exp(-(paths @ w))
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(n_samples))
    return mean, se


def f_mc(phi, s, x, t, y, n_samples=None, n_steps=None, seed=0):
    """Bessel-bridge evaluation of the killed density at one point."""
    _check_window(s, t)
    if x >= 0 or y >= 0:
        raise ConfigError("density is defined below the barrier", field="x")
    ns = n_samples or _DENSITY_MC["n_samples"]
    nst = n_steps or _DENSITY_MC["n_steps"]
    half = girsanov_halfint(phi)
    pref = float(images_kernel(s, x, t, y)) * math.exp(
        -float(phi.derivative(t)) * y + float(phi.derivative(s)) * x
        - half(s, t))
    mean, se = _bridge_exponential(phi, s, t, -x, -y, ns, nst, seed)
    return MCEstimate(pref * mean, abs(pref) * se, ns)


def hitting_density_Phi(phi, s, x, t, n_samples=None, n_steps=None, seed=0):
    """Density in t of the first zero hit, started at (s, x), x < 0."""
    _check_window(s, t)
    if x >= 0:
        raise ConfigError("start must sit below the barrier", field="x")
    ns = n_samples or _DENSITY_MC["n_samples"]
    nst = n_steps or _DENSITY_MC["n_steps"]
    tau = t - s
    half = girsanov_halfint(phi)
    pref = (-x) / math.sqrt(2.0 * math.pi * tau**3) \
        * math.exp(-x * x / (2.0 * tau)) \
        * math.exp(float(phi.derivative(s)) * x - half(s, t))
    mean, se = _bridge_exponential(phi, s, t, -x, 0.0, ns, nst, seed)
    return MCEstimate(pref * mean, abs(pref) * se, ns)


# -- forward-equation route --------------------------------------------------

@dataclass(frozen=True)
class DensityGrid:
    """Killed density on a (time, space) lattice, with mass and boundary
    flux histories recorded as the solve progresses."""

    s: float
    x: float
    t_grid: np.ndarray
    y_grid: np.ndarray
    values: np.ndarray          # shape (len(t_grid), len(y_grid))
    mass: np.ndarray            # trapezoid integral, indexed by mass_t_grid
    boundary_flux: np.ndarray   # 0.5 * d_y f at y = 0, indexed by mass_t_grid
    mass_t_grid: np.ndarray     # full step history even when values are not kept

    def interpolate(self, t, y):
        """Bilinear lookup; RangeError outside the lattice."""
        tg, yg = self.t_grid, self.y_grid
        if not (tg[0] <= t <= tg[-1]) or not (yg[0] <= y <= yg[-1]):
            raise RangeError(f"point (t={t}, y={y}) outside the solved lattice")
        i = min(np.searchsorted(tg, t), tg.size - 1)
        i0 = max(i - 1, 0) if tg[i] > t else i
        i1 = min(i0 + 1, tg.size - 1)
        j = min(np.searchsorted(yg, y), yg.size - 1)
        j0 = max(j - 1, 0) if yg[j] > y else j
        j1 = min(j0 + 1, yg.size - 1)
        ft = 0.0 if i1 == i0 else (t - tg[i0]) / (tg[i1] - tg[i0])
        fy = 0.0 if j1 == j0 else (y - yg[j0]) / (yg[j1] - yg[j0])
        v = self.values
        return float((1 - ft) * ((1 - fy) * v[i0, j0] + fy * v[i0, j1])
                     + ft * ((1 - fy) * v[i1, j0] + fy * v[i1, j1]))

    def peak(self):
        return float(self.values.max())

    def rows(self):
        """Flattened (t, y, f) rows for the CSV interface."""
        tt, yy = np.meshgrid(self.t_grid, self.y_grid, indexing="ij")
        return np.column_stack([tt.ravel(), yy.ravel(), self.values.ravel()])


def _advection_coeffs(c, h):
    """Upwinded first-difference stencil (lower, diag, upper) for c * d_y."""
    if c > 0:
        return 0.0, -c / h, c / h
    return -c / h, c / h, 0.0


def _step_matrix(c, h, n, scale):
    """Banded (I - scale * A) for A = half*D2 + c*D1_upwind, interior size n."""
    d2 = 0.5 / (h * h)
    lo_a, di_a, up_a = _advection_coeffs(c, h)
    ab = np.zeros((3, n))
    ab[0, 1:] = -scale * (d2 + up_a)
    ab[1, :] = 1.0 - scale * (-2.0 * d2 + di_a)
    ab[2, :-1] = -scale * (d2 + lo_a)
    return ab


def _apply_rhs(f, c, h, n, scale):
    """(I + scale * A) f on the interior, zero boundary values."""
    d2 = 0.5 / (h * h)
    lo_a, di_a, up_a = _advection_coeffs(c, h)
    out = (1.0 + scale * (-2.0 * d2 + di_a)) * f[1:-1]
    out[:-1] += scale * (d2 + up_a) * f[2:-1]
    out[1:] += scale * (d2 + lo_a) * f[1:-2]
    return out


def f_pde(phi, s, x, t_max, y_min=None, n_y=None, n_t=None, eps0=1e-4,
          store_values=True):
    """Forward-equation solve of the killed density from (s, x).

    Warm start: the exact images kernel at s + eps0 (the density is
    singular at t = s; the kernel is its driftless short-time law).  The
    first few steps run backward Euler to damp the warm start's
    under-resolved modes, then Crank-Nicolson.  Absorbing at y = 0 and
    at the far boundary.  With store_values=False only the final profile
    is kept (mass and flux histories always are); survival horizons use
    that to stay within memory.
    """
    _check_window(s, t_max)
    if x >= 0:
        raise ConfigError("start must sit below the barrier", field="x")
    span = t_max - s
    # the ballistic characteristic x - (phi(u) - phi(s)) can carry the
    # packet far below the start; the floor must stay 6 sigma under its
    # lowest point or mass leaks out the bottom and masquerades as killed
    u_scan = np.linspace(s, t_max, 513)
    char_min = float(np.min(x - (phi.value(u_scan) - phi.value(s))))
    y_need = 6.0 * math.sqrt(span) - char_min
    if y_min is None:
        y_min = -y_need
    elif -y_min < y_need:
        raise ConfigError(
            f"domain depth {-y_min:.3g} below required {y_need:.3g}",
            field="y_min")
    if n_y is None:
        n_y = min(int(math.ceil(-y_min / _H_TARGET)), _N_Y_CAP)
    if n_t is None:
        n_t = min(max(int(math.ceil((span - eps0) / _DT_TARGET)), 64), _N_T_CAP)

    h = -y_min / n_y
    drift_peak = float(np.max(np.abs(phi.derivative(
        np.linspace(s, t_max, 257)))))
    if 2.0 * drift_peak * h > 2.0:
        n_y = min(2 * n_y, _N_Y_CAP)
        h = -y_min / n_y
        if 2.0 * drift_peak * h > 2.0:
            raise StabilityError(
                f"drift cell Peclet {2.0 * drift_peak * h:.2f} above 2 "
                "after one refinement; increase n_y")

    y = np.linspace(y_min, 0.0, n_y + 1)
    t_grid = np.linspace(s + eps0, t_max, n_t + 1)
    dt = (t_max - s - eps0) / n_t

    f = images_kernel(s, x, s + eps0, y)
    f[0] = f[-1] = 0.0
    w_y = _trap_weights(n_y, -y_min)

    values = np.empty((n_t + 1 if store_values else 1, n_y + 1))
    mass = np.empty(n_t + 1)
    flux = np.empty(n_t + 1)
    values[0] = f
    mass[0] = float(f @ w_y)
    flux[0] = 0.5 * (-4.0 * f[-2] + f[-3]) / (2.0 * h)

    for k in range(n_t):
        t0, t1 = t_grid[k], t_grid[k + 1]
        c0 = float(phi.derivative(t0))
        c1 = float(phi.derivative(t1))
        if k < _RANNACHER_STEPS:
            rhs = f[1:-1].copy()
            ab = _step_matrix(c1, h, n_y - 1, dt)
        else:
            rhs = _apply_rhs(f, c0, h, n_y - 1, 0.5 * dt)
            ab = _step_matrix(c1, h, n_y - 1, 0.5 * dt)
        f = np.concatenate([[0.0], solve_banded((1, 1), ab, rhs), [0.0]])
        np.clip(f, 0.0, None, out=f)
        if store_values:
            values[k + 1] = f
        mass[k + 1] = float(f @ w_y)
        flux[k + 1] = 0.5 * (-4.0 * f[-2] + f[-3]) / (2.0 * h)
    step_times = t_grid
    if not store_values:
        values[0] = f
        t_grid = t_grid[-1:]

    return DensityGrid(s=s, x=x, t_grid=t_grid, y_grid=y, values=values,
                       mass=mass, boundary_flux=flux, mass_t_grid=step_times)


# -- survival profile and the joint law --------------------------------------

def survival_J_and_j(phi, s, x_probes, mass_rate_tol=1e-6, t_cap=64.0,
                     n_samples=None, n_steps=None, seed=0, grid_h=2.5e-3):
    """Survival probabilities J(s, x) at the probes, plus the boundary
    slope j(s).

    J comes from the grid route: the killed mass plateaus once the drift
    has carried the surviving paths away from the barrier; the horizon
    doubles until the decrement rate falls below mass_rate_tol.  j comes
    from the excursion route (j = -f^phi), an entirely separate
    computation; the two meet in the finite-difference bracket test.
    """
    x_probes = np.asarray(x_probes, dtype=float)
    if np.any(x_probes >= 0):
        raise ConfigError("probes must sit below the barrier", field="x_probes")
    j_value = -f_phi(phi, s, n_samples=n_samples, n_steps=n_steps, seed=seed)

    J = np.empty(x_probes.size)
    for i, xp in enumerate(x_probes):
        t_hor = 4.0
        while True:
            depth = 6.0 * math.sqrt(t_hor) + abs(xp)
            grid = f_pde(phi, s, float(xp), s + t_hor,
                         n_y=min(int(depth / grid_h), _N_Y_CAP),
                         store_values=False)
            steps = grid.mass_t_grid
            k = max(int(0.9 * steps.size), steps.size - 2)
            dt_tail = steps[-1] - steps[k - 1]
            rate = (grid.mass[k - 1] - grid.mass[-1]) / dt_tail
            if rate < mass_rate_tol:
                break
            t_hor *= 2.0
            if t_hor > t_cap:
                raise ConvergenceError(
                    f"survival mass still draining at horizon {t_hor / 2:.0f}")
        J[i] = grid.mass[-1]
    return J, j_value


def joint_max_argmax_density(phi, s, x, t, z, n_samples=None, n_steps=None,
                             seed=0):
    """Joint density of (location, value) of the running maximum of the
    drifted path from (s, x): the product of the location factor -j(t)
    and the hitting density at the shifted start x - z."""
    if not z > x:
        raise ConfigError("max value must exceed the start", field="z")
    _check_window(s, t)
    loc = f_phi(phi, t, n_samples=n_samples, n_steps=n_steps, seed=seed,
                full=True)
    if loc.value <= 0:
        raise AccuracyError(
            f"location factor came out nonpositive ({loc.value:.3e}) at t={t}")
    hit = hitting_density_Phi(phi, s, x - z, t, n_samples=n_samples,
                              n_steps=n_steps, seed=seed)
    value = loc.value * hit.value
    se = abs(loc.value) * hit.std_error + abs(hit.value) * loc.mc_std_error
    return MCEstimate(value, se, hit.n_samples)
