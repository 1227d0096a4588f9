"""Killed transition density: the two routes and the derived objects."""

import math

import numpy as np
import pytest

from conslaw.density import (
    DensityGrid,
    MCEstimate,
    f_mc,
    f_pde,
    hitting_density_Phi,
    images_kernel,
    joint_max_argmax_density,
    survival_J_and_j,
)
from conslaw.errors import ConfigError, ConvergenceError, RangeError, StabilityError
from conslaw.hamiltonian import quadratic, tabulated
from conslaw.quadrature import gauss_legendre
from conslaw.rng import component_stream

SEED = 20260822
QUAD = quadratic(2.0)      # z^2


def _mixed_phi():
    # z^4/4 + z^2/2 on a dense table; interpolation error is far below
    # the Monte Carlo tolerances it meets here
    g = np.linspace(-3.0, 3.0, 6001)
    return tabulated(g, 0.25 * g**4 + 0.5 * g**2)


def test_images_kernel_boundary_and_symmetry():
    y = np.linspace(-4.0, 0.0, 9)
    g = images_kernel(0.0, -1.0, 1.0, y)
    assert g[-1] == 0.0
    assert np.all(g[:-1] > 0.0)


def test_f_mc_near_flat_matches_images():
    phi = quadratic(2e-6)
    est = f_mc(phi, 0.0, -1.0, 1.0, -0.7, n_samples=4000, seed=2)
    ref = float(images_kernel(0.0, -1.0, 1.0, -0.7))
    assert abs(est.value - ref) / ref < 1e-3


def test_f_mc_short_time_heat_limit():
    est = f_mc(QUAD, 0.0, -1.0, 1e-4, -1.0, n_samples=2000, seed=3)
    assert est.value * math.sqrt(2.0 * math.pi * 1e-4) == pytest.approx(1.0, rel=0.01)


def test_f_mc_argument_gates():
    with pytest.raises(ConfigError):
        f_mc(QUAD, 0.0, 0.5, 1.0, -1.0, n_samples=64)
    with pytest.raises(ConfigError):
        f_mc(QUAD, 0.0, -1.0, 1.0, 0.0, n_samples=64)
    with pytest.raises(ConfigError):
        f_mc(QUAD, 1.0, -1.0, 1.0, -1.0, n_samples=64)


def test_f_pde_grid_invariants():
    grid = f_pde(QUAD, 0.0, -1.0, 1.0)
    assert np.all(grid.values >= 0.0)
    assert np.all(grid.values[:, -1] == 0.0)
    assert np.all(grid.mass <= 1.0 + 1e-12)
    assert np.all(np.diff(grid.mass) <= 1e-12)


def test_f_pde_constant_drift_analytic():
    # near-flat curvature with unit slope: phi(z) = eps (z - c)^2 with
    # 2 eps c = -1 makes phi' ~ 1; the killed density then has the
    # closed drifted-images form
    eps = 1e-6
    phi = quadratic(2.0 * eps, shift=-0.5 / eps)
    grid = f_pde(phi, 0.0, -1.0, 1.0)
    y = grid.y_grid
    mu = -1.0
    ref = np.exp(mu * (y - (-1.0)) - 0.5 * mu * mu * 1.0) * images_kernel(
        0.0, -1.0, 1.0, y)
    got = grid.values[-1]
    core = ref >= 1e-1 * ref.max()
    tail = ref >= 1e-3 * ref.max()
    assert np.max(np.abs(got[core] - ref[core]) / ref[core]) < 5e-3
    # upwind advection is first order; the far tail carries its
    # numerical-diffusion footprint at default resolution
    assert np.max(np.abs(got[tail] - ref[tail]) / ref[tail]) < 2e-2


def test_f_pde_richardson_self_convergence():
    base = f_pde(QUAD, 0.0, -1.0, 1.0, n_y=3000, n_t=300)
    fine = f_pde(QUAD, 0.0, -1.0, 1.0, n_y=6000, n_t=600)
    coarse_end = base.values[-1]
    fine_end = fine.values[-1][::2]
    assert np.max(np.abs(coarse_end - fine_end)) < 1e-3


def test_f_pde_flux_identity():
    grid = f_pde(QUAD, 0.0, -1.0, 1.0)
    absorbed = grid.mass[0] - grid.mass[-1]
    through_flux = -np.trapezoid(grid.boundary_flux, grid.mass_t_grid)
    assert abs(absorbed - through_flux) < 1e-3


def test_f_pde_domain_gates():
    with pytest.raises(ConfigError):
        f_pde(QUAD, 0.0, -1.0, 1.0, y_min=-2.0)
    with pytest.raises(StabilityError):
        f_pde(quadratic(8000.0), 0.0, -1.0, 1.0, n_y=2000)


def test_cross_method_agreement_two_drifts_two_horizons():
    for phi in (QUAD, _mixed_phi()):
        for t in (0.5, 1.0):
            grid = f_pde(phi, 0.0, -1.0, t)
            peak = grid.peak()
            for y in (-0.4, -1.0, -1.8):
                ref = grid.interpolate(t, y)
                if ref < 1e-4 * peak:
                    continue
                est = f_mc(phi, 0.0, -1.0, t, y, n_samples=20000, seed=SEED)
                assert abs(est.value - ref) / ref < 0.05


def test_reflection_identity_probes():
    # f for the mirrored drift at (s,x,t,y) equals f for the original
    # drift at (-t,y,-s,x); a shifted parabola keeps the two sides
    # genuinely different
    phi = quadratic(2.0, shift=0.3)
    probes = [(-0.2, -1.1, 0.7, -0.6), (0.0, -0.8, 0.9, -1.4),
              (-0.5, -0.7, 0.4, -0.9), (0.1, -1.5, 1.1, -0.5),
              (-0.3, -0.6, 0.5, -1.2)]
    for s, x, t, y in probes:
        lhs = f_mc(phi.reflected(), s, x, t, y, n_samples=20000, seed=SEED)
        rhs = f_mc(phi, -t, y, -s, x, n_samples=20000, seed=SEED + 1)
        tol = 0.05 * abs(rhs.value) + 3.0 * (lhs.std_error + rhs.std_error)
        assert abs(lhs.value - rhs.value) < tol


def test_hitting_density_near_flat_reduction():
    phi = quadratic(2e-6)
    est = hitting_density_Phi(phi, 0.0, -1.0, 1.0, n_samples=4000, seed=4)
    ref = 1.0 / math.sqrt(2.0 * math.pi) * math.exp(-0.5)
    assert abs(est.value - ref) / ref < 1e-3


def test_hitting_density_matches_pde_boundary_slope():
    grid = f_pde(QUAD, 0.0, -1.0, 1.2)
    for t in (0.6, 1.0):
        k = int(np.argmin(np.abs(grid.mass_t_grid - t)))
        pde_phi = -grid.boundary_flux[k]
        est = hitting_density_Phi(QUAD, 0.0, -1.0, float(grid.mass_t_grid[k]),
                                  n_samples=20000, seed=SEED)
        assert abs(est.value - pde_phi) / pde_phi < 0.05


def test_hitting_density_subprobability_in_horizon():
    ts = np.linspace(0.05, 4.0, 24)
    vals = [hitting_density_Phi(QUAD, 0.0, -1.0, float(t), n_samples=3000,
                                seed=SEED).value for t in ts]
    cum = np.concatenate([[0.0], np.cumsum(np.diff(ts) * 0.5
                                           * (np.array(vals[1:]) + vals[:-1]))])
    assert np.all(np.diff(cum) >= 0.0)
    assert cum[-1] <= 1.0


def test_survival_profile_and_slope_bracket():
    probes = np.array([-8.0, -2.0, -1.0, -0.5, -0.1])
    J, j_val = survival_J_and_j(QUAD, 0.0, probes, n_samples=20000, seed=SEED)
    assert np.all((J >= 0.0) & (J <= 1.0))
    assert np.all(np.diff(J) <= 1e-6)          # larger x = closer to 0 = riskier
    assert J[0] >= 0.999
    assert j_val < 0.0

    eps = 1e-2
    Jfd, _ = survival_J_and_j(QUAD, 0.0, np.array([-2 * eps, -eps]),
                              n_samples=4000, seed=SEED, grid_h=1e-3)
    fd = (Jfd[1] - Jfd[0]) / eps
    assert abs(fd - j_val) / abs(j_val) < 0.10


def test_survival_reports_unreached_plateau():
    # near-flat drift never rescues the path: the kill rate decays like
    # t^(-3/2) and no finite horizon reaches a plateau at this tolerance
    with pytest.raises(ConvergenceError):
        survival_J_and_j(quadratic(1e-8), 0.0, np.array([-1.0]),
                         mass_rate_tol=1e-6, t_cap=8.0, n_samples=2000,
                         seed=1)


def test_joint_density_positive_and_normalized():
    # the argmax-time marginal blows up like t^(-1/2) at the start, so
    # integrate in tau = sqrt(t); the level integral gets a width-matched
    # variable a = tau * u since the hitting density concentrates on a
    # band of width sqrt(t) at small t
    s, x = 0.0, -0.5
    from conslaw.excursion import ExcursionEnsemble, f_phi as _f
    ens = ExcursionEnsemble(SEED, 8000, 256)
    total = 0.0
    call = 0
    for tau_lo, tau_hi in ((0.0, 0.7), (0.7, 1.5), (1.5, math.sqrt(6.0))):
        tau_n, tau_w = gauss_legendre(tau_lo, tau_hi, 12)
        for tau, tw in zip(tau_n, tau_w):
            t = float(tau * tau)
            loc = _f(QUAD, t, ensemble=ens)
            assert loc > 0.0
            u_n, u_w = gauss_legendre(0.0, min(6.0 / tau, 10.0), 14)
            hits = []
            for u in u_n:
                call += 1
                hits.append(hitting_density_Phi(
                    QUAD, s, float(-tau * u), t, n_samples=2000,
                    seed=SEED + call).value)
            inner = tau * float(np.dot(u_w, hits))
            total += tw * 2.0 * tau * loc * inner
    assert abs(total - 1.0) < 0.02


def test_joint_density_matches_direct_paths():
    # direct-simulation oracle: argmax and max of W(u) - u^2 from
    # (0, -0.5), with a per-step bridge-max draw so the discrete-path
    # maximum loses its sqrt(dt) undershoot; compared on absolute
    # rectangle probabilities away from the boundary layers
    s, x = 0.0, -0.5
    horizon, m, n_paths = 6.0, 1500, 40000
    dt = horizon / m
    rng = component_stream(SEED, "density_mc", 5)
    ts = np.linspace(s, s + horizon, m + 1)
    drift = -np.diff(ts**2)
    arg_best = np.empty(n_paths)
    val_best = np.empty(n_paths)
    for start in range(0, n_paths, 2500):
        stop = min(start + 2500, n_paths)
        k = stop - start
        inc = rng.standard_normal((k, m)) * math.sqrt(dt) + drift
        path = np.concatenate([np.full((k, 1), x), x + np.cumsum(inc, axis=1)],
                              axis=1)
        left, right = path[:, :-1], path[:, 1:]
        u = rng.random((k, m))
        step_max = 0.5 * (left + right + np.sqrt(
            (right - left) ** 2 - 2.0 * dt * np.log(u)))
        idx = np.argmax(step_max, axis=1)
        arg_best[start:stop] = ts[idx] + 0.5 * dt
        val_best[start:stop] = step_max[np.arange(k), idx]

    boxes = [((0.05, 0.15), (0.02, 0.50)),
             ((0.15, 0.60), (0.02, 0.60)),
             ((0.15, 0.60), (0.60, 2.50)),
             ((0.60, 1.60), (0.02, 0.60)),
             ((0.60, 1.60), (0.60, 2.50)),
             ((1.60, 4.50), (0.02, 3.00))]

    from conslaw.excursion import ExcursionEnsemble, f_phi as _f
    ens = ExcursionEnsemble(SEED, 6000, 256)
    call = 0
    for (t_lo, t_hi), (a_lo, a_hi) in boxes:
        emp = float(np.mean((arg_best >= t_lo) & (arg_best < t_hi)
                            & (val_best - x >= a_lo) & (val_best - x < a_hi)))
        t_n, t_w = gauss_legendre(t_lo, t_hi, 10)
        a_n, a_w = gauss_legendre(a_lo, a_hi, 10)
        form = 0.0
        for tn, tw in zip(t_n, t_w):
            loc = _f(QUAD, float(tn), ensemble=ens)
            row = []
            for an in a_n:
                call += 1
                row.append(hitting_density_Phi(
                    QUAD, s, float(-an), float(tn), n_samples=1500,
                    seed=SEED + 7000 + call).value)
            form += tw * loc * float(np.dot(a_w, row))
        assert abs(form - emp) < 0.015, (t_lo, t_hi, a_lo, a_hi, form, emp)


def test_joint_density_input_gate():
    with pytest.raises(ConfigError):
        joint_max_argmax_density(QUAD, 0.0, -0.5, 1.0, -0.7, n_samples=256)


def test_joint_density_product_estimate():
    est = joint_max_argmax_density(QUAD, 0.0, -0.5, 0.8, 0.4,
                                   n_samples=4000, seed=SEED)
    assert isinstance(est, MCEstimate)
    assert est.value > 0.0
    assert est.std_error > 0.0


def test_grid_interpolate_range_gate():
    grid = f_pde(QUAD, 0.0, -1.0, 0.5, n_y=1500, n_t=120)
    with pytest.raises(RangeError):
        grid.interpolate(0.7, -1.0)
    with pytest.raises(RangeError):
        grid.interpolate(0.3, 0.5)


def test_grid_rows_shape():
    grid = f_pde(QUAD, 0.0, -1.0, 0.3, n_y=800, n_t=80)
    rows = grid.rows()
    assert rows.shape == (grid.t_grid.size * grid.y_grid.size, 3)
    assert rows[:, 2].min() >= 0.0
