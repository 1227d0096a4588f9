"""Jump-drift profile simulation against its own invariants and the
variational pipeline.

The drift examples and the piecewise-linear Burgers profile are exact
facts about -1/(t H'').  The thinning machinery is checked on a
synthetic table with a flat rate, where inter-event distances must come
out exponential; the real-table run is compared against independent
variational solves path by path.
"""

import numpy as np
import pytest

from conslaw.errors import ConfigError, DomainError, TableRangeError
from conslaw.excursion import KernelTable, build_kernel_table
from conslaw.generator import (
    compare_with_direct,
    drift_b,
    empirical_sampler,
    piece_slopes,
    simulate_profile,
)
from conslaw.hamiltonian import quadratic, quartic
from conslaw.paths import GridSpec
from conslaw.rng import component_stream
from conslaw.stats import ks_sample_vs_cdf, ks_two_sample

SEED = 20260822


@pytest.fixture(scope="module")
def burgers_table():
    # floor at -2.6 keeps every density-factor node resolvable at this
    # sample count; the gate in build_kernel_table enforces that
    grid = np.linspace(-2.6, 3.0, 57)
    return build_kernel_table(quadratic(1.0), 1.0, grid, n_samples=20000,
                              n_steps=192, seed=11)


def test_drift_matches_curvature():
    assert drift_b(quadratic(1.0), 0.7, 1.0) == pytest.approx(-1.0)
    assert drift_b(quadratic(2.0), -0.3, 2.0) == pytest.approx(-0.25)
    assert drift_b(quartic(1.0), 1.0, 1.0) == pytest.approx(-1.0 / 3.0)
    rho = np.array([0.5, 1.0, 2.0])
    out = drift_b(quartic(1.0), rho, 2.0)
    assert np.allclose(out, -1.0 / (2.0 * 3.0 * rho**2))


def test_drift_input_gates():
    with pytest.raises(ConfigError):
        drift_b(quadratic(1.0), 0.0, 0.0)
    with pytest.raises(DomainError):
        drift_b(quartic(1.0), 0.0, 1.0)


def test_empirical_sampler_draws_from_pool():
    with pytest.raises(ConfigError):
        empirical_sampler([])
    pool = np.array([0.1, 0.4, 0.9])
    draw = empirical_sampler(pool)
    rng = component_stream(SEED, "profile", 0)
    seen = {draw(rng) for _ in range(60)}
    assert seen <= set(pool.tolist())
    assert len(seen) == 3


def _spike_table(n_cells=200, lam_value=2.0, lo=0.0, hi=10.0):
    """Flat-rate table whose rows put all mass one column up."""
    grid = np.linspace(lo, hi, n_cells + 1)
    n_values = np.zeros((grid.size, grid.size))
    for i in range(grid.size - 1):
        n_values[i, i + 1] = 1.0
    return KernelTable(t=1.0, rho_grid=grid, n_values=n_values,
                       std_errors=np.zeros_like(n_values),
                       lam=np.full(grid.size, lam_value), jump_cutoff=1e-6)


def test_interjump_distances_exponential():
    # flat rate lam = 2 means thinning must reproduce Exp(2) gaps; the
    # near-zero drift keeps the profile inside the table for a long run
    table = _spike_table()
    H = quadratic(100.0)
    sampler = empirical_sampler([1.0])
    gaps = []
    for k in range(1000):
        prof = simulate_profile(H, 1.0, (0.0, 50.0), table, sampler,
                                seed=33, path_index=k, n_x=11, h_max=1.0)
        if prof.n_jumps == 0:
            continue
        gaps.append(prof.jump_x[:1])
        gaps.append(np.diff(prof.jump_x))
        assert np.all(prof.rho_after > prof.rho_before)
        # interpolated spike rows support jumps of up to three cells
        assert np.all(prof.rho_after - prof.rho_before <= 0.15 + 1e-9)
    gaps = np.concatenate(gaps)
    assert gaps.size > 90000
    ks = ks_sample_vs_cdf(gaps, lambda s: 1.0 - np.exp(-2.0 * s))
    assert ks <= 0.02


def test_profile_pieces_linear_burgers(burgers_table):
    # Burgers curvature is constant, so between jumps the profile is a
    # straight line of slope -1/t and RK4 carries no truncation error
    prof = simulate_profile(quadratic(1.0), 1.0, (0.0, 12.0), burgers_table,
                            empirical_sampler([0.5]), seed=SEED, n_x=2049,
                            floor_mode="rescue")
    assert prof.x_grid[0] == 0.0 and prof.x_grid[-1] == 12.0
    assert prof.rows().shape == (2049, 2)
    assert prof.n_jumps > 3
    assert np.all(np.diff(prof.jump_x) > 0.0)
    gap = prof.rho_after - prof.rho_before
    assert np.all(gap >= burgers_table.jump_cutoff - 1e-12)
    slopes, _ = piece_slopes(prof.x_grid, prof.rho, jump_x=prof.jump_x)
    assert slopes.size >= 3
    assert np.max(np.abs(slopes + 1.0)) < 1e-10
    cuts = np.searchsorted(prof.x_grid, prof.jump_x)
    for a, b in zip(np.r_[0, cuts], np.r_[cuts, prof.x_grid.size]):
        if b - a < 2:
            continue
        line = prof.rho[a] - (prof.x_grid[a:b] - prof.x_grid[a])
        assert np.max(np.abs(prof.rho[a:b] - line)) < 1e-10


def test_profile_is_deterministic(burgers_table):
    kw = dict(seed=SEED, n_x=257, floor_mode="rescue")
    a = simulate_profile(quadratic(1.0), 1.0, (0.0, 6.0), burgers_table,
                         empirical_sampler([0.5]), path_index=3, **kw)
    b = simulate_profile(quadratic(1.0), 1.0, (0.0, 6.0), burgers_table,
                         empirical_sampler([0.5]), path_index=3, **kw)
    c = simulate_profile(quadratic(1.0), 1.0, (0.0, 6.0), burgers_table,
                         empirical_sampler([0.5]), path_index=4, **kw)
    assert np.array_equal(a.rho, b.rho)
    assert np.array_equal(a.jump_x, b.jump_x)
    assert a.lam_integral == b.lam_integral
    assert not np.array_equal(a.jump_x, c.jump_x)


def test_floor_modes():
    # zero rate everywhere: the profile decays straight to the table
    # floor, which must either raise or take the forced jump
    grid = np.linspace(0.0, 1.0, 6)
    n_values = np.zeros((6, 6))
    n_values[0, 4] = 1.0
    n_values[0, 5] = 1.0
    table = KernelTable(t=1.0, rho_grid=grid, n_values=n_values,
                        std_errors=np.zeros_like(n_values),
                        lam=np.zeros(6), jump_cutoff=1e-6)
    H = quadratic(1.0)
    sampler = empirical_sampler([0.9])
    with pytest.raises(TableRangeError):
        simulate_profile(H, 1.0, (0.0, 3.0), table, sampler, seed=SEED,
                         n_x=61)
    prof = simulate_profile(H, 1.0, (0.0, 3.0), table, sampler, seed=SEED,
                            n_x=61, floor_mode="rescue")
    assert prof.floor_rescues >= 1
    assert prof.n_jumps == prof.floor_rescues
    assert np.all(prof.rho_before == 0.0)
    assert np.all(prof.rho_after >= 0.6)
    assert np.all((prof.rho >= 0.0) & (prof.rho <= 1.0))


def test_profile_input_gates(burgers_table):
    H = quadratic(1.0)
    ok = empirical_sampler([0.5])
    with pytest.raises(ConfigError):
        simulate_profile(H, 1.0, (2.0, 1.0), burgers_table, ok)
    with pytest.raises(ConfigError):
        simulate_profile(H, 1.0, (0.0, 1.0), burgers_table, ok, n_x=1)
    with pytest.raises(ConfigError):
        simulate_profile(H, 1.0, (0.0, 1.0), burgers_table, ok,
                         floor_mode="ignore")
    with pytest.raises(TableRangeError):
        simulate_profile(H, 1.0, (0.0, 1.0), burgers_table,
                         empirical_sampler([99.0]))


def test_piece_slopes_split_rules():
    x = np.linspace(0.0, 10.0, 1001)
    rho = -0.5 * x
    rho[x >= 3.0] += 0.3
    rho[x >= 7.0] += 0.3
    for kw in (dict(jump_x=[3.0, 7.0]), dict(), dict(split_gap=0.1)):
        slopes, levels = piece_slopes(x, rho, **kw)
        assert slopes.size == 3
        assert np.max(np.abs(slopes + 0.5)) < 1e-12
        assert np.allclose(levels, [-0.7475, -2.1975, -3.65], atol=1e-6)
    slopes, _ = piece_slopes(x, rho, jump_x=[3.0, 3.02])
    assert slopes.size == 2


def test_profiles_stationary_along_window(burgers_table):
    # after burn-in the law of rho at one position must not depend on
    # the position; pools share paths, so agreement is a strong check
    H = quadratic(1.0)
    sampler = empirical_sampler([0.5])
    pools = {3.8: [], 5.6: [], 7.4: []}
    for k in range(1200):
        prof = simulate_profile(H, 1.0, (0.0, 9.2), burgers_table, sampler,
                                seed=SEED, path_index=k, n_x=281,
                                floor_mode="rescue")
        for pos, pool in pools.items():
            idx = int(np.argmin(np.abs(prof.x_grid - pos)))
            pool.append(float(prof.rho[idx]))
    vals = list(pools.values())
    for i in range(3):
        for j in range(i + 1, 3):
            assert ks_two_sample(vals[i], vals[j]) <= 0.05


def test_compare_with_direct_burgers(burgers_table):
    report = compare_with_direct(quadratic(1.0), 1.0, 300,
                                 GridSpec(-12.0, 12.0, 6000), burgers_table,
                                 seed=21)
    assert report.marginal_ks <= 0.05
    assert report.jump_ks <= 0.07
    assert report.count_ks <= 0.35
    assert 0.9 <= report.rate_ratio <= 1.1
    assert report.direct_slope_dev <= 0.02
    assert report.generator_slope_dev <= 0.02
    assert report.floor_rescues <= 15
    assert report.direct_marginal.size == 900
    assert report.generator_marginal.size == 900
    d_mean = report.direct_counts.mean()
    g_mean = report.generator_counts.mean()
    assert abs(g_mean / d_mean - 1.0) <= 0.1
    assert report.window_length > 0.0


def test_compare_rejects_narrow_table():
    grid = np.linspace(0.9, 1.1, 5)
    table = KernelTable(t=1.0, rho_grid=grid,
                        n_values=np.ones((5, 5)),
                        std_errors=np.zeros((5, 5)),
                        lam=np.ones(5), jump_cutoff=1e-3)
    with pytest.raises(ConfigError):
        compare_with_direct(quadratic(1.0), 1.0, 40,
                            GridSpec(-8.0, 8.0, 2000), table, seed=SEED)
