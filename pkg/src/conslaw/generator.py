"""Jump-drift simulation of the density profile and its field-level check.

Read in x, the density of the entropy solution is a Markov process:
deterministic decay d rho / dx = -1/(t H''(rho)) between events, and
upward jumps whose kernel n(rho-, rho+, t) this package tabulates from
excursion functionals.  simulate_profile integrates exactly that
description, alternating RK4 pieces with jump events thinned against a
cell-wise rate envelope.  compare_with_direct runs the simulation next
to variational solves of independent random fields and reports the
statistical distance between the two pipelines: if the tabulated
generator is right, profiles from both routes are draws from the same
law.

Rate lookups interpolate the table's lam column; jump targets come from
the interpolated kernel row restricted to sizes above the table's
cutoff, so both pipelines must share that cutoff to be comparable.  The
row scale cancels in the target draw, which keeps targets usable even
where the row's common density-factor denominator carries visible Monte
Carlo noise.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, TableRangeError
from .rng import component_stream
from .stats import ks_two_sample

_ENVELOPE_PAD = 1.1   # headroom over the cell-max rate during thinning
_RK4_H_MAX = 0.05     # drift integration step cap between events


def drift_b(H, rho, t):
    """Deterministic decay rate -1/(t H''(rho)) of the profile in x."""
    if t <= 0:
        raise ConfigError("t must be positive", field="t")
    h2 = np.asarray(H.second_derivative(rho), dtype=float)
    if np.any(h2 <= 0.0):
        raise DomainError("flux curvature must be positive on the visited range")
    out = -1.0 / (t * h2)
    return float(out) if np.ndim(rho) == 0 else out


@dataclass(frozen=True)
class ProfileSample:
    """One simulated profile: lattice values plus the event list.

    lam_integral accumulates the interpolated rate along the whole path,
    so observed events / lam_integral is the thinning self-check;
    floor_rescues counts forced jumps taken at the table floor.
    """

    t: float
    x_grid: np.ndarray
    rho: np.ndarray
    jump_x: np.ndarray
    rho_before: np.ndarray
    rho_after: np.ndarray
    lam_integral: float
    floor_rescues: int

    @property
    def n_jumps(self):
        return int(self.jump_x.size)

    def rows(self):
        """(x, rho) columns for CSV output."""
        return np.column_stack([self.x_grid, self.rho])


def empirical_sampler(pool):
    """Initial-value sampler drawing uniformly from a pooled marginal."""
    pool = np.asarray(pool, dtype=float)
    if pool.size == 0:
        raise ConfigError("empirical pool is empty", field="pool")

    def draw(rng):
        return float(pool[rng.integers(pool.size)])

    return draw


def _rk4(H, t, rho, h):
    k1 = drift_b(H, rho, t)
    k2 = drift_b(H, rho + 0.5 * h * k1, t)
    k3 = drift_b(H, rho + 0.5 * h * k2, t)
    k4 = drift_b(H, rho + h * k3, t)
    return rho + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _lam_at(table, rho):
    return float(np.interp(rho, table.rho_grid, table.lam))


def _draw_target(table, rho_minus, u):
    """Jump destination from the interpolated kernel row above the cutoff.

    The row is piecewise linear between column nodes, so its CDF is
    piecewise quadratic and inverts in closed form per cell.
    """
    g = table.rho_grid
    i = int(np.searchsorted(g, rho_minus, side="right")) - 1
    i = min(max(i, 0), g.size - 2)
    w = (rho_minus - g[i]) / (g[i + 1] - g[i])
    row = (1.0 - w) * table.n_values[i] + w * table.n_values[i + 1]
    lo = rho_minus + table.jump_cutoff
    if lo >= g[-1]:
        raise TableRangeError(
            f"no kernel support above rho = {rho_minus:.4g} within the table")
    k = int(np.searchsorted(g, lo, side="right"))
    z = np.concatenate([[lo], g[k:]])
    r = np.clip(np.concatenate([[np.interp(lo, g, row)], row[k:]]), 0.0, None)
    cum = np.concatenate(
        [[0.0], np.cumsum(0.5 * (r[1:] + r[:-1]) * np.diff(z))])
    total = float(cum[-1])
    if total <= 0.0:
        raise TableRangeError(
            f"kernel row at rho = {rho_minus:.4g} has no mass above the cutoff")
    s = u * total
    c = min(int(np.searchsorted(cum, s, side="right")) - 1, z.size - 2)
    a0 = r[c]
    dz = z[c + 1] - z[c]
    slope = (r[c + 1] - a0) / dz
    rem = s - cum[c]
    if abs(slope) * dz < 1e-12 * max(a0, 1e-300):
        xi = rem / max(a0, 1e-300)
    else:
        disc = max(a0 * a0 + 2.0 * slope * rem, 0.0)
        xi = (math.sqrt(disc) - a0) / slope
    return float(z[c] + min(max(xi, 0.0), dz))


def simulate_profile(H, t, x_range, kernel, rho0_sampler, seed=0,
                     path_index=0, n_x=1025, h_max=_RK4_H_MAX,
                     floor_mode="error"):
    """Drift-jump profile on x_range driven by a tabulated kernel.

    Alternates RK4 integration of the decay ODE with jump events from
    thinning: within each rho cell of the table the proposal rate is the
    cell-max lam times a 1.1 pad, and proposals are accepted with the
    ratio of the interpolated rate to that envelope.  Jumps below the
    table's cutoff do not occur at all; the comparison pipeline applies
    the same cutoff on the variational side.

    floor_mode says what to do when decay reaches the bottom of the
    table: "error" raises TableRangeError; "rescue" takes an immediate
    jump from the floor row.  Rescue is the physically sensible choice
    when the floor sits where the true rate is already enormous (the
    rate grows without bound downward, so penetration below such a floor
    is exponentially brief); it is opt-in because it silently alters the
    dynamics when the table is cut too high.
    """
    if floor_mode not in ("error", "rescue"):
        raise ConfigError("floor_mode must be 'error' or 'rescue'",
                          field="floor_mode")
    if n_x < 2:
        raise ConfigError("n_x must be at least 2", field="n_x")
    x0, x1 = float(x_range[0]), float(x_range[1])
    if not x1 > x0:
        raise ConfigError("x_range must be increasing", field="x_range")
    g = kernel.rho_grid
    lam = kernel.lam
    rng = component_stream(seed, "profile", path_index)

    rho = float(rho0_sampler(rng))
    if not (g[0] <= rho <= g[-1]):
        raise TableRangeError(
            f"initial value {rho:.4g} outside table coverage "
            f"[{g[0]:.4g}, {g[-1]:.4g}]")

    x_grid = np.linspace(x0, x1, n_x)
    out = np.empty(n_x)
    out[0] = rho
    node = 1
    jx, jb, ja = [], [], []
    lam_int = 0.0
    floor_rescues = 0
    x = x0
    x_tol = 1e-12 * max(1.0, abs(x0), abs(x1))

    def advance(target):
        """RK4 toward target, recording nodes, stopping at a cell floor.

        Returns (reached_target, cell_floor).  Crossing detection snaps
        rho exactly onto the floor node so the caller re-enters with a
        clean cell assignment.
        """
        nonlocal x, rho, node, lam_int
        i = int(np.searchsorted(g, rho, side="left")) - 1
        floor = g[i] if i >= 0 else None
        while x < target - x_tol:
            h = min(h_max, target - x)
            hit_node = node < n_x and x_grid[node] <= x + h + x_tol
            if hit_node:
                h = x_grid[node] - x
            if h <= x_tol and hit_node:
                out[node] = rho
                node += 1
                continue
            nxt = _rk4(H, t, rho, h)
            if floor is not None and nxt < floor:
                hs = h * (rho - floor) / (rho - nxt)
                for _ in range(3):
                    r = _rk4(H, t, rho, hs)
                    dr = r - floor
                    if abs(dr) < 1e-13 * max(1.0, abs(floor)):
                        break
                    hs -= dr / drift_b(H, r, t)
                hs = min(max(hs, 0.0), h)
                lam_int += 0.5 * (_lam_at(kernel, rho) + lam[i]) * hs
                x += hs
                rho = float(floor)
                return False, True
            lam_int += 0.5 * (_lam_at(kernel, rho) + _lam_at(kernel, nxt)) * h
            x += h
            rho = float(nxt)
            if hit_node:
                x = float(x_grid[node])
                out[node] = rho
                node += 1
        return True, False

    while x < x1 - x_tol:
        i = int(np.searchsorted(g, rho, side="left")) - 1
        if i < 0:
            if floor_mode == "rescue":
                target = _draw_target(kernel, rho, rng.random())
                jx.append(x)
                jb.append(rho)
                ja.append(target)
                floor_rescues += 1
                rho = target
                continue
            raise TableRangeError(
                f"profile left table coverage at x = {x:.4g} "
                f"(rho = {rho:.4g})")
        lam_hi = _ENVELOPE_PAD * max(lam[i], lam[i + 1])
        if lam_hi <= 0.0:
            # dead zone: no jump can fire until rho decays out of it
            advance(x1)
            continue
        d = rng.exponential(1.0 / lam_hi)
        reached, crossed = advance(min(x + d, x1))
        if crossed or x >= x1 - x_tol:
            continue
        if rng.random() * lam_hi <= _lam_at(kernel, rho):
            target = _draw_target(kernel, rho, rng.random())
            if not target > rho:
                raise TableRangeError(
                    f"jump draw failed to move upward at rho = {rho:.4g}")
            jx.append(x)
            jb.append(rho)
            ja.append(target)
            rho = target

    if node < n_x:
        out[node:] = rho
    return ProfileSample(
        t=float(t), x_grid=x_grid, rho=out, jump_x=np.array(jx),
        rho_before=np.array(jb), rho_after=np.array(ja),
        lam_integral=float(lam_int), floor_rescues=floor_rescues)


def piece_slopes(x, rho, jump_x=None, split_gap=None, min_nodes=5):
    """Least-squares slope and mean level of each smooth piece.

    Pieces are delimited by the known event positions when given,
    otherwise by lattice intervals where the density fails to fall by at
    least half the typical drift step (split_gap=None; the median
    interval change estimates that step).  Arbitrarily small upward
    jumps ride inside a field's lattice intervals, so a fixed threshold
    far above the drift step would let them tilt fitted slopes.  An
    explicit split_gap reverts to the plain rise-above-threshold rule.
    Pieces shorter than min_nodes are skipped.  Returns (slopes,
    levels); the expected slope of a piece at level r is -1/(t H''(r)).
    """
    x = np.asarray(x, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if jump_x is not None:
        cuts = np.searchsorted(x, np.asarray(jump_x, dtype=float))
    elif split_gap is None:
        d = np.diff(rho)
        cuts = np.nonzero(d > 0.5 * np.median(d))[0] + 1
    else:
        cuts = np.nonzero(np.diff(rho) > split_gap)[0] + 1
    bounds = np.concatenate([[0], cuts, [x.size]])
    slopes = []
    levels = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        if b - a < min_nodes:
            continue
        xs = x[a:b]
        ys = rho[a:b]
        xm = xs - xs.mean()
        slopes.append(float(np.dot(xm, ys - ys.mean()) / np.dot(xm, xm)))
        levels.append(float(ys.mean()))
    return np.array(slopes), np.array(levels)


@dataclass(frozen=True)
class GeneratorComparison:
    """Cross-pipeline statistics: simulated generator vs variational solves."""

    t: float
    n_paths: int
    window_length: float
    jump_cutoff: float
    marginal_ks: float
    jump_ks: float
    count_ks: float
    rate_ratio: float
    floor_rescues: int
    direct_slope_dev: float
    generator_slope_dev: float
    direct_marginal: np.ndarray
    generator_marginal: np.ndarray
    direct_jumps: np.ndarray
    generator_jumps: np.ndarray
    direct_counts: np.ndarray
    generator_counts: np.ndarray


def compare_with_direct(H, t, n_paths, potential_grid, kernel, seed=0,
                        sigma=1.0, burn_in=2.0, n_x=1025, slope_paths=200):
    """Statistical comparison of the two profile pipelines.

    Direct side: n_paths independent potentials solved variationally;
    the one-point marginal is read at three decorrelated positions per
    window, jumps come from a census at the shared cutoff.  Generator
    side: n_paths profiles started from a marginal pool bootstrapped
    off a separate batch of direct solves, harvested at the matching
    relative positions after a burn-in that forgets the bootstrap.
    Reports two-sample KS distances (marginal, jump sizes, jumps per
    window), the thinning rate self-check, and the worst smooth-piece
    slope deviation from -1/(t H'') on each side.
    """
    from .paths import sample_two_sided_bm
    from .solver import shock_census, solve_field

    if n_paths < 2:
        raise ConfigError("n_paths must be at least 2", field="n_paths")
    fracs = (0.25, 0.5, 0.75)
    marg_d, jumps_d, counts_d = [], [], []
    dev_d = 0.0
    window = None
    for k in range(n_paths):
        pot = sample_two_sided_bm(potential_grid, sigma, seed, path_index=k)
        field = solve_field(pot, H, t)
        if window is None:
            window = float(field.x[-1] - field.x[0])
        for fr in fracs:
            idx = int(np.argmin(np.abs(field.x - (field.x[0] + fr * window))))
            marg_d.append(float(field.rho[idx]))
        census = shock_census(field, min_gap=kernel.jump_cutoff,
                              measure="density")
        jumps_d.extend(census.gap.tolist())
        counts_d.append(census.n_shocks)
        if k < slope_paths:
            sl, lev = piece_slopes(field.x, field.rho)
            if sl.size:
                ref = -1.0 / (
                    t * np.asarray(H.second_derivative(lev), dtype=float))
                dev_d = max(dev_d, float(np.max(np.abs(sl / ref - 1.0))))

    boot = []
    for k in range(n_paths):
        pot = sample_two_sided_bm(potential_grid, sigma, seed,
                                  path_index=5000 + k)
        field = solve_field(pot, H, t)
        idx = int(np.argmin(np.abs(field.x - 0.5 * (field.x[0] + field.x[-1]))))
        boot.append(float(field.rho[idx]))
    boot = np.asarray(boot)
    g = kernel.rho_grid
    inside = boot[(boot >= g[0]) & (boot <= g[-1])]
    if inside.size < boot.size // 2:
        raise ConfigError("kernel table covers under half of the direct "
                          "marginal; widen rho_grid", field="kernel")
    sampler = empirical_sampler(inside)

    marg_g, jumps_g, counts_g = [], [], []
    dev_g = 0.0
    events = 0
    lam_total = 0.0
    rescues = 0
    for k in range(n_paths):
        prof = simulate_profile(H, t, (0.0, burn_in + window), kernel,
                                sampler, seed=seed, path_index=k, n_x=n_x,
                                floor_mode="rescue")
        for fr in fracs:
            idx = int(np.argmin(np.abs(prof.x_grid - (burn_in + fr * window))))
            marg_g.append(float(prof.rho[idx]))
        keep = prof.jump_x >= burn_in
        jumps_g.extend((prof.rho_after[keep] - prof.rho_before[keep]).tolist())
        counts_g.append(int(np.count_nonzero(keep)))
        events += prof.n_jumps
        lam_total += prof.lam_integral
        rescues += prof.floor_rescues
        if k < slope_paths:
            sl, lev = piece_slopes(prof.x_grid, prof.rho, jump_x=prof.jump_x)
            if sl.size:
                ref = -1.0 / (
                    t * np.asarray(H.second_derivative(lev), dtype=float))
                dev_g = max(dev_g, float(np.max(np.abs(sl / ref - 1.0))))

    return GeneratorComparison(
        t=float(t), n_paths=n_paths, window_length=window,
        jump_cutoff=float(kernel.jump_cutoff),
        marginal_ks=ks_two_sample(marg_d, marg_g),
        jump_ks=ks_two_sample(jumps_d, jumps_g),
        count_ks=ks_two_sample(counts_d, counts_g),
        rate_ratio=events / lam_total if lam_total > 0 else math.inf,
        floor_rescues=rescues,
        direct_slope_dev=dev_d, generator_slope_dev=dev_g,
        direct_marginal=np.asarray(marg_d),
        generator_marginal=np.asarray(marg_g),
        direct_jumps=np.asarray(jumps_d),
        generator_jumps=np.asarray(jumps_g),
        direct_counts=np.asarray(counts_d, dtype=float),
        generator_counts=np.asarray(counts_g, dtype=float))
