"""Refinement and truncation diagnostics for the shock set.

A lattice cannot certify that the shock set of the entropy solution is
discrete; what it can show is falsifiable stability.  Two experiments:
the count of shocks in a fixed window under a fixed gap threshold must
stop moving when the data and query grids are refined together, and
editing large jumps out of the data must stop changing the shock set
once the removal threshold clears the largest jump near the window.

Both experiments hold the underlying realization fixed.  Refinement
observes the same Brownian part at doubled resolution through bridge
midpoints and re-applies the same recorded jumps, so level-to-level
count changes measure resolution alone.  Truncation edits the recorded
jumps of one sample and re-solves.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .paths import (
    GridPath,
    GridSpec,
    refine_bm_midpoints,
    sample_levy,
    sample_two_sided_bm,
    truncate_jumps,
)
from .solver import shock_census, solve_field

_DEFAULT_GRID = GridSpec(-8.0, 8.0, 2048)


def _apply_jumps(bm_values, pts, spec, jumps):
    """Drift plus a fixed jump record on top of a Brownian part.

    Mirrors the cadlag conventions of sample_levy exactly, so assembling
    the level-0 pieces reproduces that sample bit for bit.
    """
    values = bm_values + spec.drift * pts
    for loc, size in jumps:
        if loc >= 0:
            values[pts >= loc] += size
        else:
            values[pts < loc] -= size
    anchor = int(np.argmin(np.abs(pts)))
    return values - values[anchor]


def _window_count(census, window):
    return int(np.count_nonzero(
        (census.x >= window[0]) & (census.x < window[1])))


def _check_window(window, grid):
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ConfigError("window must be increasing", field="window")
    # the solver reports the middle half of the potential grid; a window
    # outside it would census an empty slice and report fake zeros
    x0 = grid.left + 0.25 * (grid.right - grid.left)
    x1 = grid.right - 0.25 * (grid.right - grid.left)
    if lo < x0 or hi > x1:
        raise ConfigError(
            f"window [{lo:g}, {hi:g}] must sit inside the solved region "
            f"[{x0:g}, {x1:g}]", field="window")
    return lo, hi


@dataclass(frozen=True)
class CensusReport:
    """Shock counts per refinement level, one row of counts per replicate."""

    window: tuple
    min_gap: float
    grid_steps: np.ndarray
    counts: np.ndarray

    @property
    def n_levels(self):
        return int(self.grid_steps.size)

    @property
    def mean_counts(self):
        return self.counts.mean(axis=0)

    @property
    def saturation(self):
        """Relative count change between the two finest levels."""
        m = self.mean_counts
        return abs(m[-1] - m[-2]) / max(m[-1], 1e-12)

    def rows(self):
        """(level, grid_step, count) columns, counts averaged over paths."""
        return (np.arange(self.n_levels, dtype=float), self.grid_steps,
                self.mean_counts)


def census_experiment(spec, H, t, window, refinement_levels, seed,
                      base_grid=None, min_gap=0.05, n_paths=20):
    """Shock counts in a window across same-path grid refinements.

    Each replicate samples one Levy potential on the base grid, then
    observes the same realization at doubled resolution per level; the
    query grid refines with it.  min_gap (a maximizer-jump threshold) is
    held fixed, so the count sequence converging is evidence that the
    window holds finitely many shocks above that scale.
    """
    if refinement_levels < 2:
        raise ConfigError("need at least two refinement levels",
                          field="refinement_levels")
    if n_paths < 1:
        raise ConfigError("n_paths must be at least 1", field="n_paths")
    grid = base_grid if base_grid is not None else _DEFAULT_GRID
    window = _check_window(window, grid)
    counts = np.empty((n_paths, refinement_levels), dtype=float)
    steps = np.empty(refinement_levels)
    for k in range(n_paths):
        samp = sample_levy(spec, grid, seed, path_index=k)
        bm = sample_two_sided_bm(grid, spec.brownian_sigma, seed,
                                 path_index=k)
        pot = samp.path
        for lev in range(refinement_levels):
            if lev > 0:
                bm = refine_bm_midpoints(bm, spec.brownian_sigma, seed,
                                         level=k * refinement_levels + lev)
                pot = GridPath(bm.grid, _apply_jumps(
                    bm.values, bm.grid.points(), spec, samp.jumps))
            field = solve_field(pot, H, t)
            census = shock_census(field, min_gap)
            counts[k, lev] = _window_count(census, window)
            steps[lev] = pot.grid.step
    return CensusReport(window=window, min_gap=float(min_gap),
                        grid_steps=steps, counts=counts)


@dataclass(frozen=True)
class TruncationReport:
    """Shock sets of jump-truncated potentials against the untruncated one.

    stabilization_N is the smallest threshold in N_list from which on the
    truncated shock set equals the untruncated set exactly (NaN when the
    list never stabilizes).  max_window_jump is the largest jump located
    inside the window's material span [y(lo-), y(hi)] of the untruncated
    solution: those are the jumps the window's clusters have swallowed,
    and the scale stabilization must match on a realization where their
    removal visibly moves the set.  max_padded_jump (largest jump within
    pad of the window itself) and max_jump (largest anywhere) bound the
    same scale from above.
    """

    window: tuple
    min_gap: float
    pad: float
    N_list: np.ndarray
    counts: np.ndarray
    matches_untruncated: np.ndarray
    untruncated_count: int
    stabilization_N: float
    max_window_jump: float
    max_padded_jump: float
    max_jump: float
    full_x: np.ndarray
    sets_x: tuple

    def rows(self):
        """(N, count, matches) columns for CSV output."""
        return (self.N_list, self.counts.astype(float),
                self.matches_untruncated.astype(float))


def truncation_stability(spec, H, t, window, N_list, seed, base_grid=None,
                         min_gap=0.05, path_index=0, pad=3.0):
    """Shock sets of one realization with jumps of size >= N removed.

    The jump record of the sample is edited directly, so each truncated
    potential is the same path with some jumps missing, solved on the
    same lattice: set comparisons are exact, not tolerance-based.
    """
    N_arr = np.asarray(N_list, dtype=float)
    if N_arr.size < 1 or np.any(np.diff(N_arr) <= 0.0):
        raise ConfigError("N_list must be strictly increasing",
                          field="N_list")
    if np.any(N_arr <= 0.0):
        raise ConfigError("N_list entries must be positive", field="N_list")
    grid = base_grid if base_grid is not None else _DEFAULT_GRID
    window = _check_window(window, grid)

    samp = sample_levy(spec, grid, seed, path_index=path_index)
    lo, hi = window

    def window_set(path):
        census = shock_census(solve_field(path, H, t), min_gap)
        keep = (census.x >= lo) & (census.x < hi)
        return census.x[keep]

    field_full = solve_field(samp.path, H, t)
    census_full = shock_census(field_full, min_gap)
    keep = (census_full.x >= lo) & (census_full.x < hi)
    full_x = census_full.x[keep]

    # Material span of the window: every jump in [y(lo-), y(hi)] has been
    # swallowed by clusters whose shocks can land in the window.
    il = max(np.searchsorted(field_full.x, lo, side="right") - 1, 0)
    ir = min(np.searchsorted(field_full.x, hi, side="left"),
             field_full.x.size - 1)
    y_lo, y_hi = field_full.y[il], field_full.y[ir]
    sets = []
    matches = np.empty(N_arr.size, dtype=bool)
    for i, N in enumerate(N_arr):
        xs = window_set(truncate_jumps(samp.path, samp.jumps, N))
        sets.append(xs)
        matches[i] = np.array_equal(xs, full_x)

    stabilization = math.nan
    for i in range(N_arr.size):
        if matches[i:].all():
            stabilization = float(N_arr[i])
            break
    padded = [size for loc, size in samp.jumps if lo - pad <= loc <= hi + pad]
    spanned = [size for loc, size in samp.jumps if y_lo <= loc <= y_hi]
    return TruncationReport(
        window=window, min_gap=float(min_gap), pad=float(pad), N_list=N_arr,
        counts=np.array([s.size for s in sets]),
        matches_untruncated=matches,
        untruncated_count=int(full_x.size),
        stabilization_N=stabilization,
        max_window_jump=max(spanned, default=0.0),
        max_padded_jump=max(padded, default=0.0),
        max_jump=max((size for _, size in samp.jumps), default=0.0),
        full_x=full_x, sets_x=tuple(sets))
