"""Variational solve of the conservation law from a sampled potential.

The entropy solution at time t comes from the rightmost maximizer y(x) of
y -> U0(y) - t * L((y - x) / t) with L the convex conjugate of the flux;
the density is rho(x, t) = L'((y(x) - x) / t).  Everything here reduces to
one monotone scan over a shared cost table, dispatched to the selected
backend.
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import BACKEND, hopf_lax_scan, rightmost_argmax  # noqa: F401
from .errors import ConfigError, TruncationError
from .hamiltonian import legendre_derivative_vec, legendre_transform_vec
from .paths import GridPath, GridSpec

TIE_TOL = 1e-12


@dataclass(frozen=True)
class SolutionField:
    """Solution sampled on a lattice: positions, value field, maximizers,
    density."""

    x: np.ndarray
    u: np.ndarray
    y: np.ndarray
    rho: np.ndarray

    def __len__(self):
        return self.x.size


def _snap_indices(potential_grid, x_grid):
    """Indices of the x queries on the potential lattice.

    Query positions are snapped to the nearest lattice point; the snapped
    set must stay strictly increasing (x_grid.step at least the lattice
    step), otherwise the scan would see duplicate queries.
    """
    h = potential_grid.step
    xs = x_grid.points()
    idx = np.rint((xs - potential_grid.left) / h).astype(np.int64)
    if idx[0] < 0 or idx[-1] > potential_grid.n_steps:
        raise ConfigError("x grid extends beyond the potential grid", field="x_grid")
    if np.any(np.diff(idx) < 1):
        raise ConfigError("x grid finer than the potential lattice", field="x_grid")
    return idx


def _cost_table(fn, potential_grid, idx):
    """Cost values at every offset (j - k) * h the scan can touch."""
    h = potential_grid.step
    j_min = int(-idx[-1])
    j_max = int(potential_grid.n_steps - idx[0])
    offsets = np.arange(j_min, j_max + 1) * h
    tab = np.asarray(fn(offsets), dtype=float)
    if not np.all(np.isfinite(tab)):
        raise ConfigError("cost table has non-finite entries", field="phi")
    return tab, j_min


def _phi_from_flux(hamiltonian, t, potential_grid, idx):
    if t <= 0:
        raise ConfigError("solve time must be positive", field="t")

    def fn(z):
        return t * legendre_transform_vec(hamiltonian, z / t)

    return _cost_table(fn, potential_grid, idx)


def _check_interior(idx_argmax, n_points, boundary_frac):
    margin = max(1, int(np.ceil(boundary_frac * n_points)))
    lo = int(idx_argmax.min())
    hi = int(idx_argmax.max())
    if lo < margin or hi > n_points - 1 - margin:
        bad = lo if lo < margin else hi
        raise TruncationError(
            "maximizer fell in the outer %.0f%% of the potential grid; "
            "widen the grid" % (100 * boundary_frac),
            argmax_index=int(bad), n_points=int(n_points))


def solve_field(potential, hamiltonian, t, x_grid=None, tie_tol=TIE_TOL,
                boundary_frac=0.01):
    """Entropy solution (u, y, rho) at time t on x_grid.

    x_grid defaults to the middle half of the potential grid.  Raises
    TruncationError if any maximizer lands in the outer boundary_frac of
    the potential grid, since the true maximizer could then lie outside it.
    """
    g = potential.grid
    if x_grid is None:
        quarter = (g.right - g.left) / 4
        n = max(2, g.n_steps // 2)
        x_grid = GridSpec(g.left + quarter, g.right - quarter, n)
    idx = _snap_indices(g, x_grid)
    phi_tab, j_min = _phi_from_flux(hamiltonian, t, g, idx)

    suffix = np.maximum.accumulate(potential.values[::-1])[::-1]
    arg, val = hopf_lax_scan(potential.values, suffix, phi_tab, j_min, idx, tie_tol)
    _check_interior(arg, g.n_steps + 1, boundary_frac)

    x = g.left + idx * g.step
    y = g.left + arg * g.step
    rho = legendre_derivative_vec(hamiltonian, (y - x) / t)
    return SolutionField(x=x, u=val, y=y, rho=rho)


def psi_process(potential, phi, x_grid, tie_tol=TIE_TOL, boundary_frac=0.01):
    """Rightmost maximizer of y -> U0(y) - phi(y - x) along x_grid.

    phi is a convex function spec used directly as the cost.  Returns the
    maximizer positions as a path on the snapped x grid.
    """
    g = potential.grid
    idx = _snap_indices(g, x_grid)
    if phi.family == "tabulated":
        tg = np.asarray(phi.params["grid"])
        span_lo = (-idx[-1]) * g.step
        span_hi = (g.n_steps - idx[0]) * g.step
        if span_lo < tg[0] + phi.shift or span_hi > tg[-1] + phi.shift:
            raise ConfigError("tabulated cost does not cover the offset range",
                              field="phi")
    phi_tab, j_min = _cost_table(phi.value, g, idx)

    suffix = np.maximum.accumulate(potential.values[::-1])[::-1]
    arg, _ = hopf_lax_scan(potential.values, suffix, phi_tab, j_min, idx, tie_tol)
    _check_interior(arg, g.n_steps + 1, boundary_frac)

    y = g.left + arg * g.step
    x0 = g.left + idx[0] * g.step
    x1 = g.left + idx[-1] * g.step
    snapped = GridSpec(x0, x1, len(idx) - 1)
    if abs(snapped.step - (idx[1] - idx[0]) * g.step) > 1e-9 * g.step:
        raise ConfigError("x grid must be uniform on the potential lattice",
                          field="x_grid")
    return GridPath(snapped, y.astype(float))


@dataclass(frozen=True)
class ShockReport:
    """Detected density jumps: location, one-sided values, gap sizes.

    gap is the rise of rho across the lattice cell; lagrangian_gap is the
    jump of the maximizer y across the same cell, the length of the
    Lagrangian cluster the shock has swallowed.
    """

    x: np.ndarray
    rho_left: np.ndarray
    rho_right: np.ndarray
    gap: np.ndarray
    lagrangian_gap: np.ndarray

    @property
    def n_shocks(self):
        return int(self.x.size)


def shock_census(field, min_gap, measure="lagrangian"):
    """Shocks: lattice cells whose chosen gap is at least min_gap.

    measure="lagrangian" thresholds the maximizer jump, the natural scale
    for cluster geometry; measure="density" thresholds the rho rise,
    which is what a jump-kernel cutoff censors.  Either way smooth
    stretches move the field downward by O(step) per site, so any
    min_gap well above the lattice step separates shocks from drift.
    """
    if min_gap <= 0:
        raise ConfigError("min_gap must be positive", field="min_gap")
    if measure not in ("lagrangian", "density"):
        raise ConfigError("measure must be 'lagrangian' or 'density'",
                          field="measure")
    d_rho = np.diff(field.rho)
    d_y = np.diff(field.y)
    hit = np.nonzero((d_y if measure == "lagrangian" else d_rho)
                     >= min_gap)[0]
    return ShockReport(
        x=0.5 * (field.x[hit] + field.x[hit + 1]),
        rho_left=field.rho[hit],
        rho_right=field.rho[hit + 1],
        gap=d_rho[hit],
        lagrangian_gap=d_y[hit],
    )
