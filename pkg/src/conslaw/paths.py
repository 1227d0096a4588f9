"""Samplers for every random path the formulas consume.

Two-sided Brownian potentials, Brownian excursions (norm of three bridges),
three-dimensional Bessel bridges, and spectrally positive Levy potentials
with an explicit jump record so truncation can be applied exactly.

All samplers are pure functions of (parameters, seed, stream key): equal
inputs give bit-identical paths no matter how the surrounding code batches
or parallelizes the calls.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .rng import component_stream

# batch size for block generation inside ensemble helpers; part of the
# determinism contract (streams are keyed by block index, not worker)
_BLOCK = 1024


@dataclass(frozen=True)
class GridSpec:
    """Uniform one-dimensional grid on [left, right] with n_steps cells."""

    left: float
    right: float
    n_steps: int

    def __post_init__(self):
        if not (self.left < self.right):
            raise ConfigError("grid needs left < right", field="left")
        if self.n_steps < 1:
            raise ConfigError("grid needs n_steps >= 1", field="n_steps")

    @property
    def step(self):
        return (self.right - self.left) / self.n_steps

    def points(self):
        return np.linspace(self.left, self.right, self.n_steps + 1)

    def index_nearest(self, x):
        k = int(round((x - self.left) / self.step))
        return min(max(k, 0), self.n_steps)


@dataclass(frozen=True)
class GridPath:
    """A sampled path: values on the points of a uniform grid.

    Paths are interpreted piecewise linearly for integral functionals and
    piecewise constant (cadlag) where jump bookkeeping matters.
    """

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n_steps + 1,):
            raise ConfigError("values length must be n_steps + 1", field="values")
        object.__setattr__(self, "values", v)

    def x(self):
        return self.grid.points()


@dataclass(frozen=True)
class LevySpec:
    """Spectrally positive Levy potential: Brownian part + drift + upward jumps."""

    brownian_sigma: float = 1.0
    drift: float = 0.0
    jump_intensity: float = 0.0
    jump_law: str = "exponential"
    jump_params: dict = field(default_factory=lambda: {"mean": 1.0})

    def __post_init__(self):
        if self.brownian_sigma < 0:
            raise ConfigError("brownian_sigma must be >= 0", field="brownian_sigma")
        if self.jump_intensity < 0:
            raise ConfigError("jump_intensity must be >= 0", field="jump_intensity")
        if self.jump_law == "exponential":
            if self.jump_params.get("mean", 0.0) <= 0:
                raise ConfigError("exponential jumps need mean > 0", field="jump_params.mean")
        elif self.jump_law == "pareto":
            if self.jump_params.get("alpha", 0.0) <= 1.0:
                raise ConfigError("pareto jumps need alpha > 1 for finite mean",
                                  field="jump_params.alpha")
            if self.jump_params.get("xmin", 0.0) <= 0:
                raise ConfigError("pareto jumps need xmin > 0", field="jump_params.xmin")
        else:
            raise ConfigError(f"unknown jump_law {self.jump_law!r}", field="jump_law")

    @property
    def abrupt(self):
        # steep one-sided slopes at local maxima need a Brownian component
        return self.brownian_sigma > 0

    def to_dict(self):
        return {
            "brownian_sigma": self.brownian_sigma,
            "drift": self.drift,
            "jump_intensity": self.jump_intensity,
            "jump_law": self.jump_law,
            "jump_params": dict(self.jump_params),
        }

    @staticmethod
    def from_dict(d):
        return LevySpec(
            brownian_sigma=float(d.get("brownian_sigma", 1.0)),
            drift=float(d.get("drift", 0.0)),
            jump_intensity=float(d.get("jump_intensity", 0.0)),
            jump_law=d.get("jump_law", "exponential"),
            jump_params=dict(d.get("jump_params", {"mean": 1.0})),
        )


# -- Brownian potentials ----------------------------------------------------

def sample_two_sided_bm(grid, sigma, seed, path_index=0):
    """Two-sided Brownian potential pinned to 0 at the grid point nearest 0.

    Increments on each grid cell are independent N(0, sigma^2 * step); the
    two sides of the anchor are independent.
    """
    pts = grid.points()
    anchor = int(np.argmin(np.abs(pts)))
    rng = component_stream(seed, "bm", 0, path_index)
    inc = rng.standard_normal(grid.n_steps) * (sigma * np.sqrt(grid.step))
    values = np.empty(grid.n_steps + 1)
    values[anchor] = 0.0
    if anchor < grid.n_steps:
        values[anchor + 1:] = np.cumsum(inc[anchor:])
    if anchor > 0:
        values[:anchor] = -np.cumsum(inc[:anchor][::-1])[::-1]
    return GridPath(grid, values)


def sample_two_sided_bm_batch(grid, sigma, seed, n_paths, first_index=0):
    """Matrix of independent two-sided potentials, one per row.

    Rows are generated in fixed-size blocks with one stream per block, so
    the result is identical however the caller splits the total.
    """
    pts = grid.points()
    anchor = int(np.argmin(np.abs(pts)))
    out = np.empty((n_paths, grid.n_steps + 1))
    scale = sigma * np.sqrt(grid.step)
    for row in range(0, n_paths):
        idx = first_index + row
        block, offset = divmod(idx, _BLOCK)
        if offset == 0 or row == 0:
            rng = component_stream(seed, "bm", 1, block)
            # regenerate the whole block deterministically, keep what we need
            block_inc = rng.standard_normal((_BLOCK, grid.n_steps)) * scale
        inc = block_inc[offset]
        out[row, anchor] = 0.0
        if anchor < grid.n_steps:
            out[row, anchor + 1:] = np.cumsum(inc[anchor:])
        if anchor > 0:
            out[row, :anchor] = -np.cumsum(inc[:anchor][::-1])[::-1]
    return out


def refine_bm_midpoints(path, sigma, seed, level):
    """One Brownian-bridge midpoint refinement of a sampled Brownian path.

    Conditionally on the coarse values, each midpoint is the cell average
    plus N(0, sigma^2 * step/4) noise; the refined path is the same
    realization observed at twice the resolution.
    """
    g = path.grid
    fine = GridSpec(g.left, g.right, 2 * g.n_steps)
    rng = component_stream(seed, "bridge_refine", 0, level)
    mid = 0.5 * (path.values[1:] + path.values[:-1])
    mid = mid + rng.standard_normal(g.n_steps) * (sigma * 0.5 * np.sqrt(g.step))
    values = np.empty(2 * g.n_steps + 1)
    values[0::2] = path.values
    values[1::2] = mid
    return GridPath(fine, values)


# -- excursions and Bessel bridges ------------------------------------------

def _bridges(rng, n_paths, n_steps, length):
    """Brownian bridges 0 -> 0 on [0, length], shape (n_paths, n_steps+1)."""
    inc = rng.standard_normal((n_paths, n_steps)) * np.sqrt(length / n_steps)
    b = np.concatenate([np.zeros((n_paths, 1)), np.cumsum(inc, axis=1)], axis=1)
    frac = np.linspace(0.0, 1.0, n_steps + 1)
    return b - frac * b[:, -1:]


def sample_excursion_std_batch(n_samples, n_steps, seed, first_index=0):
    """Standard Brownian excursions on [0,1]: norm of three bridges.

    Returns an array (n_samples, n_steps+1); endpoints are exactly 0.
    Row i is determined by the global index first_index + i alone, so
    chunked traversals reproduce the one-shot ensemble exactly.
    """
    if first_index % _BLOCK != 0:
        raise ConfigError("first_index must be a multiple of the block size",
                          field="first_index")
    out = np.empty((n_samples, n_steps + 1))
    for start in range(0, n_samples, _BLOCK):
        stop = min(start + _BLOCK, n_samples)
        rng = component_stream(seed, "excursion", 1, (first_index + start) // _BLOCK)
        m = _BLOCK
        b1 = _bridges(rng, m, n_steps, 1.0)
        b2 = _bridges(rng, m, n_steps, 1.0)
        b3 = _bridges(rng, m, n_steps, 1.0)
        out[start:stop] = np.sqrt(b1**2 + b2**2 + b3**2)[: stop - start]
    return out


def sample_excursion(interval, seed, n_steps=256, sample_index=0):
    """Brownian excursion on [y, z], built on [0,1] and rescaled by the
    Brownian scaling e(u) = sqrt(z-y) * e_std((u-y)/(z-y))."""
    y, z = float(interval[0]), float(interval[1])
    if not (y < z):
        raise ConfigError("excursion interval needs y < z", field="interval")
    rng = component_stream(seed, "excursion", 0, sample_index)
    b1 = _bridges(rng, 1, n_steps, 1.0)
    b2 = _bridges(rng, 1, n_steps, 1.0)
    b3 = _bridges(rng, 1, n_steps, 1.0)
    e_std = np.sqrt(b1**2 + b2**2 + b3**2)[0]
    return GridPath(GridSpec(y, z, n_steps), np.sqrt(z - y) * e_std)


def sample_excursion_at_times(times, seed, sample_index=0, n_samples=1):
    """Excursions on [times[0], times[-1]] observed at arbitrary monotone times.

    The three-bridge construction works on any time grid: each component is
    a Brownian path at ``times`` minus the linear interpolant of its final
    value.  Used where a formula integrates the excursion against a
    nonuniform parameterization.  Returns (n_samples, len(times)).
    """
    times = np.asarray(times, dtype=float)
    dt = np.diff(times)
    if np.any(dt <= 0):
        raise ConfigError("times must be strictly increasing", field="times")
    span = times[-1] - times[0]
    frac = (times - times[0]) / span
    frac[-1] = 1.0
    rng = component_stream(seed, "excursion", 0, sample_index)
    sq = np.zeros((n_samples, times.size))
    for _ in range(3):
        inc = rng.standard_normal((n_samples, dt.size)) * np.sqrt(dt)
        b = np.concatenate([np.zeros((n_samples, 1)), np.cumsum(inc, axis=1)], axis=1)
        b = b - frac * b[:, -1:]
        sq += b * b
    return np.sqrt(sq)


def _endpoint_cosines(rng, m, kappa):
    """Cosine of the angle between the two endpoint vectors.

    Conditioning a 3-d Brownian path on its final NORM leaves the final
    direction random, tilted toward the start by exp(kappa cos) with
    kappa = a b / length.  Collinear endpoints would overstate the
    distance from the origin along the path; the mixture is what makes
    the norm a Bessel bridge.
    """
    u = rng.uniform(size=m)
    if kappa < 1e-6:
        return 2.0 * u - 1.0
    c = 1.0 + np.log(np.maximum(u + (1.0 - u) * np.exp(-2.0 * kappa),
                                1e-300)) / kappa
    return np.clip(c, -1.0, 1.0)


def _bessel_bridge_block(rng, m, a, b, n_steps, length, frac):
    if a > 0.0 and b > 0.0:
        cos_t = _endpoint_cosines(rng, m, a * b / length)[:, None]
        sin_t = np.sqrt(np.maximum(1.0 - cos_t * cos_t, 0.0))
        psi = rng.uniform(0.0, 2.0 * np.pi, size=m)[:, None]
        ex = b * cos_t
        ey = b * sin_t * np.cos(psi)
        ez = b * sin_t * np.sin(psi)
    else:
        ex, ey, ez = b, 0.0, 0.0
    c1 = _bridges(rng, m, n_steps, length) + a + (ex - a) * frac
    c2 = _bridges(rng, m, n_steps, length) + ey * frac
    c3 = _bridges(rng, m, n_steps, length) + ez * frac
    return np.sqrt(c1**2 + c2**2 + c3**2)


def sample_bessel3_bridge(a, b, interval, seed, n_steps=256, sample_index=0):
    """Three-dimensional Bessel bridge from a to b on [s, t].

    Norm of a 3-component Brownian bridge from (a,0,0) to an endpoint of
    norm b whose direction carries the exp(ab cos / length) tilt; the
    endpoint values are exactly a and b.
    """
    if a < 0 or b < 0:
        raise ConfigError("Bessel bridge endpoints must be >= 0", field="a")
    s, t = float(interval[0]), float(interval[1])
    length = t - s
    rng = component_stream(seed, "bessel_bridge", 0, sample_index)
    frac = np.linspace(0.0, 1.0, n_steps + 1)
    values = _bessel_bridge_block(rng, 1, a, b, n_steps, length, frac)[0]
    values[0], values[-1] = a, b
    return GridPath(GridSpec(s, t, n_steps), values)


def sample_bessel3_bridge_batch(a, b, interval, n_steps, seed, n_samples):
    """Batch version of sample_bessel3_bridge, shape (n_samples, n_steps+1)."""
    if a < 0 or b < 0:
        raise ConfigError("Bessel bridge endpoints must be >= 0", field="a")
    s, t = float(interval[0]), float(interval[1])
    length = t - s
    frac = np.linspace(0.0, 1.0, n_steps + 1)
    out = np.empty((n_samples, n_steps + 1))
    for start in range(0, n_samples, _BLOCK):
        stop = min(start + _BLOCK, n_samples)
        rng = component_stream(seed, "bessel_bridge", 1, start // _BLOCK)
        block = _bessel_bridge_block(rng, _BLOCK, a, b, n_steps, length, frac)
        out[start:stop] = block[: stop - start]
    out[:, 0], out[:, -1] = a, b
    return out


def excursion_marginal_density(x, t):
    """Density of the standard excursion at interior time t in (0,1):
    2 x^2 / sqrt(2 pi t^3 (1-t)^3) * exp(-x^2 / (2 t (1-t))) for x > 0."""
    x = np.asarray(x, dtype=float)
    v = t * (1.0 - t)
    out = 2.0 * x * x / np.sqrt(2.0 * np.pi * v**3) * np.exp(-x * x / (2.0 * v))
    return np.where(x > 0, out, 0.0)


def bessel3_free_density(y, t):
    """Density at time t of the three-dimensional Bessel process from 0:
    2 y^2 / sqrt(2 pi t^3) * exp(-y^2 / (2 t)) for y > 0."""
    y = np.asarray(y, dtype=float)
    out = 2.0 * y * y / np.sqrt(2.0 * np.pi * t**3) * np.exp(-y * y / (2.0 * t))
    return np.where(y > 0, out, 0.0)


# -- Levy potentials --------------------------------------------------------

@dataclass(frozen=True)
class LevySample:
    """A sampled Levy potential plus the jump record truncation needs."""

    path: GridPath
    jumps: tuple  # of (location, size), all sizes > 0


def _draw_jump_sizes(spec, rng, count):
    if spec.jump_law == "exponential":
        return rng.exponential(spec.jump_params["mean"], size=count)
    alpha, xmin = spec.jump_params["alpha"], spec.jump_params["xmin"]
    return xmin * rng.uniform(size=count) ** (-1.0 / alpha)


def sample_levy(spec, grid, seed, path_index=0):
    """Two-sided spectrally positive Levy potential, anchored at 0.

    Cadlag convention: the value at a grid point includes every jump at or
    before it (moving right); on the negative side a jump at location l
    contributes to values strictly left of l.
    """
    bm = sample_two_sided_bm(grid, spec.brownian_sigma, seed, path_index)
    pts = grid.points()
    values = bm.values + spec.drift * pts

    jump_rng = component_stream(seed, "levy_jumps", 0, path_index)
    jumps = []
    right_len = max(grid.right, 0.0)
    left_len = max(-grid.left, 0.0)
    if spec.jump_intensity > 0 and right_len > 0:
        n = jump_rng.poisson(spec.jump_intensity * right_len)
        locs = np.sort(jump_rng.uniform(0.0, right_len, size=n))
        sizes = _draw_jump_sizes(spec, jump_rng, n)
        for loc, size in zip(locs, sizes):
            values[pts >= loc] += size
            jumps.append((float(loc), float(size)))
    if spec.jump_intensity > 0 and left_len > 0:
        n = jump_rng.poisson(spec.jump_intensity * left_len)
        locs = np.sort(jump_rng.uniform(-left_len, 0.0, size=n))
        sizes = _draw_jump_sizes(spec, jump_rng, n)
        for loc, size in zip(locs, sizes):
            values[pts < loc] -= size
            jumps.append((float(loc), float(size)))
    anchor = int(np.argmin(np.abs(pts)))
    values -= values[anchor]
    return LevySample(GridPath(grid, values), tuple(sorted(jumps)))


def truncate_jumps(path, jump_record, N):
    """Remove every jump of size >= N from a sampled Levy potential.

    Subtracts such jumps from the path to the right of their location and
    adds them back to the left (negative side), exactly undoing how
    sample_levy placed them; the result stays anchored at 0.
    """
    pts = path.grid.points()
    values = path.values.copy()
    for loc, size in jump_record:
        if size < N:
            continue
        if loc >= 0:
            values[pts >= loc] -= size
        else:
            values[pts < loc] += size
    anchor = int(np.argmin(np.abs(pts)))
    values -= values[anchor]
    return GridPath(path.grid, values)
