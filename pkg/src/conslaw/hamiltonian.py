"""Strictly convex functions with derivatives and Legendre transforms.

One type, ``ConvexFunctionSpec``, plays every convex role in the toolkit:
the flux function of the conservation law, the drift subtracted from the
noise in the variational problems, and the convex dual connecting the two.
Presets carry closed-form values, derivatives, and duals; tabulated input
falls back to interpolation plus search, and is validated rather than
trusted.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError, RangeError

_FAMILIES = ("quadratic", "quartic", "power", "cosh", "tabulated")


@dataclass(frozen=True)
class ConvexFunctionSpec:
    """A strictly convex, superlinear function F(x) = scale * base(x - shift).

    Parameters
    ----------
    family : str
        One of ``quadratic`` (a*x^2/2), ``quartic`` (a*x^4/4),
        ``power`` (a*|x|^p/p, p > 1), ``cosh`` (a*(cosh x - 1)), or
        ``tabulated`` (values on a uniform grid).
    params : dict
        Family parameters; see each ``_base_*`` evaluator.
    shift, scale : float
        Affine reparameterization of the argument and the value.

    Notes
    -----
    Tabulated specs interpolate the derivative linearly between grid nodes
    and integrate it exactly for values, so value and derivatives are
    mutually consistent by construction; node values are reproduced to
    second order in the table step, not exactly.
    """

    family: str
    params: dict = field(default_factory=dict)
    shift: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}", field="family")
        if not (self.scale > 0.0):
            raise ConfigError("scale must be positive", field="scale")
        p = self.params
        if self.family in ("quadratic", "quartic", "cosh"):
            if p.get("a", 0.0) <= 0.0:
                raise ConfigError(f"{self.family} needs a > 0", field="params.a")
        elif self.family == "power":
            if p.get("a", 0.0) <= 0.0:
                raise ConfigError("power needs a > 0", field="params.a")
            if p.get("p", 0.0) <= 1.0:
                raise ConfigError("power needs exponent p > 1", field="params.p")
        elif self.family == "tabulated":
            grid = np.asarray(p.get("grid", ()), dtype=float)
            values = np.asarray(p.get("values", ()), dtype=float)
            if grid.size < 3 or grid.size != values.size:
                raise ConfigError("tabulated needs matching grid/values, length >= 3",
                                  field="params.grid")
            steps = np.diff(grid)
            if not np.all(steps > 0) or not np.allclose(steps, steps[0], rtol=1e-9):
                raise ConfigError("tabulated grid must be uniform increasing",
                                  field="params.grid")
            # frozen dataclass: stash derived arrays via object.__setattr__
            d = np.gradient(values, grid)
            object.__setattr__(self, "_tab_grid", grid)
            object.__setattr__(self, "_tab_deriv", d)
            object.__setattr__(self, "_tab_step", float(steps[0]))
            v0 = float(values[0])
            cum = v0 + np.concatenate(
                [[0.0], np.cumsum(0.5 * steps * (d[1:] + d[:-1]))])
            object.__setattr__(self, "_tab_value", cum)

    # -- evaluation ---------------------------------------------------------

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return self.scale * self._base_value(x - self.shift)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        return self.scale * self._base_derivative(x - self.shift)

    def second_derivative(self, x):
        x = np.asarray(x, dtype=float)
        return self.scale * self._base_second(x - self.shift)

    def _base_value(self, w):
        f, p = self.family, self.params
        if f == "quadratic":
            return 0.5 * p["a"] * w * w
        if f == "quartic":
            return 0.25 * p["a"] * w ** 4
        if f == "power":
            return p["a"] * np.abs(w) ** p["p"] / p["p"]
        if f == "cosh":
            return p["a"] * (np.cosh(w) - 1.0)
        return self._tab_interp_value(w)

    def _base_derivative(self, w):
        f, p = self.family, self.params
        if f == "quadratic":
            return p["a"] * w
        if f == "quartic":
            return p["a"] * w ** 3
        if f == "power":
            return p["a"] * np.sign(w) * np.abs(w) ** (p["p"] - 1.0)
        if f == "cosh":
            return p["a"] * np.sinh(w)
        return np.interp(w, self._tab_grid, self._tab_deriv)

    def _base_second(self, w):
        f, p = self.family, self.params
        if f == "quadratic":
            return np.full_like(np.asarray(w, dtype=float), p["a"])
        if f == "quartic":
            return 3.0 * p["a"] * w * w
        if f == "power":
            return p["a"] * (p["p"] - 1.0) * np.abs(w) ** (p["p"] - 2.0)
        if f == "cosh":
            return p["a"] * np.cosh(w)
        # slope of the piecewise-linear derivative on each cell
        g, d = self._tab_grid, self._tab_deriv
        idx = np.clip(np.searchsorted(g, w, side="right") - 1, 0, g.size - 2)
        return (d[idx + 1] - d[idx]) / self._tab_step

    def _tab_interp_value(self, w):
        g, d, v = self._tab_grid, self._tab_deriv, self._tab_value
        w = np.asarray(w, dtype=float)
        idx = np.clip(np.searchsorted(g, w, side="right") - 1, 0, g.size - 2)
        dw = w - g[idx]
        slope = (d[idx + 1] - d[idx]) / self._tab_step
        return v[idx] + d[idx] * dw + 0.5 * slope * dw * dw

    # -- structure ----------------------------------------------------------

    def reflected(self):
        """The spec of x -> F(-x).  All preset bases are even, so only the
        shift flips; a tabulated base reverses its arrays."""
        if self.family == "tabulated":
            g = self._tab_grid
            v = np.asarray(self.params["values"], dtype=float)
            return ConvexFunctionSpec(
                "tabulated",
                {"grid": list(-g[::-1]), "values": list(v[::-1])},
                shift=-self.shift,
                scale=self.scale,
            )
        return ConvexFunctionSpec(self.family, dict(self.params),
                                  shift=-self.shift, scale=self.scale)

    def __eq__(self, other):
        if not isinstance(other, ConvexFunctionSpec):
            return NotImplemented
        if (self.family, self.shift, self.scale) != (other.family, other.shift, other.scale):
            return False
        if self.family == "tabulated":
            return (np.array_equal(self.params["grid"], other.params["grid"])
                    and np.array_equal(self.params["values"], other.params["values"]))
        return self.params == other.params

    def to_dict(self):
        params = dict(self.params)
        if self.family == "tabulated":
            params = {"grid": list(map(float, params["grid"])),
                      "values": list(map(float, params["values"]))}
        return {"family": self.family, "params": params,
                "shift": self.shift, "scale": self.scale}

    @staticmethod
    def from_dict(d):
        return ConvexFunctionSpec(d["family"], dict(d.get("params", {})),
                                  shift=float(d.get("shift", 0.0)),
                                  scale=float(d.get("scale", 1.0)))


def quadratic(a=1.0, shift=0.0, scale=1.0):
    return ConvexFunctionSpec("quadratic", {"a": float(a)}, shift, scale)


def quartic(a=1.0, shift=0.0, scale=1.0):
    return ConvexFunctionSpec("quartic", {"a": float(a)}, shift, scale)


def power(p, a=1.0, shift=0.0, scale=1.0):
    return ConvexFunctionSpec("power", {"p": float(p), "a": float(a)}, shift, scale)


def cosh_spec(a=1.0, shift=0.0, scale=1.0):
    return ConvexFunctionSpec("cosh", {"a": float(a)}, shift, scale)


def tabulated(grid, values):
    return ConvexFunctionSpec("tabulated",
                              {"grid": list(map(float, grid)),
                               "values": list(map(float, values))})


# -- Legendre transform -----------------------------------------------------

def legendre_transform(H, q):
    """L(q) = max_p (q*p - H(p)).

    Closed form for every preset family; ternary search over the table for
    tabulated input, raising DomainError if the maximizer sits on the table
    boundary (the true maximizer would lie outside and extrapolation would
    silently corrupt downstream solvers).
    """
    q = float(q)
    # F(x) = s*B(x-c):  L_F(q) = q*c + s*L_B(q/s)
    c, s = H.shift, H.scale
    w = q / s
    f, p = H.family, H.params
    if f == "quadratic":
        lb = 0.5 * w * w / p["a"]
    elif f == "quartic":
        lb = 0.75 * p["a"] ** (-1.0 / 3.0) * abs(w) ** (4.0 / 3.0)
    elif f == "power":
        pe = p["p"]
        conj = pe / (pe - 1.0)
        lb = p["a"] ** (-1.0 / (pe - 1.0)) * abs(w) ** conj / conj
    elif f == "cosh":
        a = p["a"]
        lb = w * math.asinh(w / a) - a * (math.hypot(1.0, w / a) - 1.0)
    else:
        return _legendre_tabulated(H, q)
    return q * c + s * lb


def legendre_transform_vec(H, q):
    """Vectorized L(q): closed forms broadcast, tables fall back to a loop."""
    q = np.asarray(q, dtype=float)
    c, s = H.shift, H.scale
    w = q / s
    f, p = H.family, H.params
    if f == "quadratic":
        lb = 0.5 * w * w / p["a"]
    elif f == "quartic":
        lb = 0.75 * p["a"] ** (-1.0 / 3.0) * np.abs(w) ** (4.0 / 3.0)
    elif f == "power":
        pe = p["p"]
        conj = pe / (pe - 1.0)
        lb = p["a"] ** (-1.0 / (pe - 1.0)) * np.abs(w) ** conj / conj
    elif f == "cosh":
        a = p["a"]
        lb = w * np.arcsinh(w / a) - a * (np.hypot(1.0, w / a) - 1.0)
    else:
        return np.array([_legendre_tabulated(H, float(v)) for v in q.ravel()]
                        ).reshape(q.shape)
    return q * c + s * lb


def _legendre_tabulated(H, q):
    g = H._tab_grid + H.shift
    obj = q * g - H.value(g)
    lo, hi = 0, g.size - 1
    # ternary search: p -> q*p - H(p) is strictly concave
    while hi - lo > 2:
        m1 = lo + (hi - lo) // 3
        m2 = hi - (hi - lo) // 3
        if obj[m1] < obj[m2]:
            lo = m1 + 1
        else:
            hi = m2 - 1
    k = lo + int(np.argmax(obj[lo:hi + 1]))
    if k == 0 or k == g.size - 1:
        raise DomainError(
            f"Legendre maximizer for q={q} at tabulated boundary; table too narrow")
    return float(obj[k])


def legendre_derivative(H, q):
    """(H')^{-1}(q), the derivative of the Legendre transform of H.

    Presets invert their closed-form derivative; tabulated input bisects
    the interpolated derivative to absolute tolerance 1e-10.
    """
    q = float(q)
    c, s = H.shift, H.scale
    w = q / s
    f, p = H.family, H.params
    if f == "quadratic":
        return c + w / p["a"]
    if f == "quartic":
        return c + math.copysign(abs(w / p["a"]) ** (1.0 / 3.0), w)
    if f == "power":
        return c + math.copysign(abs(w / p["a"]) ** (1.0 / (p["p"] - 1.0)), w)
    if f == "cosh":
        return c + math.asinh(w / p["a"])
    return _inverse_derivative_tabulated(H, q)


def legendre_derivative_vec(H, q):
    """Vectorized (H')^{-1} over an array of q values."""
    q = np.asarray(q, dtype=float)
    c, s = H.shift, H.scale
    w = q / s
    f, p = H.family, H.params
    if f == "quadratic":
        return c + w / p["a"]
    if f == "quartic":
        return c + np.sign(w) * np.abs(w / p["a"]) ** (1.0 / 3.0)
    if f == "power":
        return c + np.sign(w) * np.abs(w / p["a"]) ** (1.0 / (p["p"] - 1.0))
    if f == "cosh":
        return c + np.arcsinh(w / p["a"])
    return np.array([_inverse_derivative_tabulated(H, float(qi)) for qi in np.atleast_1d(q)])


def _inverse_derivative_tabulated(H, q):
    g = H._tab_grid + H.shift
    d = H.scale * H._tab_deriv
    if not (d[0] <= q <= d[-1]):
        raise RangeError(f"q={q} outside derivative range [{d[0]}, {d[-1]}] of table")
    lo, hi = float(g[0]), float(g[-1])
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if float(np.interp(mid, g, d)) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# -- validation -------------------------------------------------------------

@dataclass
class ConvexityReport:
    min_second_derivative: float
    min_location: float
    superlinearity_ratios: dict
    passed: bool


def validate_convexity(F, interval, n_probes=100):
    """Probe strict convexity and superlinear growth of ``F`` on ``interval``.

    Returns a report; passing means the minimum probed second derivative is
    strictly positive.  Superlinearity is reported as the growth of
    F(x)/|x| from the interval endpoints out to |x| = 1e3 on each side.
    """
    if n_probes < 2:
        raise ConfigError("n_probes must be >= 2", field="n_probes")
    lo, hi = float(interval[0]), float(interval[1])
    probes = np.linspace(lo, hi, int(n_probes))
    sec = np.asarray(F.second_derivative(probes), dtype=float)
    k = int(np.argmin(sec))
    ratios = {}
    for side, x_end in (("left", lo), ("right", hi)):
        sign = -1.0 if side == "left" else 1.0
        xs = [x for x in (abs(x_end), 10.0, 100.0, 1000.0) if x > 0]
        if F.family == "tabulated":
            # cannot probe beyond the table
            xs = [x for x in xs if sign * x >= F._tab_grid[0] + F.shift
                  and sign * x <= F._tab_grid[-1] + F.shift]
        ratios[side] = [float(F.value(sign * x) / x) for x in xs if x > 0]
    passed = bool(sec[k] > 0.0)
    return ConvexityReport(float(sec[k]), float(probes[k]), ratios, passed)


# -- derived convex objects -------------------------------------------------

def phi_from_hamiltonian(H, t, grid_range=None, n_grid=4001):
    """The drift t*L(z/t) induced by flux H at time t, as a spec.

    For quadratic/quartic/power flux the result is again a preset (the
    power family is closed under duality and the time rescaling); for cosh
    or tabulated flux a tabulated spec is built on ``grid_range``.
    """
    if t <= 0:
        raise DomainError("t must be positive")
    c, s = H.shift, H.scale
    f, p = H.family, H.params
    if c == 0.0 and f in ("quadratic", "quartic", "power"):
        if f == "quadratic":
            # L(q) = q^2/(2 a s); t L(z/t) = z^2/(2 a s t)
            return quadratic(a=1.0 / (p["a"] * s * t))
        # quartic a*x^4/4 is power(4, a); effective F(x) = A|x|^pe/pe with A = s*a
        pe = 4.0 if f == "quartic" else p["p"]
        conj = pe / (pe - 1.0)
        A = s * p["a"]
        # L(q) = A^{-1/(pe-1)}|q|^conj/conj, so t L(z/t) is again a power spec
        return power(p=conj, a=A ** (-1.0 / (pe - 1.0)) * t ** (1.0 - conj))
    if grid_range is None:
        grid_range = (-20.0 * t, 20.0 * t)
    g = np.linspace(grid_range[0], grid_range[1], n_grid)
    vals = np.array([t * legendre_transform(H, z / t) for z in g])
    return tabulated(g, vals)
