"""Complex Airy pair and the transform route for the argmax density factor.

Three evaluation regimes, selected by where the point sits:

* ``|z| <= 6``: Maclaurin series for the standard pair of solutions,
  accumulated in extended precision where the platform provides an 80-bit
  long double.  The series itself is entire; extended precision keeps the
  exponential cancellation on the positive real axis from eating the
  answer near the switch radius.

* ``|z| > 6``, away from the anti-Stokes rays: Poincare expansions with
  optimal truncation.  The recessive form covers ``|arg z| < 7pi/12``,
  the two-exponential oscillatory form covers ``|arg z| > 3pi/4``.

* the remaining sector around ``|arg z| = 2pi/3``: both expansions sit on
  their truncation floor there, so the pair is instead carried outward
  along the ray by Taylor steps of w'' = z w from a series anchor at
  radius 4.5.  Nothing is strongly recessive on those rays, so the
  stepping does not amplify relative error.

In the crossover annulus ``5.5 <= |z| <= 6.5`` the other regime is
evaluated as well and the two are compared; disagreement is measured
against the magnitude of the solution pair at that point (the natural
scale of the Wronskian-normalized basis) and beyond 1e-8 of it raises
AccuracyError.  Far from the annulus the relative accuracy target is
1e-10 away from zeros; within ``6 < |z| < 8`` on the worst rays the
expansions deliver a few 1e-9.

The second half of the module evaluates the Fourier-transform expression
for the parabolic-cost argmax factor and compares it with the excursion
route.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import AccuracyError, ConfigError, ConvergenceError, DomainError
from .hamiltonian import quadratic

_SQRT_PI = math.sqrt(math.pi)
_OMEGA = cmath.exp(2j * math.pi / 3)

# series switch radius and the dual-evaluation annulus around it
_SERIES_RADIUS = 6.0
_ANNULUS = (5.5, 6.5)
_CROSSOVER_TOL = 1e-8
_MAX_RADIUS = 1e3

# gap sector handled by ODE continuation, in units of pi
_GAP_LO = 0.55
_GAP_HI = 0.78
_ANCHOR_RADIUS = 4.5

# Ai(0) and -Ai'(0); parsed to long double so the series constants carry
# more than double precision on platforms that have it
_C1 = np.longdouble("0.355028053887817239260063186004")
_C2 = np.longdouble("0.258819403792806798405183560189")
_SQRT3 = np.sqrt(np.longdouble(3))


def _asym_coeffs(n):
    u = np.empty(n)
    v = np.empty(n)
    u[0] = v[0] = 1.0
    for k in range(1, n):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 1) / (72.0 * k)
        v[k] = u[k] * (6 * k + 1) / (1.0 - 6 * k)
    return u, v


_UK, _VK = _asym_coeffs(80)


def _series_all(z):
    """Maclaurin pair (Ai, Ai', Bi, Bi'); reliable for |z| <= 6.5."""
    if z == 0:
        c1 = float(_C1)
        c2 = float(_C2)
        s3 = float(_SQRT3)
        return np.array([c1, -c2, s3 * c1, s3 * c2], dtype=complex)
    zl = np.clongdouble(z)
    z3 = zl * zl * zl
    tf = np.clongdouble(1.0)
    tg = zl
    f, g = tf, tg
    fp = np.clongdouble(0.0)
    gp = np.clongdouble(1.0)
    for k in range(1, 200):
        kk = np.longdouble(3 * k)
        tf = tf * z3 / ((kk - 1.0) * kk)
        tg = tg * z3 / (kk * (kk + 1.0))
        f = f + tf
        g = g + tg
        fp = fp + tf * kk / zl
        gp = gp + tg * (kk + 1.0) / zl
        if max(abs(tf), abs(tg)) < 1e-25 * max(abs(f), abs(g)):
            break
    ai = complex(_C1 * f - _C2 * g)
    aip = complex(_C1 * fp - _C2 * gp)
    bi = complex(_SQRT3 * (_C1 * f + _C2 * g))
    bip = complex(_SQRT3 * (_C1 * fp + _C2 * gp))
    return np.array([ai, aip, bi, bip])


def _optimal_sum(coeffs, zeta, alternating):
    """Sum coeffs[k] (+-1)^k zeta^{-k}, truncated at the smallest term."""
    s = 0.0 + 0.0j
    t = 1.0 + 0.0j
    prev = abs(coeffs[0])
    for k in range(len(coeffs)):
        mag = abs(coeffs[k] * t)
        if k > 0 and mag > prev:
            break
        prev = mag
        s += coeffs[k] * t * (-1.0 if (alternating and k % 2) else 1.0)
        if mag < 1e-20 * abs(s):
            break
        t /= zeta
    return s


def _optimal_split(coeffs, xi):
    """Even and odd optimally-truncated sums sum (-1)^k c_{2k+p} xi^{-2k-p}."""
    out = []
    xi2 = xi * xi
    for parity in (0, 1):
        s = 0.0 + 0.0j
        t = xi ** (-parity) if parity else 1.0 + 0.0j
        prev = None
        for k in range(40):
            j = 2 * k + parity
            if j >= len(coeffs):
                break
            mag = abs(coeffs[j] * t)
            if prev is not None and mag > prev:
                break
            prev = mag
            s += (-1.0 if k % 2 else 1.0) * coeffs[j] * t
            if mag < 1e-20 * abs(s):
                break
            t /= xi2
        out.append(s)
    return out


def _ai_recessive(z):
    """Single-exponential expansion of (Ai, Ai'); |arg z| below ~ 7pi/12."""
    zeta = (2.0 / 3.0) * z ** 1.5
    q = z ** 0.25
    e = np.exp(-zeta)
    ai = e / (2.0 * _SQRT_PI * q) * _optimal_sum(_UK, zeta, True)
    aip = -q * e / (2.0 * _SQRT_PI) * _optimal_sum(_VK, zeta, True)
    return ai, aip


def _all_oscillatory(z):
    """Two-exponential expansions at w = -z; |arg z| above ~ 3pi/4."""
    w = -z
    xi = (2.0 / 3.0) * w ** 1.5
    q = w ** 0.25
    c = cmath.cos(xi - math.pi / 4.0)
    s = cmath.sin(xi - math.pi / 4.0)
    ue, uo = _optimal_split(_UK, xi)
    ve, vo = _optimal_split(_VK, xi)
    ai = (c * ue + s * uo) / (_SQRT_PI * q)
    aip = q * (s * ve - c * vo) / _SQRT_PI
    bi = (-s * ue + c * uo) / (_SQRT_PI * q)
    bip = q * (c * ve + s * vo) / _SQRT_PI
    return np.array([ai, aip, bi, bip])


def _taylor_step(a, w0, w1, h):
    """One Taylor step of w'' = z w from center a to a + h."""
    coeffs = [w0, w1, a * w0 / 2.0]
    val = w0 + w1 * h + coeffs[2] * h * h
    der = w1 + 2.0 * coeffs[2] * h
    hp = h * h
    small = 0
    for n in range(1, 120):
        c_new = (a * coeffs[n] + coeffs[n - 1]) / ((n + 1) * (n + 2))
        coeffs.append(c_new)
        hp *= h
        val += c_new * hp
        der += (n + 2) * c_new * hp / h
        if abs(c_new * hp) < 1e-17 * max(abs(val), 1e-300):
            small += 1
            if small >= 2:
                break
        else:
            small = 0
    return val, der


def _ode_continue(z):
    """Carry the pair out along the ray from the series anchor."""
    r = abs(z)
    ray = z / r
    pos = _ANCHOR_RADIUS
    ai, aip, bi, bip = _series_all(pos * ray)
    while pos < r - 1e-12:
        step = min(2.5 / math.sqrt(pos), r - pos)
        center = pos * ray
        h = step * ray
        ai, aip = _taylor_step(center, ai, aip, h)
        bi, bip = _taylor_step(center, bi, bip, h)
        pos += step
    return np.array([ai, aip, bi, bip])


def _ai_pair_large(z):
    """(Ai, Ai') for |z| > ~ 4.5 via the sector-appropriate expansion.

    Upper-half plane only; callers reflect first.
    """
    theta = cmath.phase(z) / math.pi
    if theta < _GAP_LO:
        return _ai_recessive(z)
    if theta <= _GAP_HI:
        out = _ode_continue(z)
        return out[0], out[1]
    return _all_oscillatory(z)[:2]


def _ai_pair(z):
    if z.imag < 0:
        a, ap = _ai_pair(z.conjugate())
        return a.conjugate(), ap.conjugate()
    return _ai_pair_large(z)


def _all_large(z):
    """All four functions for |z| > 6, Im z >= 0."""
    theta = cmath.phase(z) / math.pi
    if _GAP_LO <= theta <= _GAP_HI:
        return _ode_continue(z)
    if theta > _GAP_HI:
        return _all_oscillatory(z)
    ai, aip = _ai_recessive(z)
    a1, ap1 = _ai_pair(z * _OMEGA)
    a2, ap2 = _ai_pair(z / _OMEGA)
    bi = cmath.exp(1j * math.pi / 6.0) * a1 + cmath.exp(-1j * math.pi / 6.0) * a2
    bip = cmath.exp(5j * math.pi / 6.0) * ap1 \
        + cmath.exp(-5j * math.pi / 6.0) * ap2
    return np.array([ai, aip, bi, bip])


def _airy_all(z):
    """(Ai, Ai', Bi, Bi') at a complex point, with the crossover gate."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError("Airy argument must have finite components")
    r = abs(z)
    if r > _MAX_RADIUS:
        raise DomainError("Airy argument radius above the supported 1e3")
    if z.imag < 0:
        return np.conj(_airy_all(z.conjugate()))
    if r <= _SERIES_RADIUS:
        vals = _series_all(z)
        if r >= _ANNULUS[0]:
            _crossover_gate(z, vals, _all_large(z))
        return vals
    vals = _all_large(z)
    if r <= _ANNULUS[1]:
        _crossover_gate(z, vals, _series_all(z))
    return vals


def _crossover_gate(z, a, b):
    scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))), 1e-300)
    gap = float(np.max(np.abs(a - b)))
    if gap > _CROSSOVER_TOL * scale:
        raise AccuracyError(
            f"series and asymptotic evaluations disagree at z={z:.6g}: "
            f"{gap:.3e} against scale {scale:.3e}")


def airy_ai(z):
    """First Airy function at a complex point."""
    return complex(_airy_all(z)[0])


def airy_ai_prime(z):
    """Derivative of the first Airy function."""
    return complex(_airy_all(z)[1])


def airy_bi(z):
    """Second Airy function at a complex point."""
    return complex(_airy_all(z)[2])


def airy_bi_prime(z):
    """Derivative of the second Airy function."""
    return complex(_airy_all(z)[3])


def airy_wronskian(z):
    """Ai(z) Bi'(z) - Ai'(z) Bi(z); identically 1/pi for the true pair."""
    ai, aip, bi, bip = _airy_all(z)
    return complex(ai * bip - aip * bi)


# -- transform route for the parabolic argmax factor -------------------------

_CBRT2 = 2.0 ** (1.0 / 3.0)


def _transform_kernel(v):
    """2^{1/3} / Ai(i 2^{-1/3} v)."""
    return _CBRT2 / airy_ai(1j * (v / _CBRT2))


def _ray_quality_gate():
    """The transform ray must carry a numerically clean pair: check the
    Wronskian on the segment that holds the integral's mass.  Further
    out both solutions grow like exp(|zeta|/sqrt 2) and the Wronskian
    cancellation is below double resolution, but the kernel is already
    negligible there, so accuracy beyond the probed segment cannot move
    the integral."""
    for v in (1.0, 3.0, 5.0):
        w = airy_wronskian(1j * (v / _CBRT2))
        if abs(w - 1.0 / math.pi) > 1e-8:
            raise AccuracyError(
                f"Airy pair quality breaks down on the transform ray at v={v:.3g}")


def chernoff_airy_rhs(t, rel_tol=1e-10):
    """Fourier-transform evaluation of the parabolic-cost density factor:
    (e^{(2/3) t^3} / 2 pi) times the transform of 2^{1/3}/Ai(i 2^{-1/3} v).

    The integrand is Hermitian in v, so the two-sided integral reduces to
    twice the real part over v > 0; the reduction enforces a real result
    by construction.  Truncation is chosen where the kernel magnitude
    falls below 1e-12; the decay is superexponential.
    """
    if abs(t) > 2.0:
        raise ConfigError("transform route is tabulated for |t| <= 2", field="t")
    v_max = 8.0
    while abs(_transform_kernel(v_max)) >= 1e-12:
        v_max *= 2.0
        if v_max > 64.0:
            raise ConvergenceError("transform kernel does not decay")
    _ray_quality_gate()

    def integrand(v):
        return (cmath.exp(-1j * t * v) * _transform_kernel(v)).real

    val, err = quad(integrand, 0.0, v_max, epsabs=1e-12, epsrel=rel_tol,
                    limit=400)
    if err > 1e-6 * max(abs(val), 1.0):
        raise ConvergenceError(
            f"transform quadrature error estimate {err:.2e} too large")
    return math.exp((2.0 / 3.0) * t ** 3) / math.pi * val


@dataclass(frozen=True)
class IdentityReport:
    """One row of the excursion-vs-transform comparison."""

    t: float
    lhs: float
    rhs: float
    rel_diff: float
    lhs_std_error: float


def chernoff_identity_check(t, n_samples=None, n_steps=None, seed=0,
                            ensemble=None):
    """Compare the excursion-route density factor for the squared cost
    against the transform route at one t.  Returns an IdentityReport.
    """
    from .excursion import f_phi

    if abs(t) > 1.5:
        raise ConfigError("identity check covers |t| <= 1.5", field="t")
    phi = quadratic(2.0)
    lhs = f_phi(phi, t, n_samples=n_samples, n_steps=n_steps, seed=seed,
                ensemble=ensemble, full=True)
    rhs = chernoff_airy_rhs(t)
    rel = abs(lhs.value - rhs) / abs(rhs)
    return IdentityReport(t=float(t), lhs=lhs.value, rhs=rhs, rel_diff=rel,
                          lhs_std_error=lhs.mc_std_error)


def identity_report(t_values, n_samples=None, n_steps=None, seed=0):
    """Identity check across a t grid on one shared excursion ensemble."""
    from .excursion import _DEFAULT_MC, ExcursionEnsemble

    ens = ExcursionEnsemble(seed, n_samples or _DEFAULT_MC["n_samples"],
                            n_steps or _DEFAULT_MC["n_steps"])
    return [chernoff_identity_check(t, seed=seed, ensemble=ens)
            for t in np.asarray(t_values, dtype=float)]
