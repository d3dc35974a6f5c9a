"""Heston forward log-moment generating function, its domain and saddlepoint.

All functions here are pure.  Two algebraically identical forms of the
Riccati solutions ``A`` and ``B`` are used:

* the "little trap" form (square root with ``Re d >= 0``), used on complex
  contours such as the Fourier inversion path, with the logarithm in ``A``
  tracked continuously in maturity when ``|gamma| > 1``;
* an entire-function form written in terms of ``d**2`` only, used on and
  near the real axis (domain checks, complex-step derivatives).  It has no
  square-root branch at all.

Infinite values are returned as ``math.inf``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .exceptions import BranchError, DegenerateInputError, DomainError, SolverError

__all__ = [
    "HestonParams",
    "ForwardTenor",
    "VarianceLawParams",
    "beta_t",
    "variance_law",
    "d_gamma",
    "ab_functions",
    "rescaled_ab",
    "variance_mgf",
    "explosion_time",
    "forward_lmgf",
    "forward_lmgf_complex",
    "lmgf_derivative",
    "forward_domain",
    "saddlepoint",
    "e_tau",
]

_COMPLEX_STEP = 1e-30


@dataclass(frozen=True)
class HestonParams:
    """Heston parameters ``(kappa, theta, xi, rho, v)``.

    The Feller condition is not required.
    """

    kappa: float
    theta: float
    xi: float
    rho: float
    v: float

    def __post_init__(self):
        for name in ("kappa", "theta", "xi", "rho", "v"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if self.kappa <= 0 or self.theta <= 0 or self.xi <= 0 or self.v <= 0:
            raise DomainError(f"kappa, theta, xi and v must be positive: {self}")
        if not -1.0 < self.rho < 1.0:
            raise DomainError(f"|rho| must be < 1, got {self.rho}")

    @property
    def shape(self) -> float:
        """``2 kappa theta / xi**2``, the exponent of the variance law."""
        return 2.0 * self.kappa * self.theta / self.xi**2


@dataclass(frozen=True)
class ForwardTenor:
    """Forward-start date ``t``, remaining maturity ``tau`` and log-strike ``k``."""

    t: float
    tau: float
    k: float = 0.0

    def __post_init__(self):
        if not (self.t > 0 and math.isfinite(self.t)):
            raise DomainError(f"forward-start date must be > 0, got {self.t}")
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise DomainError(f"maturity must be > 0, got {self.tau}")
        if not math.isfinite(self.k):
            raise DomainError(f"log-strike must be finite, got {self.k}")


@dataclass(frozen=True)
class VarianceLawParams:
    """``V_t`` is ``beta_t`` times a non-central chi-square(``q``, ``lam``)."""

    q: float
    lam: float
    beta_t: float


def beta_t(params: HestonParams, t: float) -> float:
    """Scale of the variance law at time ``t``: ``xi^2 (1 - e^{-kappa t}) / (4 kappa)``."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    return -params.xi**2 * math.expm1(-params.kappa * t) / (4.0 * params.kappa)


def variance_law(params: HestonParams, t: float) -> VarianceLawParams:
    bt = beta_t(params, t)
    if bt <= 0:
        raise DomainError("variance law is degenerate at t = 0")
    q = 4.0 * params.kappa * params.theta / params.xi**2
    lam = params.v * math.exp(-params.kappa * t) / bt
    return VarianceLawParams(q=q, lam=lam, beta_t=bt)


def d_gamma(u, params: HestonParams):
    """Return ``(d(u), gamma(u))`` with the root chosen so that ``Re d >= 0``."""
    u = complex(u)
    b = params.kappa - params.rho * params.xi * u
    d = cmath.sqrt(b * b + u * (1.0 - u) * params.xi**2)
    if d.real < 0:  # only reachable through signed zeros
        d = -d
    den = b + d
    if abs(den) <= 1e-300 or abs(den) <= 1e-14 * max(abs(b), abs(d)):
        raise DegenerateInputError(f"gamma has a pole at u={u}")
    return d, (b - d) / den


def _phi1(z):
    """``(1 - exp(-z)) / z`` with its removable singularity filled in."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < 1e-8
    out[small] = 1.0 - 0.5 * z[small]
    zs = z[~small]
    out[~small] = -np.expm1(-zs) / zs
    return out


def _log_q_tracked(b, d, tau, n0=32, n_max=1 << 15):
    """Continuous log of ``q(s) = (1 - g e^{-ds}) / (1 - g)`` at ``s = tau``.

    ``q(0) = 1``.  The argument is unwrapped on a grid in ``s`` that is
    refined until no step changes the phase by more than ``pi/4``.
    """
    n = n0
    while n <= n_max:
        s = np.linspace(0.0, tau, n + 1)[:, None]
        ds = d[None, :] * s
        q = 0.5 * b[None, :] * s * _phi1(ds) + 0.5 * (1.0 + np.exp(-ds))
        if np.any(q == 0):
            raise BranchError("log argument vanishes on the maturity path")
        phase = np.angle(q)
        steps = np.diff(phase, axis=0)
        steps = (steps + np.pi) % (2.0 * np.pi) - np.pi
        if np.max(np.abs(steps)) < np.pi / 4:
            total = phase[0] + np.sum(steps, axis=0)
            return np.log(np.abs(q[-1])) + 1j * total
        n *= 2
    raise BranchError("could not resolve winding of the log term in A")


def ab_functions(u, tau: float, params: HestonParams):
    """Riccati coefficients ``A(u, tau)`` and ``B(u, tau)`` of the spot lmgf.

    ``log E[exp(u X_tau) | V_0 = v] = A + B v``.  Accepts scalars or arrays of
    complex ``u``; returns complex values of the same shape.
    """
    scalar = np.ndim(u) == 0
    u = np.atleast_1d(np.asarray(u, dtype=complex))
    kappa, theta, xi, rho = params.kappa, params.theta, params.xi, params.rho
    b = kappa - rho * xi * u
    d = np.sqrt(b * b + u * (1.0 - u) * xi**2)
    d = np.where(d.real < 0, -d, d)
    e = np.exp(-d * tau)
    ph = _phi1(d * tau)
    q = 0.5 * b * tau * ph + 0.5 * (1.0 + e)
    if np.any(q == 0):
        raise DomainError("spot moment explodes exactly at this maturity")
    big = np.abs(b - d) > np.abs(b + d) * (1.0 + 1e-12)
    log_q = np.log(q)
    if np.any(big):
        log_q[big] = _log_q_tracked(b[big], d[big], tau)
    a_val = kappa * theta / xi**2 * ((b - d) * tau - 2.0 * log_q)
    b_val = (u * u - u) * tau * ph / (2.0 * q)
    if scalar:
        return complex(a_val[0]), complex(b_val[0])
    return a_val, b_val


def rescaled_ab(u, tau: float, params: HestonParams):
    """``A(u/sqrt(tau), tau)`` and ``B(u/sqrt(tau), tau)``."""
    return ab_functions(np.asarray(u) / math.sqrt(tau), tau, params)


def _ch_sh(y):
    """``cosh(sqrt(y))`` and ``sinh(sqrt(y))/sqrt(y)``; entire in ``y``."""
    if abs(y) < 1e-4:
        return (1.0 + y / 2.0 + y * y / 24.0 + y**3 / 720.0,
                1.0 + y / 6.0 + y * y / 120.0 + y**3 / 5040.0)
    r = cmath.sqrt(y)
    return cmath.cosh(r), cmath.sinh(r) / r


def _ab_entire(w, tau: float, params: HestonParams):
    """Scalar ``(A, B)`` from the branch-free form; valid for ``tau`` below explosion."""
    w = complex(w)
    kappa, theta, xi, rho = params.kappa, params.theta, params.xi, params.rho
    b = kappa - rho * xi * w
    x = b * b + w * (1.0 - w) * xi**2
    ch, sh = _ch_sh(x * tau * tau / 4.0)
    s = 0.5 * tau * sh
    c = ch + b * s
    a_val = kappa * theta / xi**2 * (b * tau - 2.0 * cmath.log(c))
    b_val = (w * w - w) * s / c
    return a_val, b_val


def explosion_time(u: float, params: HestonParams) -> float:
    """Time at which ``E[exp(u X_T)]`` of the spot Heston process first explodes."""
    u = float(u)
    kappa, xi, rho = params.kappa, params.xi, params.rho
    b = kappa - rho * xi * u
    x = b * b + u * (1.0 - u) * xi**2
    if 0.0 <= u <= 1.0:
        return math.inf
    if x > 0:
        d = math.sqrt(x)
        if b >= 0 or d >= -b:
            return math.inf
        return math.atanh(-d / b) * 2.0 / d
    if x == 0:
        return -2.0 / b if b < 0 else math.inf
    delta = math.sqrt(-x)
    angle = math.atan(delta / -b) if b < 0 else (math.pi / 2 if b == 0 else math.pi + math.atan(delta / -b))
    return 2.0 * angle / delta


def variance_mgf(u: float, t: float, params: HestonParams) -> float:
    """``E[exp(u V_t)]``; ``math.inf`` for ``u >= 1/(2 beta_t)``."""
    law = variance_law(params, t)
    z = 1.0 - 2.0 * law.beta_t * u
    if z <= 0:
        return math.inf
    return math.exp(law.lam * law.beta_t * u / z) * z ** (-law.q / 2.0)


def _finite_unscaled(w: float, tenor: ForwardTenor, params: HestonParams) -> bool:
    if 0.0 <= w <= 1.0:
        return True
    if not tenor.tau < explosion_time(w, params):
        return False
    _, b_val = _ab_entire(w, tenor.tau, params)
    return 2.0 * beta_t(params, tenor.t) * b_val.real < 1.0


def _lmgf_unscaled(w, tenor: ForwardTenor, params: HestonParams):
    """Forward lmgf at (possibly slightly complex) ``w``; no domain check."""
    a_val, b_val = _ab_entire(w, tenor.tau, params)
    bt = beta_t(params, tenor.t)
    z = 1.0 - 2.0 * bt * b_val
    return (a_val + params.v * math.exp(-params.kappa * tenor.t) * b_val / z
            - params.shape * cmath.log(z))


def forward_lmgf(u: float, tenor: ForwardTenor, params: HestonParams, scale: float = 1.0) -> float:
    """Forward lmgf ``a log E[exp(u X_tau^(t) / a)]`` with ``a = scale``.

    Returns ``math.inf`` outside the effective domain.  ``scale=sqrt(tau)``
    gives the rescaled lmgf.
    """
    if not scale > 0:
        raise DomainError(f"scale must be positive, got {scale}")
    w = float(u) / scale
    if w == 0.0:
        return 0.0
    if not _finite_unscaled(w, tenor, params):
        return math.inf
    return scale * _lmgf_unscaled(w, tenor, params).real


def lmgf_derivative(u: float, tenor: ForwardTenor, params: HestonParams, scale: float = 1.0) -> float:
    """``d/du`` of :func:`forward_lmgf`, exact to roundoff via a complex step."""
    w = float(u) / scale
    if not _finite_unscaled(w, tenor, params):
        raise DomainError(f"u={u} is outside the finite domain")
    return _lmgf_unscaled(complex(w, _COMPLEX_STEP), tenor, params).imag / _COMPLEX_STEP


def forward_lmgf_complex(z, tenor: ForwardTenor, params: HestonParams):
    """Analytic continuation of the unscaled forward lmgf to complex ``z``.

    The real part of every ``z`` must lie in the finite real domain.
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    for re in np.unique(z.real):
        if not _finite_unscaled(float(re), tenor, params):
            raise DomainError(f"Re z = {re} lies outside the finite domain")
    a_val, b_val = ab_functions(z, tenor.tau, params)
    bt = beta_t(params, tenor.t)
    w = 1.0 - 2.0 * bt * b_val
    if np.any(w.real <= 0):
        raise BranchError("1 - 2 beta_t B left the right half-plane")
    out = a_val + params.v * math.exp(-params.kappa * tenor.t) * b_val / w - params.shape * np.log(w)
    return complex(out[0]) if scalar else out


def _domain_unscaled(tenor: ForwardTenor, params: HestonParams):
    def edge(sign):
        inside, step = (1.0 if sign > 0 else 0.0), 1.0
        outside = inside + sign * step
        while _finite_unscaled(outside, tenor, params):
            inside = outside
            step *= 2.0
            outside = inside + sign * step
            if step > 1e12:
                return sign * math.inf
        for _ in range(200):
            mid = 0.5 * (inside + outside)
            if mid in (inside, outside):
                break
            if _finite_unscaled(mid, tenor, params):
                inside = mid
            else:
                outside = mid
        return inside

    return edge(-1.0), edge(1.0)


def forward_domain(tenor: ForwardTenor, params: HestonParams, scale: float = 1.0):
    """Interval ``(lo, hi)`` on which :func:`forward_lmgf` is finite.

    The endpoints returned are the last points found to be finite.
    """
    lo, hi = _domain_unscaled(tenor, params)
    return lo * scale, hi * scale


def _saddle_unscaled(k: float, tenor: ForwardTenor, params: HestonParams) -> float:
    """Solve ``Lambda'(w) = k`` for the unscaled forward lmgf."""

    def f(w):
        return _lmgf_unscaled(complex(w, _COMPLEX_STEP), tenor, params).imag / _COMPLEX_STEP - k

    f0, f1 = f(0.0), f(1.0)
    if f0 < 0 < f1:
        lo, hi = 0.0, 1.0
    elif f1 <= 0:
        w_lo, w_hi = _domain_unscaled(tenor, params)
        lo, hi = 1.0, None
        for j in range(1, 80):
            cand = w_hi - (w_hi - 1.0) * 2.0**-j
            if f(cand) > 0:
                hi = cand
                break
            lo = cand
        if hi is None:
            raise SolverError(f"no upper bracket for k={k} (domain edge {w_hi}, f={f(w_hi)})")
    else:
        w_lo, w_hi = _domain_unscaled(tenor, params)
        lo, hi = None, 0.0
        for j in range(1, 80):
            cand = w_lo + (0.0 - w_lo) * 2.0**-j
            if f(cand) < 0:
                lo = cand
                break
            hi = cand
        if lo is None:
            raise SolverError(f"no lower bracket for k={k} (domain edge {w_lo}, f={f(w_lo)})")
    if f0 == 0.0:
        return 0.0
    w_star = brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    resid = abs(f(w_star))
    if resid > 1e-9 * max(1.0, abs(k)):
        raise SolverError(f"saddlepoint residual {resid:.3e} too large at k={k}, w={w_star}")
    return w_star


def saddlepoint(k: float, tenor: ForwardTenor, params: HestonParams) -> float:
    """Root ``u*`` of ``d/du Lambda_tau(u) = k`` for the sqrt(tau)-rescaled lmgf."""
    return math.sqrt(tenor.tau) * _saddle_unscaled(float(k), tenor, params)


def e_tau(k: float, tenor: ForwardTenor, params: HestonParams) -> float:
    """``(1 - 2 beta_t B(u*/sqrt(tau), tau)) / tau**(1/4)`` at the saddlepoint."""
    w_star = _saddle_unscaled(float(k), tenor, params)
    _, b_val = _ab_entire(w_star, tenor.tau, params)
    return (1.0 - 2.0 * beta_t(params, tenor.t) * b_val.real) * tenor.tau**-0.25
