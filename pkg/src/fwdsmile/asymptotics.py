"""Small-maturity out-of-the-money expansions for forward-start options.

Coefficients are computed once per ``(k, t, params)`` into an immutable
:class:`CoefficientSet`; the expansions for the saddlepoint, the measure-changed
characteristic function, option prices and the forward smile are built from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .exceptions import DomainError, GateError
from .heston_core import (
    ForwardTenor,
    HestonParams,
    beta_t,
    forward_lmgf,
    forward_lmgf_complex,
    saddlepoint,
)

__all__ = [
    "ATM_BAND",
    "GATE_TOL",
    "CoefficientSet",
    "SmileExpansion",
    "b1_hat",
    "b1_hat_prime",
    "rate_function",
    "feller_equality",
    "otm_coefficients",
    "saddlepoint_expansion",
    "e_tau_expansion",
    "price_expansion",
    "extrinsic_expansion",
    "smile_coefficients",
    "smile_expansion",
    "measure_changed_cf",
    "gaussian_cf_expansion",
    "u_star_prefactor",
    "u_star_prefactor_expansion",
]

# OTM expansions are refused inside this band around the money.
ATM_BAND = 1e-4
GATE_TOL = 1e-12


def b1_hat(u, params: HestonParams):
    """First-order correction of the rescaled ``B``: ``u (u^2 rho xi - 2) / 4``."""
    return u * (u * u * params.rho * params.xi - 2.0) / 4.0


def b1_hat_prime(u, params: HestonParams):
    return (3.0 * u * u * params.rho * params.xi - 2.0) / 4.0


def rate_function(k: float, beta: float) -> float:
    """Large-deviation rate ``|k| / sqrt(beta_t)``."""
    return abs(k) / math.sqrt(beta)


def feller_equality(params: HestonParams, tol: float = GATE_TOL) -> bool:
    """True when ``4 kappa theta == xi^2`` up to input roundoff."""
    lhs, rhs = 4.0 * params.kappa * params.theta, params.xi**2
    return abs(lhs - rhs) <= tol * max(lhs, rhs)


@dataclass(frozen=True)
class CoefficientSet:
    k: float
    t: float
    beta_t: float
    lambda_star: float
    a0: float
    a1: float
    a2: float
    a3: float
    zeta: float
    r: float
    e0: float
    e1: float
    e2: float
    psi0: float
    psi1: float
    psi2: float
    psi3: float
    psi4: float
    phi2a: float
    phi2b: float
    phi2c: float
    z1: float
    p1: float
    c0: float
    c1: float
    c2: float
    c3: float

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _check_otm(k: float):
    if not math.isfinite(k) or abs(k) < ATM_BAND:
        raise DomainError(f"out-of-the-money expansion undefined for |k| < {ATM_BAND}: k={k}")


def otm_coefficients(k: float, t: float, params: HestonParams) -> CoefficientSet:
    """All closed-form coefficients of the OTM small-maturity expansions."""
    _check_otm(k)
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    kappa, theta, xi, v = params.kappa, params.theta, params.xi, params.v
    kt = kappa * theta
    bt = beta_t(params, t)
    sbt = math.sqrt(bt)
    ak = abs(k)
    em = math.exp(-kappa * t)
    ep = math.exp(kappa * t)

    a0 = math.copysign(1.0, k) / sbt
    b1 = b1_hat(a0, params)
    b1p = b1_hat_prime(a0, params)
    a1 = -a0 * math.sqrt(v) * math.exp(-kappa * t / 2) / (2.0 * math.sqrt(ak) * bt**0.25)
    a2 = -kt / (k * xi**2) - b1 / a0
    a3 = (2.0 * bt * a1**3 / (xi**4 * v * v)) * (
        xi**2 * v * bt * ep * (ak * xi**2 * sbt * b1 - k * xi**2 * b1p - kt)
        + (2.0 * kt * bt * ep) ** 2
        - xi**4 * v * v / 16.0
    )

    e0 = -2.0 * a1 / a0
    r = a1 * a1 / 2.0 - kt / (ak * xi**2 * sbt)
    e1 = -2.0 * bt * r
    e2 = -2.0 * bt * (a1 * a2 + a0 * a3 + a1 * b1p)
    zeta = 2.0 * math.sqrt(v) * math.exp(-kappa * t / 2) / e0**1.5

    vem = v * em
    psi0 = a0 * vem / e0**3 * (e0 * e0 + a0 * bt * (3.0 * a1 * e0 - 2.0 * a0 * e1))
    psi1 = -4.0 * a0 * v * bt * em / e0**4
    psi2 = vem / (2.0 * e0**4) * (4.0 * a0 * bt * (3.0 * a0 * e1 - 4.0 * a1 * e0) - 5.0 * e0 * e0)
    psi3 = 8.0 * v * bt * em / e0**5
    psi4 = vem / (2.0 * e0**3) * ((e1 * e1 - e0 * e2) / bt - 2.0 * a0 * a1 * e0 * e1 + 2.0 * e0 * e0 * r)

    g = 4.0 * kt * bt / xi**2
    phi2a = psi2 - 0.5 * psi0**2 - g * (2.0 * kt + xi**2) / (e0 * e0 * xi**2) - g * a0 * psi0 / e0
    phi2b = psi3 - psi0 * psi1 - g * a0 * psi1 / e0
    phi2c = -psi1**2 / 2.0

    z1 = psi4 - a3 * k - 2.0 * kt / xi**2 * e1 / e0
    p1 = e0 + phi2a / zeta**2 + 3.0 * phi2b / zeta**4 + 15.0 * phi2c / zeta**6

    c0 = 2.0 * abs(a1 * k)
    c1 = vem / e0 * (a0 * a1 - e1 / (2.0 * bt * e0)) - a2 * k
    c2 = e0 ** (-params.shape)
    c3 = z1 + p1

    return CoefficientSet(
        k=k, t=t, beta_t=bt, lambda_star=ak / sbt,
        a0=a0, a1=a1, a2=a2, a3=a3, zeta=zeta, r=r, e0=e0, e1=e1, e2=e2,
        psi0=psi0, psi1=psi1, psi2=psi2, psi3=psi3, psi4=psi4,
        phi2a=phi2a, phi2b=phi2b, phi2c=phi2c, z1=z1, p1=p1,
        c0=c0, c1=c1, c2=c2, c3=c3,
    )


def saddlepoint_expansion(c: CoefficientSet, tau: float) -> float:
    q = tau**0.25
    return c.a0 + c.a1 * q + c.a2 * q * q + c.a3 * q**3


def e_tau_expansion(c: CoefficientSet, tau: float) -> float:
    q = tau**0.25
    return c.e0 + c.e1 * q + c.e2 * q * q


def price_expansion(k: float, t: float, tau: float, params: HestonParams,
                    coeffs: CoefficientSet | None = None, order: int = 1) -> float:
    """Forward-start call price from the small-maturity expansion.

    ``order=0`` drops the ``c3 tau^(1/4)`` correction.
    """
    c = coeffs if coeffs is not None else otm_coefficients(k, t, params)
    intrinsic = -math.expm1(k) if k < 0 else 0.0
    return intrinsic + math.exp(_log_extrinsic(c, tau, params, order))


def extrinsic_expansion(k: float, t: float, tau: float, params: HestonParams,
                        coeffs: CoefficientSet | None = None, order: int = 1, log: bool = False) -> float:
    """Out-of-the-money part of :func:`price_expansion`; its logarithm with ``log=True``.

    The log form stays finite where the value underflows.  Raises
    :class:`DomainError` if the ``c3`` correction makes the value non-positive.
    """
    c = coeffs if coeffs is not None else otm_coefficients(k, t, params)
    val = _log_extrinsic(c, tau, params, order)
    return val if log else math.exp(val)


def _log_extrinsic(c: CoefficientSet, tau: float, params: HestonParams, order: int = 1) -> float:
    kt = params.kappa * params.theta
    log_amp = (-c.lambda_star / math.sqrt(tau) + c.c0 / tau**0.25 + c.c1 + c.k
               + (7.0 / 8.0 - kt / (2.0 * params.xi**2)) * math.log(tau)
               + math.log(c.beta_t * c.c2 / (c.zeta * math.sqrt(2.0 * math.pi))))
    corr = 1.0 + c.c3 * tau**0.25 if order >= 1 else 1.0
    if not corr > 0:
        raise DomainError(f"first-order price correction is not positive at tau={tau}")
    return log_amp + math.log(corr)


@dataclass(frozen=True)
class SmileExpansion:
    k: float
    t: float
    v0: float
    v1: float
    v2: float | None
    v3: float | None
    max_valid_order: int
    feller_equality: bool


def smile_coefficients(k: float, t: float, params: HestonParams,
                       coeffs: CoefficientSet | None = None) -> SmileExpansion:
    """Coefficients ``v0..v3`` of the implied-variance expansion.

    ``v2`` and ``v3`` are only produced when ``4 kappa theta == xi^2``.
    """
    _check_otm(k)
    bt = beta_t(params, t)
    ak = abs(k)
    v0 = math.sqrt(bt) * ak / 2.0
    v1 = math.exp(-params.kappa * t / 2) * bt**0.25 * math.sqrt(params.v * ak) / 2.0
    if not feller_equality(params):
        return SmileExpansion(k, t, v0, v1, None, None, 1, False)
    c = coeffs if coeffs is not None else otm_coefficients(k, t, params)
    v2 = (2.0 * v0 * v0 / (k * k)
          * (c.c1 + math.log(c.c2 * bt * k * k / (c.zeta * v0**1.5)))
          + v0 * v0 / k + v1 * v1 / v0)
    v3 = v0 / (k * k) * (2.0 * c.c3 * v0 - 3.0 * v1) + v1 / v0 * (2.0 * v2 - v1 * v1 / v0)
    return SmileExpansion(k, t, v0, v1, v2, v3, 3, True)


def smile_expansion(k: float, t: float, tau: float, params: HestonParams, order: int = 1,
                    coeffs: SmileExpansion | None = None) -> float:
    """Implied forward variance ``sigma^2_{t,tau}(k)`` truncated at ``order``.

    Raises :class:`GateError` if ``order`` exceeds what the regime allows.
    """
    if order not in (0, 1, 2, 3):
        raise DomainError(f"order must be in 0..3, got {order}")
    s = coeffs if coeffs is not None else smile_coefficients(k, t, params)
    if order > s.max_valid_order:
        raise GateError(
            f"order {order} requires 4*kappa*theta == xi^2 "
            f"(got {4 * params.kappa * params.theta!r} vs {params.xi**2!r})")
    q = tau**0.25
    terms = [s.v0 / (q * q), s.v1 / q, s.v2, s.v3 * q if s.v3 is not None else None]
    var = sum(terms[: order + 1])
    if not var > 0:
        raise DomainError(f"expansion of order {order} is not positive at k={k}, tau={tau}")
    return var


def measure_changed_cf(u, k: float, t: float, tau: float, params: HestonParams,
                       u_star: float | None = None):
    """Characteristic function of ``(X - k)/tau^(1/8)`` under the saddlepoint measure."""
    tenor = ForwardTenor(t, tau, k)
    if u_star is None:
        u_star = saddlepoint(k, tenor, params)
    st = math.sqrt(tau)
    u = np.asarray(u, dtype=float)
    z = (u_star + 1j * u * tau**0.375) / st
    lam = forward_lmgf_complex(z, tenor, params) * st
    lam0 = forward_lmgf(u_star, tenor, params, scale=st)
    return np.exp(-1j * u * k / tau**0.125 + (lam - lam0) / st)


def gaussian_cf_expansion(u, c: CoefficientSet, tau: float, params: HestonParams, order: int = 2):
    """Gaussian limit of :func:`measure_changed_cf` with ``tau^(1/8)`` corrections."""
    u = np.asarray(u, dtype=float)
    g = 4.0 * c.a0 * params.theta * params.kappa * c.beta_t / (c.e0 * params.xi**2)
    phi1 = 1j * u * (c.psi0 + g) + 1j * u**3 * c.psi1
    phi2 = u**2 * c.phi2a + u**4 * c.phi2b + u**6 * c.phi2c
    corr = 1.0 + 0j
    if order >= 1:
        corr = corr + phi1 * tau**0.125
    if order >= 2:
        corr = corr + phi2 * tau**0.25
    return np.exp(-0.5 * c.zeta**2 * u**2) * corr


def u_star_prefactor(k: float, t: float, tau: float, params: HestonParams,
                     u_star: float | None = None, log: bool = False) -> float:
    """``exp((Lambda_tau(u*) - k u*) / sqrt(tau))`` evaluated at the numerical saddlepoint.

    With ``log=True`` the exponent is returned; the value itself underflows
    once ``tau`` is a few times ``1e-6``.
    """
    tenor = ForwardTenor(t, tau, k)
    if u_star is None:
        u_star = saddlepoint(k, tenor, params)
    st = math.sqrt(tau)
    val = (forward_lmgf(u_star, tenor, params, scale=st) - k * u_star) / st
    return val if log else math.exp(val)


def u_star_prefactor_expansion(c: CoefficientSet, tau: float, params: HestonParams,
                               log: bool = False) -> float:
    """Closed form of :func:`u_star_prefactor` up to ``(1 + z1 tau^(1/4))``."""
    val = (-c.lambda_star / math.sqrt(tau) + c.c0 / tau**0.25 + c.c1
           - params.kappa * params.theta / (2.0 * params.xi**2) * math.log(tau)
           + math.log(c.c2) + math.log1p(c.z1 * tau**0.25))
    return val if log else math.exp(val)
