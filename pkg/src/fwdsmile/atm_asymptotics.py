"""At-the-money forward volatility from moments of the variance process."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from scipy.special import gammaln

from .asymptotics import GATE_TOL
from .exceptions import DomainError, SolverError
from .heston_core import HestonParams, beta_t

__all__ = [
    "Regime",
    "AtmExpansion",
    "kummer_m",
    "scaled_kummer_m",
    "delta_moment",
    "regime",
    "future_atm_coefficients",
    "atm_expansion",
    "atm_from_future_vol_moments",
]

_MAX_TERMS = 10_000
# above this argument exp(-z) M(a, b, z) is summed from its large-z series
_ASYMPTOTIC_Z = 500.0


class Regime(str, Enum):
    FELLER_STRICT = "FELLER_STRICT"
    DEGENERATE = "DEGENERATE"


@dataclass(frozen=True)
class AtmExpansion:
    t: float
    sigma0: float
    sigma1: float | None
    regime: Regime

    def vol(self, tau: float) -> float:
        """Truncated expansion ``sigma0 + sigma1 tau`` (``sigma0`` alone when degenerate)."""
        return self.sigma0 + (self.sigma1 * tau if self.sigma1 is not None else 0.0)


def _check_mu(mu: float):
    if mu <= 0 and mu == math.floor(mu):
        raise DomainError(f"second Kummer parameter must not be a non-positive integer: {mu}")


def kummer_m(alpha: float, mu: float, z: float) -> float:
    """Confluent hypergeometric ``M(alpha, mu, z)`` by its power series, ``z >= 0``."""
    _check_mu(mu)
    if not z >= 0:
        raise DomainError(f"only z >= 0 is supported, got {z}")
    total = term = 1.0
    for n in range(_MAX_TERMS):
        term *= (alpha + n) / (mu + n) * z / (n + 1)
        total += term
        if not math.isfinite(total):
            raise SolverError(f"Kummer series overflows at z={z}")
        if abs(term) <= 1e-17 * abs(total) and (alpha + n) * z <= (mu + n) * (n + 1):
            return total
        if term == 0.0:
            return total
    raise SolverError(f"Kummer series did not converge in {_MAX_TERMS} terms (z={z})")


def scaled_kummer_m(alpha: float, mu: float, z: float) -> float:
    """``exp(-z) M(alpha, mu, z) * Gamma(alpha)/Gamma(mu) * z^(mu - alpha)``.

    This is the combination that stays O(1) as ``z`` grows.  Requires
    ``alpha > 0``.  For large ``z`` it is summed from the asymptotic series
    ``sum (mu - alpha)_n (1 - alpha)_n / (n! z^n)``; the neglected part is
    of order ``exp(-z)``.
    """
    _check_mu(mu)
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if z < _ASYMPTOTIC_Z:
        log_pref = gammaln(alpha) - gammaln(mu) + (mu - alpha) * math.log(z) - z if z > 0 else None
        if log_pref is None:
            raise DomainError("scaled Kummer function needs z > 0")
        return math.exp(log_pref) * kummer_m(alpha, mu, z)
    total = term = 1.0
    for n in range(200):
        nxt = term * (mu - alpha + n) * (1.0 - alpha + n) / ((n + 1) * z)
        if abs(nxt) > abs(term):  # asymptotic series: stop at the smallest term
            break
        term = nxt
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
    return total


def delta_moment(t: float, p: float, params: HestonParams) -> float:
    """``E[V_t^p]``; ``math.inf`` when ``p <= -2 kappa theta / xi^2``."""
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    mu = params.shape
    if p <= -mu:
        return math.inf
    bt = beta_t(params, t)
    z = params.v * math.exp(-params.kappa * t) / (2.0 * bt)
    if z >= _ASYMPTOTIC_Z:
        # 2^p beta^p z^p = (v e^{-kappa t})^p
        return (params.v * math.exp(-params.kappa * t)) ** p * scaled_kummer_m(mu + p, mu, z)
    log_pref = p * math.log(2.0 * bt) - z + gammaln(mu + p) - gammaln(mu)
    return math.exp(log_pref) * kummer_m(mu + p, mu, z)


def regime(params: HestonParams, tol: float = GATE_TOL) -> Regime:
    """``FELLER_STRICT`` when ``4 kappa theta > xi^2`` beyond ``tol``, else ``DEGENERATE``."""
    lhs, rhs = 4.0 * params.kappa * params.theta, params.xi**2
    if lhs - rhs > tol * max(lhs, rhs):
        return Regime.FELLER_STRICT
    return Regime.DEGENERATE


def future_atm_coefficients(params: HestonParams) -> tuple[dict, dict]:
    """ATM implied-vol coefficients of the spot smile started from ``V``, as power series in ``V``.

    Returns ``({1/2: 1}, {-1/2: c, 1/2: d})`` meaning ``sigma0 = sqrt(V)`` and
    ``sigma1 = c / sqrt(V) + d sqrt(V)``.
    """
    kappa, theta, xi, rho = params.kappa, params.theta, params.xi, params.rho
    c = (kappa * theta + xi**2 * (rho**2 - 4.0) / 24.0) / 4.0
    d = (rho * xi - 2.0 * kappa) / 8.0
    return {0.5: 1.0}, {-0.5: c, 0.5: d}


def atm_from_future_vol_moments(coeff_index: int, t: float, params: HestonParams) -> float:
    """Forward ATM coefficient as the expectation of the spot coefficient at ``V_t``."""
    if coeff_index not in (0, 1):
        raise DomainError(f"coeff_index must be 0 or 1, got {coeff_index}")
    if coeff_index == 1 and regime(params) is not Regime.FELLER_STRICT:
        raise DomainError("E[V_t^(-1/2)] is infinite unless 4 kappa theta > xi^2")
    series = future_atm_coefficients(params)[coeff_index]
    total = 0.0
    for power, coeff in sorted(series.items()):
        total += coeff * delta_moment(t, power, params)
    return total


def atm_expansion(t: float, params: HestonParams) -> AtmExpansion:
    s0 = delta_moment(t, 0.5, params)
    reg = regime(params)
    if reg is Regime.DEGENERATE:
        return AtmExpansion(t, s0, None, reg)
    kappa, theta, xi, rho = params.kappa, params.theta, params.xi, params.rho
    s1 = (delta_moment(t, -0.5, params) / 4.0 * (kappa * theta + xi**2 * (rho**2 - 4.0) / 24.0)
          + s0 / 8.0 * (rho * xi - 2.0 * kappa))
    return AtmExpansion(t, s0, s1, reg)
