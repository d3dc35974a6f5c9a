"""Black-Scholes prices and implied volatility for normalised forward-start calls.

The underlying starts at 1, rates are zero and the strike is ``e^k``.  Prices
out of the money are formed as

    phi(a) e^{min(k, 0)} [R(a) - R(a + s)],   a = |k|/s - s/2,  s = sigma sqrt(tau),

with ``R`` the Mills ratio, so deep out-of-the-money values keep full relative
precision down to the underflow threshold and their logarithm stays finite
below it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import erfcx, ndtr, roots_legendre

from .exceptions import DomainError, SolverError

__all__ = [
    "BsQuote",
    "PrecisionWarning",
    "NEAR_INTRINSIC_GAP",
    "intrinsic",
    "bs_call",
    "bs_put",
    "bs_otm",
    "bs_log_otm",
    "implied_vol",
    "implied_vol_otm",
    "bs_forward_smalltau",
    "bs_atm_smalltau",
]

SQRT_2PI = math.sqrt(2.0 * math.pi)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
# Extrinsic value below which an implied volatility is reported as low confidence.
NEAR_INTRINSIC_GAP = 1e-15
_VOL_LO, _VOL_HI, _VOL_CAP = 1e-8, 10.0, 1e4
_GL_X, _GL_W = roots_legendre(24)
_DIRECT_A = 20.0
# (2n-1)!!, n >= 1: 1 - yR(y) ~ 1/y^2 - 3/y^4 + 15/y^6 - ...
_SERIES = np.array([1.0, 3.0, 15.0, 105.0, 945.0, 10395.0, 135135.0, 2027025.0, 34459425.0])


class PrecisionWarning(UserWarning):
    """Implied volatility recovered from a price barely above intrinsic value."""


@dataclass(frozen=True)
class BsQuote:
    k: float
    tau: float
    sigma: float

    def __post_init__(self):
        if not (self.tau > 0 and self.sigma > 0):
            raise DomainError(f"tau and sigma must be positive: {self}")

    @property
    def price(self) -> float:
        return bs_call(self.k, self.tau, self.sigma)


def intrinsic(k: float) -> float:
    """Call intrinsic value ``(1 - e^k)^+``."""
    return -math.expm1(k) if k < 0 else 0.0


def _mills(x):
    return math.sqrt(math.pi / 2.0) * erfcx(x / math.sqrt(2.0))


def _one_minus_x_mills(y: np.ndarray) -> np.ndarray:
    """``1 - y R(y)``, which is ``-R'(y)``; asymptotic series for large ``y``."""
    out = np.empty_like(y)
    big = y > 30.0
    yb = 1.0 / y[big] ** 2
    acc = np.zeros_like(yb)
    for c in _SERIES[::-1]:
        acc = c - yb * acc
    out[big] = yb * acc
    ys = y[~big]
    out[~big] = 1.0 - ys * _mills(ys)
    return out


def _mills_gap(a: float, s: float) -> float:
    """``R(a) - R(a + s)``, computed as an integral when the two nearly cancel."""
    if s < 0.5 * max(1.0, abs(a)):
        y = a + 0.5 * s * (_GL_X + 1.0)
        return 0.5 * s * float(np.dot(_GL_W, _one_minus_x_mills(y)))
    return float(_mills(a) - _mills(a + s))


def _check(tau: float, sigma: float):
    if not tau > 0:
        raise DomainError(f"tau must be positive, got {tau}")
    if not sigma >= 0:
        raise DomainError(f"sigma must be non-negative, got {sigma}")


def bs_log_otm(k: float, tau: float, sigma: float) -> float:
    """Log of the out-of-the-money price: the call for ``k >= 0``, the put for ``k < 0``."""
    _check(tau, sigma)
    s = sigma * math.sqrt(tau)
    if s == 0.0:
        return -math.inf
    if math.isinf(s):
        return min(k, 0.0)
    a = abs(k) / s - 0.5 * s
    if a < -_DIRECT_A:
        # far in the money in volatility terms: R(a) overflows but no cancellation remains
        if k >= 0:
            return math.log(ndtr(-a) - math.exp(k) * ndtr(-a - s))
        return math.log(math.exp(k) * ndtr(a + s) - ndtr(a))
    gap = _mills_gap(a, s)
    if not gap > 0:
        return -math.inf
    return -0.5 * a * a - _HALF_LOG_2PI + min(k, 0.0) + math.log(gap)


def bs_otm(k: float, tau: float, sigma: float) -> float:
    return math.exp(bs_log_otm(k, tau, sigma))


def bs_call(k: float, tau: float, sigma: float) -> float:
    """``N(d+) - e^k N(d-)`` with ``d± = -k/(sigma sqrt(tau)) ± sigma sqrt(tau)/2``."""
    return intrinsic(k) + bs_otm(k, tau, sigma)


def bs_put(k: float, tau: float, sigma: float) -> float:
    return bs_otm(k, tau, sigma) + (math.expm1(k) if k >= 0 else 0.0)


def implied_vol_otm(otm_price: float, k: float, tau: float, *, log_price: float | None = None,
                    warn: bool = True) -> float:
    """Volatility reproducing an out-of-the-money price (call if ``k >= 0``, else put).

    The equation is solved on log prices, so values far below ``1e-300`` can
    be passed through ``log_price``.
    """
    if not tau > 0:
        raise DomainError(f"tau must be positive, got {tau}")
    upper = math.exp(min(k, 0.0))
    if log_price is None:
        if not 0.0 < otm_price < upper:
            raise DomainError(
                f"out-of-the-money price {otm_price!r} outside (0, {upper!r}) at k={k}")
        log_price = math.log(otm_price)
    elif not log_price < min(k, 0.0):
        raise DomainError(f"log price {log_price!r} at or above its upper bound")
    if warn and log_price < math.log(NEAR_INTRINSIC_GAP):
        warnings.warn(
            f"price exceeds intrinsic by only {math.exp(log_price):.3e}; "
            "implied volatility has low precision", PrecisionWarning, stacklevel=2)

    def f(sig):
        return bs_log_otm(k, tau, sig) - log_price

    lo, hi = _VOL_LO, _VOL_HI
    while f(lo) > 0:
        hi, lo = lo, lo / 10.0
        if lo < 1e-300:
            raise SolverError(f"no lower volatility bracket for log price {log_price} at k={k}")
    while f(hi) < 0:
        lo, hi = hi, hi * 2.0
        if hi > _VOL_CAP:
            raise SolverError(f"no upper volatility bracket for log price {log_price} at k={k}")
    return brentq(f, lo, hi, xtol=1e-300, rtol=4.0 * np.finfo(float).eps, maxiter=500)


def implied_vol(price: float, k: float, tau: float) -> float:
    """Implied volatility of a call price ``price`` at log-strike ``k``.

    Raises :class:`DomainError` outside ``(intrinsic, 1)``.
    """
    lo = intrinsic(k)
    if not lo < price < 1.0:
        raise DomainError(f"call price {price!r} outside ({lo!r}, 1) at k={k}")
    otm = price if k >= 0 else price - lo
    return implied_vol_otm(otm, k, tau)


def bs_forward_smalltau(k: float, tau: float, sigma: float) -> float:
    """Small-maturity expansion of the call price at fixed ``k != 0``."""
    if k == 0:
        raise DomainError("small-maturity expansion requires k != 0")
    _check(tau, sigma)
    w = sigma * sigma * tau
    lead = math.exp(k / 2.0 - k * k / (2.0 * w)) * w**1.5 / (k * k * SQRT_2PI)
    return intrinsic(k) + lead * (1.0 - (3.0 / (k * k) + 0.125) * w)


def bs_atm_smalltau(tau: float, sigma: float) -> float:
    """At-the-money call price to third order in ``sigma sqrt(tau)``."""
    s = sigma * math.sqrt(tau)
    return (s - s**3 / 24.0) / SQRT_2PI
