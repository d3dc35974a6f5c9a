"""Forward-start call, put and digital prices by damped Fourier inversion.

For a damping ``alpha`` the call transform is

    e^{-alpha k} / pi * int_0^inf Re[ e^{-iuk} M(alpha + 1 + iu) / ((alpha + iu)(alpha + 1 + iu)) ] du

with ``M(z) = E[exp(z X)]`` the forward moment generating function.  The
residues at ``alpha = 0`` and ``alpha = -1`` mean the same integral returns
the call for ``alpha > 0``, the call minus one for ``-1 < alpha < 0`` and the
put for ``alpha < -1``.  Digitals use ``M(alpha + iu) / (alpha + iu)``:
``P(X > k)`` for ``alpha > 0`` and ``-P(X < k)`` for ``alpha < 0``.

By default the damping is placed at the saddlepoint of ``M(w) e^{-wk}``,
which keeps the integrand free of cancellation for any strike: the
out-of-the-money price is obtained to relative precision even when it is far
below ``1e-15``.  The integrand is normalised by its value at ``u = 0``, so
``abs_tol`` is measured in units of that price scale.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .bsm import implied_vol_otm, intrinsic
from .exceptions import DomainError, SolverError
from .heston_core import (
    ForwardTenor,
    HestonParams,
    _domain_unscaled,
    _saddle_unscaled,
    ab_functions,
    forward_lmgf,
    forward_lmgf_complex,
)
from .quadrature import integrate

__all__ = [
    "TRUNCATION_DOMINATED",
    "NEAR_INTRINSIC",
    "QuadratureSettings",
    "PriceResult",
    "SmileResult",
    "invert_call",
    "invert_digital",
    "forward_call",
    "forward_put",
    "forward_otm",
    "forward_digital",
    "forward_smile",
    "spot_call",
]

TRUNCATION_DOMINATED = "TRUNCATION_DOMINATED"
NEAR_INTRINSIC = "NEAR_INTRINSIC"

_POLE_GAP = 0.25      # minimum distance of the damping from a pole
_U_MAX = 1e9


@dataclass(frozen=True)
class QuadratureSettings:
    """Controls for the inversion integral.

    ``damping`` and ``truncation`` are chosen automatically when ``None``.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    damping: float | None = None
    truncation: float | None = None
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.truncation is not None and not self.truncation > 0:
            raise DomainError("truncation must be positive")
        if self.damping is not None and not math.isfinite(self.damping):
            raise DomainError("damping must be finite")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be a positive integer")

    def digest(self) -> str:
        """Short stable hash, used to tag outputs."""
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


@dataclass(frozen=True)
class PriceResult:
    """Outcome of one inversion.

    ``extrinsic`` is the out-of-the-money leg (the put for ``k < 0`` calls),
    ``log_extrinsic`` its logarithm, available even when it underflows.
    """

    price: float
    est_error: float
    n_evals: int
    flags: frozenset = field(default_factory=frozenset)
    damping: float = math.nan
    extrinsic: float = math.nan
    log_extrinsic: float = math.nan


class SmileResult(NamedTuple):
    vol: float
    flags: frozenset
    price: PriceResult


class _Inversion(NamedTuple):
    log_scale: float   # the result is exp(log_scale) * value
    value: float
    error: float
    n_evals: int
    truncated: bool


def _truncation(env: Callable[[float], float], target: float, start: float) -> tuple[float, float]:
    """Smallest doubling of ``start`` beyond which the tail bound is below ``target``.

    The tail beyond ``u`` is bounded by ``u * max envelope`` (envelope decaying
    at least like ``1/u^2``), sampled at ``u``, ``1.5u`` and ``2u``.
    """
    u = start
    while u < _U_MAX:
        tail = u * max(env(u), env(1.5 * u), env(2.0 * u))
        if tail < target:
            return u, tail
        u *= 2.0
    return u, env(u) * u


def _segmented(f, upper: float, k: float, q: QuadratureSettings) -> tuple[float, float, int]:
    """Integrate ``f`` on ``[0, upper]`` segment by segment.

    Segments start out with ``max_subdivisions // 8`` panels of about two
    periods of ``exp(-iuk)`` each, and each gets its own subdivision budget.
    The first segment fixes the tolerance; the rest share it equally.
    """
    n_init = max(q.max_subdivisions // 8, 8)
    width = n_init * 4.0 * math.pi / max(abs(k), 0.1)
    n_seg = max(1, math.ceil(upper / width))
    edges = np.linspace(0.0, upper, n_seg + 1)
    n_first = int(min(n_init, max(8, math.ceil(n_init * (edges[1] / width)))))
    first = integrate(f, 0.0, edges[1], abs_tol=q.abs_tol, rel_tol=q.rel_tol,
                      max_subdivisions=q.max_subdivisions, initial_panels=n_first)
    value, error, n_evals = first.value, first.error, first.n_evals
    if n_seg > 1:
        share = max(q.abs_tol, q.rel_tol * abs(first.value)) / (n_seg - 1)
        for lo, hi in zip(edges[1:-1], edges[2:]):
            r = integrate(f, lo, hi, abs_tol=share, rel_tol=1e-300,
                          max_subdivisions=q.max_subdivisions, initial_panels=n_init)
            value += r.value
            error += r.error
            n_evals += r.n_evals
    return value, error, n_evals


def _invert(lmgf: Callable, shift: float, k: float, alpha: float, digital: bool,
            q: QuadratureSettings, u_scale: float) -> _Inversion:
    """Normalised transform integral at real abscissa ``w0 = alpha + shift``."""
    w0 = alpha + shift
    lam0 = float(np.real(lmgf(np.array([complex(w0)]))[0]))
    den0 = alpha if digital else alpha * (alpha + 1.0)

    def integrand(u):
        z = w0 + 1j * np.asarray(u)
        den = (alpha + 1j * u) if digital else (alpha + 1j * u) * (alpha + 1.0 + 1j * u)
        return np.exp(lmgf(z) - lam0 - 1j * u * k) * (den0 / den)

    def env(u):
        return float(np.abs(integrand(np.array([u]))[0]))

    target = q.abs_tol / 10.0
    if q.truncation is not None:
        upper, tail = q.truncation, env(q.truncation) * q.truncation
    else:
        upper, tail = _truncation(env, target, 8.0 * u_scale)
    res_value, res_error, n_evals = _segmented(integrand, upper, k, q)
    log_scale = lam0 - alpha * k - math.log(math.pi * abs(den0))
    value = math.copysign(1.0, den0) * res_value
    truncated = tail > max(q.abs_tol, q.rel_tol * abs(value))
    return _Inversion(log_scale, value, res_error + tail, n_evals + 3, truncated)


def _fwd_lmgf(tenor: ForwardTenor, params: HestonParams):
    return lambda z: forward_lmgf_complex(z, tenor, params)


def _auto_damping(k: float, tenor: ForwardTenor, params: HestonParams, digital: bool,
                  positive: bool) -> float:
    """Damping at the saddlepoint, kept away from the pole and inside the domain.

    In terms of ``w = alpha + shift`` the admissible interval is ``(1, hi)``
    for calls, ``(lo, 0)`` for puts, ``(0, hi)`` and ``(lo, 0)`` for the upper
    and lower digital tails.
    """
    lo, hi = _domain_unscaled(tenor, params)
    shift = 0.0 if digital else 1.0
    pole = 1.0 if (positive and not digital) else 0.0
    edge, sign = (hi, 1.0) if positive else (lo, -1.0)
    try:
        w0 = _saddle_unscaled(k, tenor, params)
    except SolverError:
        w0 = pole
    if sign * (w0 - pole) < _POLE_GAP:
        w0 = pole + sign * _POLE_GAP
    if sign * (w0 - edge) >= 0:
        w0 = pole + 0.5 * (edge - pole)
    return w0 - shift


def _u_scale(tenor: ForwardTenor, params: HestonParams) -> float:
    """Frequency scale of the characteristic function, ``1/(sd of X)`` roughly."""
    var = max(params.v, params.theta) * tenor.tau
    return 1.0 / math.sqrt(var)


def _call_result(k: float, inv: _Inversion, alpha: float, want: str) -> PriceResult:
    """Turn a call-transform inversion into a call, put or out-of-the-money price.

    The transform yields the call (``alpha > 0``), the call minus one
    (``-1 < alpha < 0``) or the put (``alpha < -1``).  When that product is
    already the out-of-the-money leg its logarithm is kept exact; otherwise
    the conversion goes through put-call parity.
    """
    if alpha == 0.0 or alpha == -1.0:
        raise DomainError(f"damping {alpha} sits on a pole of the transform")
    flags = {TRUNCATION_DOMINATED} if inv.truncated else set()
    scale = math.exp(inv.log_scale)
    raw, err = scale * inv.value, scale * inv.error
    native_otm = (k >= 0 and alpha > 0) or (k < 0 and alpha < -1)
    if native_otm:
        log_otm = inv.log_scale + math.log(inv.value) if inv.value > 0 else -math.inf
        otm = raw
        call = intrinsic(k) + otm
        put = otm + (math.expm1(k) if k >= 0 else 0.0)
    else:
        if alpha > 0:
            call, put = raw, raw + math.expm1(k)
        elif alpha < -1:
            call, put = raw - math.expm1(k), raw
        else:
            call, put = raw + 1.0, raw + math.exp(k)
        otm = call if k >= 0 else put
        log_otm = math.log(otm) if otm > 0 else -math.inf
    if not otm > 10.0 * err:
        flags.add(NEAR_INTRINSIC)
    price = {"call": call, "put": put, "otm": otm}[want]
    return PriceResult(price=price, est_error=err, n_evals=inv.n_evals, flags=frozenset(flags),
                       damping=alpha, extrinsic=otm, log_extrinsic=log_otm)


def invert_call(k: float, lmgf: Callable, alpha: float, q: QuadratureSettings | None = None,
                u_scale: float = 1.0, want: str = "call") -> PriceResult:
    """Call (or ``want="put"``/``"otm"``) on ``e^X`` from ``E[exp(zX)] = exp(lmgf(z))``.

    ``lmgf`` must accept complex arrays; ``alpha + 1`` must lie in its domain.
    """
    q = q or QuadratureSettings()
    if alpha == 0.0 or alpha == -1.0:
        raise DomainError(f"damping {alpha} sits on a pole of the transform")
    inv = _invert(lmgf, 1.0, k, alpha, False, q, u_scale)
    return _call_result(k, inv, alpha, want)


def invert_digital(k: float, lmgf: Callable, alpha: float, q: QuadratureSettings | None = None,
                   u_scale: float = 1.0) -> PriceResult:
    """``P(X > k)`` for ``alpha > 0``, ``P(X < k)`` for ``alpha < 0``."""
    q = q or QuadratureSettings()
    if alpha == 0.0:
        raise DomainError("digital damping must be nonzero")
    inv = _invert(lmgf, 0.0, k, alpha, True, q, u_scale)
    sign = 1.0 if alpha > 0 else -1.0
    scale = math.exp(inv.log_scale)
    prob = sign * scale * inv.value
    flags = frozenset({TRUNCATION_DOMINATED}) if inv.truncated else frozenset()
    log_p = inv.log_scale + math.log(sign * inv.value) if sign * inv.value > 0 else -math.inf
    return PriceResult(price=prob, est_error=scale * inv.error, n_evals=inv.n_evals, flags=flags,
                       damping=alpha, extrinsic=prob, log_extrinsic=log_p)


def _check_damping(alpha: float, shift: float, tenor: ForwardTenor, params: HestonParams):
    w0 = alpha + shift
    if not math.isfinite(forward_lmgf(w0, tenor, params)):
        raise DomainError(f"damping {alpha} puts the moment {w0} outside the finite domain")


def _forward(tenor: ForwardTenor, params: HestonParams, q: QuadratureSettings | None,
             want: str) -> PriceResult:
    q = q or QuadratureSettings()
    k = tenor.k
    if q.damping is None:
        positive = {"call": True, "put": False, "otm": k >= 0}[want]
        alpha = _auto_damping(k, tenor, params, False, positive)
    else:
        alpha = q.damping
        _check_damping(alpha, 1.0, tenor, params)
    return invert_call(k, _fwd_lmgf(tenor, params), alpha, q, _u_scale(tenor, params), want)


def forward_call(tenor: ForwardTenor, params: HestonParams,
                 q: QuadratureSettings | None = None) -> PriceResult:
    """``E[(exp(X_{t+tau} - X_t) - e^k)^+]``; automatic damping is always positive."""
    return _forward(tenor, params, q, "call")


def forward_put(tenor: ForwardTenor, params: HestonParams,
                q: QuadratureSettings | None = None) -> PriceResult:
    """Put counterpart of :func:`forward_call`, integrated with damping below ``-1``.

    Calls and puts therefore come from different contours, so put-call parity
    is a genuine check of the inversion.
    """
    return _forward(tenor, params, q, "put")


def forward_otm(tenor: ForwardTenor, params: HestonParams,
                q: QuadratureSettings | None = None) -> PriceResult:
    """Out-of-the-money leg (call for ``k >= 0``, put for ``k < 0``) to relative precision."""
    return _forward(tenor, params, q, "otm")


def forward_digital(tenor: ForwardTenor, params: HestonParams,
                    q: QuadratureSettings | None = None, side: str = "above") -> PriceResult:
    """``P(X >= k)`` (``side="above"``) or ``P(X <= k)`` (``side="below"``)."""
    if side not in ("above", "below"):
        raise DomainError(f"side must be 'above' or 'below', got {side!r}")
    q = q or QuadratureSettings()
    if q.damping is None:
        # integrate the tail on the saddlepoint's side, complement the other
        try:
            direct = "above" if _saddle_unscaled(tenor.k, tenor, params) > 0 else "below"
        except SolverError:
            direct = side
        alpha = _auto_damping(tenor.k, tenor, params, True, direct == "above")
        r = invert_digital(tenor.k, _fwd_lmgf(tenor, params), alpha, q, _u_scale(tenor, params))
        if direct == side:
            return r
        p = 1.0 - r.price
        log_p = math.log(p) if p > 0 else -math.inf
        return PriceResult(p, r.est_error, r.n_evals, r.flags, r.damping, p, log_p)
    else:
        alpha = q.damping
        if (alpha > 0) != (side == "above"):
            raise DomainError(f"damping {alpha} has the wrong sign for side {side!r}")
        _check_damping(alpha, 0.0, tenor, params)
    return invert_digital(tenor.k, _fwd_lmgf(tenor, params), alpha, q, _u_scale(tenor, params))


def forward_smile(tenor: ForwardTenor, params: HestonParams,
                  q: QuadratureSettings | None = None) -> SmileResult:
    """Forward implied volatility ``sigma_{t,tau}(k)`` from the exact price.

    The out-of-the-money leg is inverted directly.  ``NEAR_INTRINSIC`` in
    ``flags`` marks a price not resolved above its quadrature error.
    """
    r = forward_otm(tenor, params, q)
    if not math.isfinite(r.log_extrinsic) or r.extrinsic < 0:
        raise DomainError(f"price {r.price!r} not above intrinsic at k={tenor.k}; flags={set(r.flags)}")
    vol = implied_vol_otm(None, tenor.k, tenor.tau, log_price=r.log_extrinsic, warn=False)
    return SmileResult(vol, r.flags, r)


def spot_call(k: float, tau: float, params: HestonParams,
              q: QuadratureSettings | None = None) -> PriceResult:
    """Vanilla Heston call with initial variance ``params.v``; same inversion engine."""
    q = q or QuadratureSettings()

    def lmgf(z):
        a_val, b_val = ab_functions(z, tau, params)
        return a_val + params.v * b_val

    alpha = q.damping if q.damping is not None else _POLE_GAP
    return invert_call(k, lmgf, alpha, q, 1.0 / math.sqrt(params.v * tau))
