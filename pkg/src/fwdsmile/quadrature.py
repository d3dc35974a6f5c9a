"""Globally adaptive 7/15-point Gauss-Kronrod quadrature for vectorised integrands."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import QuadratureError

# QUADPACK qk15 abscissae (positive half, descending) and weights.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_g = np.zeros(15)
_g[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])
GAUSS_WEIGHTS = _g


@dataclass
class QuadResult:
    value: float
    error: float
    n_evals: int
    n_panels: int


def gk15_panels(f, lo: np.ndarray, hi: np.ndarray):
    """Kronrod values and ``|kronrod - gauss|`` errors on many panels with one call of ``f``."""
    half = 0.5 * (hi - lo)
    x = (0.5 * (lo + hi))[:, None] + half[:, None] * NODES[None, :]
    y = np.asarray(f(x.ravel())).real.reshape(x.shape)
    k = half * (y @ KRONROD_WEIGHTS)
    g = half * (y @ GAUSS_WEIGHTS)
    return k, np.abs(k - g)


def gk15(f, a: float, b: float):
    """Single-panel rule; returns ``(kronrod, |kronrod - gauss|)``."""
    k, e = gk15_panels(f, np.array([a]), np.array([b]))
    return float(k[0]), float(e[0])


def integrate(f, a: float, b: float, abs_tol: float = 1e-10, rel_tol: float = 1e-10,
              max_subdivisions: int = 2000, initial_panels: int = 1) -> QuadResult:
    """Integrate the real part of ``f`` over ``[a, b]``.

    ``f`` must accept a 1-d array of abscissae.  Each round bisects every
    panel whose error exceeds its share of the tolerance, evaluating all new panels in one batch, until the summed error is
    below ``max(abs_tol, rel_tol * |I|)``.  ``max_subdivisions`` bounds the
    number of bisections beyond the initial partition.  Panels are kept in
    left-to-right order, so the result is bitwise reproducible.
    """
    edges = np.linspace(a, b, initial_panels + 1)
    lo, hi = edges[:-1], edges[1:]
    val, err = gk15_panels(f, lo, hi)
    n_evals = 15 * lo.size
    splits = 0
    while True:
        total, total_err = float(np.sum(val)), float(np.sum(err))
        target = max(abs_tol, rel_tol * abs(total))
        if total_err <= target:
            return QuadResult(total, total_err, n_evals, lo.size)
        pick = err > target / lo.size
        n_pick = int(np.count_nonzero(pick))
        if splits + n_pick > max_subdivisions:
            raise QuadratureError(
                f"no convergence on [{a}, {b}] after {splits} bisections: "
                f"value={total:.6e}, error={total_err:.3e}, target={target:.3e}")
        splits += n_pick
        mid = 0.5 * (lo[pick] + hi[pick])
        new_lo = np.concatenate([lo[pick], mid])
        new_hi = np.concatenate([mid, hi[pick]])
        v_new, e_new = gk15_panels(f, new_lo, new_hi)
        n_evals += 15 * new_lo.size
        lo = np.concatenate([lo[~pick], new_lo])
        hi = np.concatenate([hi[~pick], new_hi])
        val = np.concatenate([val[~pick], v_new])
        err = np.concatenate([err[~pick], e_new])
        order = np.argsort(lo, kind="stable")
        lo, hi, val, err = lo[order], hi[order], val[order], err[order]
