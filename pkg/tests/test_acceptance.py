"""Acceptance criteria, one test each, each reporting a PASS/FAIL line.

Run under pytest (the lines are printed in the terminal summary) or directly
with ``python3 tests/test_acceptance.py``.
"""

import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from conftest import BASE, EQUAL, FIG  # noqa: E402
from fwdsmile.asymptotics import (  # noqa: E402
    extrinsic_expansion,
    gaussian_cf_expansion,
    measure_changed_cf,
    otm_coefficients,
    rate_function,
    saddlepoint_expansion,
    e_tau_expansion,
    smile_coefficients,
    smile_expansion,
)
from fwdsmile.atm_asymptotics import atm_expansion, delta_moment  # noqa: E402
from fwdsmile.fourier_pricer import (  # noqa: E402
    forward_call,
    forward_digital,
    forward_otm,
    forward_put,
    forward_smile,
)
from fwdsmile.harness import default_k_grid  # noqa: E402
from fwdsmile.heston_core import (  # noqa: E402
    ForwardTenor,
    HestonParams,
    beta_t,
    e_tau,
    forward_lmgf,
    saddlepoint,
)

RESULTS: list[str] = []
TAUS = (1e-2, 1e-3, 1e-4)


def report(n: int, passed: bool, detail: str):
    line = f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    assert passed, line


def within_factor(values, factor=3.0):
    vals = [abs(v) for v in values]
    return max(vals) < factor * min(vals)


def test_c01_martingale_and_parity():
    worst_mart, worst_par = 0.0, 0.0
    for tau in (1 / 12, 1 / 24):
        worst_mart = max(worst_mart, abs(forward_lmgf(1.0, ForwardTenor(1.0, tau), BASE)))
        for k in default_k_grid():
            tenor = ForwardTenor(1.0, tau, k)
            c, p = forward_call(tenor, BASE), forward_put(tenor, BASE)
            worst_par = max(worst_par, abs(c.price - p.price + math.expm1(k)))
    report(1, worst_mart < 1e-10 and worst_par < 1e-9,
           f"max |Lambda(1)| = {worst_mart:.2e} (< 1e-10), max parity residual = {worst_par:.2e} (< 1e-9)")


def test_c02_rate_function_and_domain():
    edge = 1.0 / math.sqrt(beta_t(FIG, 1.0))
    tau = 1 / 50
    tenor, s = ForwardTenor(1.0, tau), math.sqrt(tau)
    inside = {sgn: forward_lmgf(sgn * (edge - 0.05), tenor, FIG, scale=s) for sgn in (-1, 1)}
    outside = {sgn: forward_lmgf(sgn * (edge + 0.05), tenor, FIG, scale=s) for sgn in (-1, 1)}
    ok_edge = abs(edge - 6.2887) <= 0.005
    ok_in = all(math.isfinite(v) for v in inside.values())
    ok_out = all(v == math.inf for v in outside.values())
    report(2, ok_edge and ok_in and ok_out,
           f"1/sqrt(beta) = {edge:.6f}; Lambda at -/+(edge-0.05): {inside[-1]:.4g}, {inside[1]:.4g}; "
           f"at -/+(edge+0.05): {outside[-1]:.4g}, {outside[1]:.4g}")


def test_c03_saddlepoint_and_e_tau_orders():
    k = 0.2
    c = otm_coefficients(k, 1.0, BASE)
    u_res = [(saddlepoint(k, ForwardTenor(1.0, tau, k), BASE) - saddlepoint_expansion(c, tau)) / tau
             for tau in TAUS]
    e_res = [(e_tau(k, ForwardTenor(1.0, tau, k), BASE) - e_tau_expansion(c, tau)) / tau**0.75 for tau in TAUS]
    report(3, within_factor(u_res) and within_factor(e_res),
           "u* residual/tau = " + ", ".join(f"{r:.4g}" for r in u_res)
           + "; e_tau residual/tau^0.75 = " + ", ".join(f"{r:.4g}" for r in e_res))


def test_c04_measure_changed_cf():
    k = 0.2
    c = otm_coefficients(k, 1.0, BASE)
    parts, ok = [], True
    for u in (0.5, 1.0, 2.0):
        res = [abs(measure_changed_cf(u, k, 1.0, tau, BASE) - gaussian_cf_expansion(u, c, tau, BASE)) / tau**0.375
               for tau in TAUS]
        ok &= within_factor(res)
        parts.append(f"u={u}: " + ", ".join(f"{r:.3g}" for r in res))
    report(4, ok, "residual/tau^(3/8): " + "; ".join(parts))


def test_c05_price_expansion_vs_fourier():
    ok, parts = True, []
    for k in (0.15, 0.2, 0.3):
        c = otm_coefficients(k, 1.0, BASE)
        ratios = [extrinsic_expansion(k, 1.0, tau, BASE, c) / forward_otm(ForwardTenor(1.0, tau, k), BASE).price
                  for tau in (1 / 12, 1 / 24, 1 / 100)]
        toward_one = all(abs(b - 1) < abs(a - 1) for a, b in zip(ratios, ratios[1:]))
        log_p = forward_otm(ForwardTenor(1.0, 1e-3, k), BASE).log_extrinsic
        dev = abs(math.sqrt(1e-3) * log_p / -c.lambda_star - 1)
        ok &= toward_one and dev <= 0.15
        parts.append(f"k={k}: ratios " + "/".join(f"{r:.3f}" for r in ratios)
                     + f", slope deviation {100 * dev:.1f}%")
    report(5, ok, "; ".join(parts))


def _beats(params, tau, better, worse):
    ks = [k for k in default_k_grid() if 0.15 - 1e-12 <= abs(k) <= 0.3 + 1e-12]
    wins = 0
    for k in ks:
        exact = forward_smile(ForwardTenor(1.0, tau, k), params).vol
        err = {o: abs(math.sqrt(smile_expansion(k, 1.0, tau, params, o)) - exact) for o in (better, worse)}
        wins += err[better] < err[worse]
    return wins, len(ks)


def test_c06_smile_expansion_vs_fourier():
    w1, n1 = _beats(BASE, 1 / 24, 1, 0)
    w3, n3 = _beats(EQUAL, 1 / 1000, 3, 1)
    report(6, w1 >= 0.9 * n1 and w3 >= 0.9 * n3,
           f"order 1 beats 0 on {w1}/{n1} strikes at tau=1/24; order 3 beats 1 on {w3}/{n3} at tau=1/1000 "
           "(4 kappa theta = xi^2)")


def test_c07_evenness_and_rho_independence():
    ref = smile_coefficients(0.2, 1.0, BASE)
    worst = 0.0
    for k in (0.2, -0.2):
        for rho in (-0.8, 0.0, 0.8):
            s = smile_coefficients(k, 1.0, HestonParams(BASE.kappa, BASE.theta, BASE.xi, rho, BASE.v))
            worst = max(worst, abs(s.v0 - ref.v0), abs(s.v1 - ref.v1))
    report(7, worst <= 1e-14, f"max |dv0|, |dv1| = {worst:.1e}")


def test_c08_atm():
    t, tau = 1.0, 1 / 12
    a = atm_expansion(t, FIG)
    vols = [forward_smile(ForwardTenor(t, x, 0.0), FIG).vol for x in (tau, tau / 2)]
    gap = abs(vols[0] - a.sigma0)
    bound = 2 * abs(a.sigma1) * tau
    r = [abs(v - a.vol(x)) for v, x in zip(vols, (tau, tau / 2))]
    ratio = r[0] / r[1]
    mean = FIG.theta + (FIG.v - FIG.theta) * math.exp(-FIG.kappa * t)
    d1 = abs(delta_moment(t, 1.0, FIG) - mean)
    d_half = abs(delta_moment(1e-6, 0.5, FIG) / math.sqrt(FIG.v) - 1)
    ok = gap < bound and ratio > 2 and d1 < 1e-12 and d_half < 1e-5
    report(8, ok, f"|sigma - sigma0| = {gap:.3g} < {bound:.3g}; halving ratio {ratio:.3f} > 2; "
                  f"|Delta(t,1) - mean| = {d1:.1e}; Delta(1e-6,1/2)/sqrt(v) - 1 = {d_half:.1e}")


def test_c09_ldp_trend():
    rate = rate_function(0.2, beta_t(BASE, 1.0))
    slopes = [-math.sqrt(tau) * math.log(forward_digital(ForwardTenor(1.0, tau, 0.2), BASE).price)
              for tau in (1 / 12, 1 / 24, 1 / 50, 1 / 100)]
    decreasing = all(a > b for a, b in zip(slopes, slopes[1:]))
    closing = all(abs(a - rate) > abs(b - rate) for a, b in zip(slopes, slopes[1:]))
    report(9, decreasing and closing,
           "-sqrt(tau) log P = " + ", ".join(f"{s:.4f}" for s in slopes) + f" -> rate {rate:.4f}")


def _cli():
    exe = shutil.which("fwdsmile")
    return [exe] if exe else [sys.executable, "-m", "fwdsmile.harness"]


def test_c10_determinism():
    with tempfile.TemporaryDirectory() as tmp:
        outs = []
        for run in ("a", "b"):
            out = Path(tmp) / run
            subprocess.run(_cli() + ["figure", "fig1", "--out", str(out)], check=True, capture_output=True)
            outs.append((out / "fig1.csv").read_bytes())
    report(10, outs[0] == outs[1] and len(outs[0]) > 0, f"two runs of fig1: {len(outs[0])} bytes, identical={outs[0] == outs[1]}")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted((n, f) for n, f in globals().items() if n.startswith("test_c")):
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
