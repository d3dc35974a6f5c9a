"""Figure data, error tables and diagnostic sweeps, plus the ``fwdsmile`` command line."""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import (
    ATM_BAND,
    e_tau_expansion,
    gaussian_cf_expansion,
    measure_changed_cf,
    otm_coefficients,
    rate_function,
    saddlepoint_expansion,
    smile_coefficients,
    smile_expansion,
    u_star_prefactor,
    u_star_prefactor_expansion,
)
from .atm_asymptotics import Regime, atm_expansion
from .exceptions import ConfigError, DomainError, FwdSmileError, GateError
from .fourier_pricer import (
    QuadratureSettings,
    forward_call,
    forward_digital,
    forward_put,
    forward_smile,
)
from .heston_core import (
    ForwardTenor,
    HestonParams,
    beta_t,
    e_tau,
    forward_domain,
    forward_lmgf,
    lmgf_derivative,
    saddlepoint,
)

__all__ = [
    "DEFAULT_PARAMS",
    "FIG3_PARAMS",
    "CSV_HEADER",
    "RunConfig",
    "ErrorRow",
    "default_k_grid",
    "figure_config",
    "apply_overrides",
    "error_rows",
    "run_figure",
    "diagnostics_report",
    "run_diagnostics",
    "main",
]

DEFAULT_PARAMS = HestonParams(kappa=1.0, theta=0.07, xi=0.52, rho=-0.8, v=0.07)
FIG3_PARAMS = HestonParams(kappa=1.0, theta=0.07, xi=0.4, rho=-0.6, v=0.07)
FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6")
CSV_HEADER = ("k,tau,exact_vol,asym_vol_0,asym_vol_1,asym_vol_2,asym_vol_3,"
              "abs_err_0,abs_err_1,abs_err_2,abs_err_3,flags")
FIG3_HEADER = "t,tau,exact_vol,sigma0,sigma1,asym_vol_0,asym_vol_1,abs_err_0,abs_err_1,flags"
FIG6_HEADER = "tau,u,dlambda_du,domain_lo,domain_hi,flags"
FIG6_POINTS = 201
DIAG_STRIKE = 0.2
LDP_TAUS = (1 / 12, 1 / 24, 1 / 50, 1 / 100)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_DIAGNOSTIC = 0, 1, 2, 3


def default_k_grid(n: int = 41, width: float = 0.4, band: float = 1e-3) -> list[float]:
    """``n`` equally spaced strikes on ``[-width, width]`` minus the ATM band."""
    ks = np.linspace(-width, width, n)
    return [float(k) for k in ks if abs(k) >= band]


@dataclass
class RunConfig:
    """Inputs of one harness run; the JSON form uses the same field names.

    ``t_grid`` is only read by ``fig3``.
    """

    params: HestonParams = DEFAULT_PARAMS
    t: float = 1.0
    tau_list: list = field(default_factory=lambda: [1 / 24])
    k_grid: list = field(default_factory=default_k_grid)
    orders: list = field(default_factory=lambda: [0, 1, 2, 3])
    quadrature: QuadratureSettings = field(default_factory=QuadratureSettings)
    outputs: str = "out"
    formats: list = field(default_factory=lambda: ["csv", "plotdata"])
    t_grid: list = field(default_factory=lambda: [0.25 * i for i in range(1, 9)])

    def validate(self) -> "RunConfig":
        if not self.tau_list:
            raise ConfigError("tau_list must not be empty")
        if not self.k_grid:
            raise ConfigError("k_grid must not be empty")
        if not self.t_grid:
            raise ConfigError("t_grid must not be empty")
        if any(not (x > 0 and math.isfinite(x)) for x in [self.t, *self.tau_list, *self.t_grid]):
            raise ConfigError("t, tau_list and t_grid entries must be positive and finite")
        if any(not math.isfinite(k) for k in self.k_grid):
            raise ConfigError("k_grid entries must be finite")
        if not set(self.orders) <= {0, 1, 2, 3} or not self.orders:
            raise ConfigError(f"orders must be a nonempty subset of 0..3, got {self.orders}")
        if not set(self.formats) <= {"csv", "plotdata"}:
            raise ConfigError(f"formats must be a subset of csv, plotdata, got {self.formats}")
        return self

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        try:
            if "params" in d:
                d["params"] = HestonParams(**d["params"])
            if "quadrature" in d:
                d["quadrature"] = QuadratureSettings(**d["quadrature"])
            cfg = cls(**d)
        except (TypeError, DomainError) as exc:
            raise ConfigError(f"invalid config: {exc}") from exc
        return cfg.validate()

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            with open(path) as fh:
                return cls.from_dict(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc


@dataclass
class ErrorRow:
    k: float
    tau: float
    exact_vol: float | None
    asym_vol: dict
    abs_err: dict
    flags: list

    def csv_line(self) -> str:
        cells = [_fmt(self.k), _fmt(self.tau), _fmt(self.exact_vol)]
        cells += [_fmt(self.asym_vol.get(o)) for o in range(4)]
        cells += [_fmt(self.abs_err.get(o)) for o in range(4)]
        cells.append(";".join(self.flags))
        return ",".join(cells)


def _fmt(x) -> str:
    return "" if x is None else "%.17g" % x


def figure_config(name: str) -> RunConfig:
    """Preset configuration of one figure."""
    if name not in FIGURES:
        raise ConfigError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}")
    presets = {
        "fig1": dict(t=1.0, tau_list=[1 / 24]),
        "fig2": dict(t=1.0, tau_list=[1 / 12]),
        "fig3": dict(params=FIG3_PARAMS, tau_list=[1 / 12], k_grid=[0.0], orders=[0, 1]),
        "fig4": dict(t=1.0, tau_list=[1 / 100, 1 / 1000]),
        "fig5": dict(t=1 / 12, tau_list=[1 / 1000]),
        "fig6": dict(params=FIG3_PARAMS, t=1.0, tau_list=[1.0, 1 / 2, 1 / 12, 1 / 50]),
    }
    return RunConfig(**presets[name]).validate()


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    parts = [p for p in text.split(",") if p]
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        return text
    return vals if len(vals) != 1 or "," in text else vals[0]


def apply_overrides(cfg: RunConfig, overrides) -> RunConfig:
    """Apply ``key=value`` strings or a mapping.

    Keys are config fields, ``params.<name>`` / ``quadrature.<name>`` or a bare
    model parameter name such as ``xi``.
    """
    if overrides is None:
        return cfg
    if isinstance(overrides, RunConfig):
        return overrides.validate()
    items = overrides.items() if isinstance(overrides, dict) else [_split(o) for o in overrides]
    d = cfg.to_dict()
    param_names = {f.name for f in dataclasses.fields(HestonParams)}
    quad_names = {f.name for f in dataclasses.fields(QuadratureSettings)}
    for key, value in items:
        if isinstance(value, str):
            value = _parse_value(value)
        if key.startswith("params."):
            key = key[len("params."):]
            if key not in param_names:
                raise ConfigError(f"unknown model parameter {key!r}")
            d["params"][key] = value
        elif key.startswith("quadrature."):
            key = key[len("quadrature."):]
            if key not in quad_names:
                raise ConfigError(f"unknown quadrature setting {key!r}")
            d["quadrature"][key] = value
        elif key in param_names:
            d["params"][key] = value
        elif key in d:
            if key in ("tau_list", "k_grid", "orders", "formats", "t_grid") and not isinstance(value, list):
                value = [value]
            d[key] = value
        else:
            raise ConfigError(f"unknown override key {key!r}")
    if "orders" in d:
        d["orders"] = [int(o) for o in d["orders"]]
    return RunConfig.from_dict(d)


def _split(text: str):
    if "=" not in text:
        raise ConfigError(f"override must look like key=value, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def _provenance(q: QuadratureSettings) -> list[str]:
    return [f"engine=fwdsmile-{__version__}", f"quad={q.digest()}"]


def error_rows(cfg: RunConfig) -> list[ErrorRow]:
    """Exact and asymptotic forward smiles on the ``(tau, k)`` grid, ordered by ``(tau, k)``."""
    cfg.validate()
    rows = []
    prov = _provenance(cfg.quadrature)
    for tau in sorted(cfg.tau_list, reverse=True):
        for k in sorted(cfg.k_grid):
            flags: list[str] = []
            exact = None
            try:
                res = forward_smile(ForwardTenor(cfg.t, tau, k), cfg.params, cfg.quadrature)
                exact = res.vol
                flags += sorted(res.flags)
            except FwdSmileError as exc:
                flags.append(f"PRICE_FAILED:{type(exc).__name__}")
            asym, err = {}, {}
            if abs(k) < ATM_BAND:
                flags.append("ATM_BAND")
            else:
                coeffs = smile_coefficients(k, cfg.t, cfg.params)
                gated = [o for o in cfg.orders if o > coeffs.max_valid_order]
                if gated:
                    flags.append("GATED:" + "".join(str(o) for o in gated))
                for o in sorted(cfg.orders):
                    if o > coeffs.max_valid_order:
                        continue
                    try:
                        asym[o] = math.sqrt(smile_expansion(k, cfg.t, tau, cfg.params, o, coeffs))
                    except DomainError:
                        flags.append(f"ASYM_FAILED:{o}")
                        continue
                    if exact is not None:
                        err[o] = abs(asym[o] - exact)
            rows.append(ErrorRow(k, tau, exact, asym, err, flags + prov))
    return rows


def _write_lines(path: Path, lines: list[str]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _plotdata(path: Path, xs, ys) -> Path:
    lines = ["%.17g %.17g" % (x, y) for x, y in zip(xs, ys) if y is not None]
    return _write_lines(path, lines)


def _smile_outputs(name: str, cfg: RunConfig, out: Path) -> list[Path]:
    rows = error_rows(cfg)
    files = []
    if "csv" in cfg.formats:
        files.append(_write_lines(out / f"{name}.csv", [CSV_HEADER] + [r.csv_line() for r in rows]))
    if "plotdata" in cfg.formats:
        taus = sorted({r.tau for r in rows}, reverse=True)
        for i, tau in enumerate(taus):
            sel = [r for r in rows if r.tau == tau]
            ks = [r.k for r in sel]
            files.append(_plotdata(out / f"{name}_tau{i}_exact.dat", ks, [r.exact_vol for r in sel]))
            for o in sorted(cfg.orders):
                if any(o in r.asym_vol for r in sel):
                    files.append(_plotdata(out / f"{name}_tau{i}_order{o}.dat", ks,
                                           [r.asym_vol.get(o) for r in sel]))
                    files.append(_plotdata(out / f"{name}_tau{i}_error{o}.dat", ks,
                                           [r.abs_err.get(o) for r in sel]))
    return files


def _atm_outputs(name: str, cfg: RunConfig, out: Path) -> list[Path]:
    tau = cfg.tau_list[0]
    prov = _provenance(cfg.quadrature)
    lines, series = [FIG3_HEADER], {"exact": [], "order0": [], "order1": []}
    for t in sorted(cfg.t_grid):
        flags: list[str] = []
        exact = None
        try:
            res = forward_smile(ForwardTenor(t, tau, 0.0), cfg.params, cfg.quadrature)
            exact = res.vol
            flags += sorted(res.flags)
        except FwdSmileError as exc:
            flags.append(f"PRICE_FAILED:{type(exc).__name__}")
        a = atm_expansion(t, cfg.params)
        asym = {0: a.sigma0, 1: a.vol(tau) if a.sigma1 is not None else None}
        if a.regime is Regime.DEGENERATE:
            flags.append("GATED:1")
        err = {o: (abs(v - exact) if v is not None and exact is not None else None)
               for o, v in asym.items()}
        lines.append(",".join([_fmt(t), _fmt(tau), _fmt(exact), _fmt(a.sigma0), _fmt(a.sigma1),
                               _fmt(asym[0]), _fmt(asym[1]), _fmt(err[0]), _fmt(err[1]),
                               ";".join(flags + prov)]))
        series["exact"].append((t, exact))
        series["order0"].append((t, asym[0]))
        series["order1"].append((t, asym[1]))
    files = []
    if "csv" in cfg.formats:
        files.append(_write_lines(out / f"{name}.csv", lines))
    if "plotdata" in cfg.formats:
        for key, pts in series.items():
            files.append(_plotdata(out / f"{name}_{key}.dat", [p[0] for p in pts], [p[1] for p in pts]))
    return files


def _lmgf_slope_outputs(name: str, cfg: RunConfig, out: Path) -> list[Path]:
    lines = [FIG6_HEADER]
    files = []
    for i, tau in enumerate(sorted(cfg.tau_list, reverse=True)):
        tenor = ForwardTenor(cfg.t, tau)
        st = math.sqrt(tau)
        lo, hi = forward_domain(tenor, cfg.params, scale=st)
        us = np.linspace(lo, hi, FIG6_POINTS + 2)[1:-1]
        pts = []
        for u in us:
            u = float(u)
            try:
                d = lmgf_derivative(u, tenor, cfg.params, scale=st)
                flag = ""
            except FwdSmileError as exc:
                d, flag = None, f"FAILED:{type(exc).__name__}"
            lines.append(",".join([_fmt(tau), _fmt(u), _fmt(d), _fmt(lo), _fmt(hi), flag]))
            pts.append((u, d))
        if "plotdata" in cfg.formats:
            files.append(_plotdata(out / f"{name}_tau{i}.dat", [p[0] for p in pts], [p[1] for p in pts]))
    if "csv" in cfg.formats:
        files.insert(0, _write_lines(out / f"{name}.csv", lines))
    return files


def run_figure(name: str, overrides=None, out: str | Path | None = None) -> list[Path]:
    """Write the data behind one figure and return the files produced."""
    cfg = apply_overrides(figure_config(name), overrides)
    target = Path(out if out is not None else cfg.outputs)
    if name == "fig3":
        files = _atm_outputs(name, cfg, target)
    elif name == "fig6":
        files = _lmgf_slope_outputs(name, cfg, target)
    else:
        files = _smile_outputs(name, cfg, target)
    return sorted(files)


# ---------------------------------------------------------------- diagnostics

def _bounded(values: list[float], factor: float = 3.0, two_sided: bool = True) -> bool:
    """Scaled residuals stay within a factor ``factor`` of each other.

    With ``two_sided=False`` only growth as tau decreases counts, which is the
    test for an upper bound ``O(tau^p)``.
    """
    vals = [abs(v) for v in values]
    if not all(math.isfinite(v) for v in vals):
        return False
    top = max(vals[1:], default=0.0)
    if two_sided:
        return max(vals) <= factor * max(min(vals), 1e-300)
    return top <= factor * max(vals[0], 1e-300)


def _check(name: str, passed: bool, **detail) -> dict:
    return {"name": name, "passed": bool(passed), **detail}


def diagnostics_report(cfg: RunConfig, corrupt: dict | None = None) -> dict:
    """Run every diagnostic check and return the report as a dictionary.

    ``corrupt`` maps coefficient names to multipliers applied to the closed-form
    coefficients; it exists to show that each check can fail.
    """
    cfg.validate()
    p, t, q = cfg.params, cfg.t, cfg.quadrature
    taus = sorted(cfg.tau_list, reverse=True)
    k = DIAG_STRIKE
    coeffs = otm_coefficients(k, t, p)
    if corrupt:
        bad = set(corrupt) - set(coeffs.as_dict())
        if bad:
            raise ConfigError(f"unknown coefficients to corrupt: {sorted(bad)}")
        coeffs = dataclasses.replace(coeffs, **{n: getattr(coeffs, n) * m for n, m in corrupt.items()})
    checks = []

    mart = [abs(forward_lmgf(1.0, ForwardTenor(t, tau), p)) for tau in taus]
    checks.append(_check("martingale", max(mart) < 1e-10, values=mart, tol=1e-10))

    worst = 0.0
    for tau in taus:
        for kk in cfg.k_grid:
            tenor = ForwardTenor(t, tau, kk)
            c, pp = forward_call(tenor, p, q), forward_put(tenor, p, q)
            worst = max(worst, abs(c.price - pp.price + math.expm1(kk)))
    checks.append(_check("put_call_parity", worst < 1e-9, max_residual=worst, tol=1e-9))

    u_res, e_res, pref_res = [], [], []
    phi_res: dict[float, list] = {0.5: [], 1.0: [], 2.0: []}
    for tau in taus:
        tenor = ForwardTenor(t, tau, k)
        us = saddlepoint(k, tenor, p)
        u_res.append((us - saddlepoint_expansion(coeffs, tau)) / tau)
        e_res.append((e_tau(k, tenor, p) - e_tau_expansion(coeffs, tau)) / tau**0.75)
        for u in phi_res:
            exact = measure_changed_cf(u, k, t, tau, p, u_star=us)
            approx = gaussian_cf_expansion(u, coeffs, tau, p)
            phi_res[u].append(float(abs(exact - approx)) / tau**0.375)
        lp = u_star_prefactor(k, t, tau, p, u_star=us, log=True)
        pref_res.append((lp - u_star_prefactor_expansion(coeffs, tau, p, log=True)) / math.sqrt(tau))
    checks.append(_check("saddlepoint_expansion", _bounded(u_res), scaled_residuals=u_res, power=1.0))
    checks.append(_check("e_tau_expansion", _bounded(e_res), scaled_residuals=e_res, power=0.75))
    checks.append(_check("measure_changed_cf", all(_bounded(v) for v in phi_res.values()),
                         scaled_residuals={str(u): v for u, v in phi_res.items()}, power=0.375))
    checks.append(_check("saddlepoint_prefactor", _bounded(pref_res, two_sided=False), scaled_residuals=pref_res,
                         power=0.5))

    lam_star = rate_function(k, beta_t(p, t))
    slopes = []
    for tau in LDP_TAUS:
        d = forward_digital(ForwardTenor(t, tau, k), p, q, side="above")
        slopes.append(-math.sqrt(tau) * math.log(d.price))
    gaps = [s - lam_star for s in slopes]
    ldp_ok = all(a > b for a, b in zip(slopes, slopes[1:])) and all(
        abs(a) > abs(b) for a, b in zip(gaps, gaps[1:]))
    checks.append(_check("ldp_slope_trend", ldp_ok, slopes=slopes, rate=lam_star))

    atm = atm_expansion(t, p)
    if atm.regime is Regime.FELLER_STRICT:
        tau0 = 1 / 12
        r = [abs(forward_smile(ForwardTenor(t, x, 0.0), p, q).vol - atm.vol(x)) for x in (tau0, tau0 / 2)]
        ratio = r[0] / r[1] if r[1] > 0 else math.inf
        checks.append(_check("atm_ratio_halving", ratio > 2.0, residuals=r, ratio=ratio))
    else:
        checks.append(_check("atm_ratio_halving", True, skipped="first-order ATM term not defined"))

    return {
        "engine": f"fwdsmile-{__version__}",
        "quadrature": q.digest(),
        "config": cfg.to_dict(),
        "corrupt": corrupt or {},
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
    }


def run_diagnostics(cfg: RunConfig, corrupt: dict | None = None, out: str | Path | None = None) -> Path:
    """Write ``diagnostics.json`` under ``out`` (default ``cfg.outputs``) and return its path."""
    report = diagnostics_report(cfg, corrupt)
    target = Path(out if out is not None else cfg.outputs) / "diagnostics.json"
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return target


def diagnostic_config() -> RunConfig:
    return RunConfig(tau_list=[1e-2, 1e-3, 1e-4]).validate()


# ---------------------------------------------------------------- command line

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _model_args(sp: argparse.ArgumentParser, need_k: bool = True):
    d = DEFAULT_PARAMS
    sp.add_argument("--kappa", type=float, default=d.kappa)
    sp.add_argument("--theta", type=float, default=d.theta)
    sp.add_argument("--xi", type=float, default=d.xi)
    sp.add_argument("--rho", type=float, default=d.rho)
    sp.add_argument("--v0", type=float, default=d.v)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--tau", type=float, required=True)
    if need_k:
        sp.add_argument("--k", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=None, help="damping parameter")
    sp.add_argument("--tol", type=float, default=None, help="absolute and relative tolerance")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fwdsmile", description=__doc__)
    parser.add_argument("--version", action="version", version=f"fwdsmile {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _model_args(sub.add_parser("price", help="exact forward-start call and put"))
    sp = sub.add_parser("smile", help="exact and asymptotic forward implied volatility")
    _model_args(sp)
    sp.add_argument("--order", type=int, default=1, choices=[0, 1, 2, 3])
    _model_args(sub.add_parser("atm", help="at-the-money forward volatility"), need_k=False)
    sp = sub.add_parser("figure", help="write figure data")
    sp.add_argument("name", choices=FIGURES)
    sp.add_argument("--out", default=None)
    sp.add_argument("--override", action="append", default=[], metavar="KEY=VAL")
    sp = sub.add_parser("diag", help="run the diagnostic checks")
    sp.add_argument("--config", default=None)
    sp.add_argument("--out", default=None)
    return parser


def _model(ns) -> tuple[HestonParams, QuadratureSettings]:
    try:
        params = HestonParams(ns.kappa, ns.theta, ns.xi, ns.rho, ns.v0)
        kw = {}
        if ns.tol is not None:
            kw.update(abs_tol=ns.tol, rel_tol=ns.tol)
        return params, QuadratureSettings(damping=ns.alpha, **kw)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def _emit(d: dict):
    print(json.dumps(d, indent=2, sort_keys=True, default=lambda o: sorted(o) if isinstance(o, frozenset) else str(o)))


def _cmd_price(ns) -> int:
    params, q = _model(ns)
    tenor = ForwardTenor(ns.t, ns.tau, ns.k)
    c, p = forward_call(tenor, params, q), forward_put(tenor, params, q)
    _emit({"call": c.price, "put": p.price, "call_error": c.est_error, "put_error": p.est_error,
           "call_damping": c.damping, "put_damping": p.damping,
           "flags": sorted(c.flags | p.flags)})
    return EXIT_OK


def _cmd_smile(ns) -> int:
    params, q = _model(ns)
    res = forward_smile(ForwardTenor(ns.t, ns.tau, ns.k), params, q)
    coeffs = smile_coefficients(ns.k, ns.t, params)
    if ns.order > coeffs.max_valid_order:
        raise GateError(f"order {ns.order} needs 4*kappa*theta == xi^2; "
                        f"highest available order is {coeffs.max_valid_order}")
    asym = {o: math.sqrt(smile_expansion(ns.k, ns.t, ns.tau, params, o, coeffs))
            for o in range(ns.order + 1)}
    _emit({"exact_vol": res.vol, "asymptotic_vol": {str(o): v for o, v in asym.items()},
           "flags": sorted(res.flags)})
    return EXIT_OK


def _cmd_atm(ns) -> int:
    params, q = _model(ns)
    a = atm_expansion(ns.t, params)
    res = forward_smile(ForwardTenor(ns.t, ns.tau, 0.0), params, q)
    _emit({"sigma0": a.sigma0, "sigma1": a.sigma1, "regime": a.regime.value,
           "asymptotic_vol": a.vol(ns.tau), "exact_vol": res.vol, "flags": sorted(res.flags)})
    return EXIT_OK


def _cmd_figure(ns) -> int:
    files = run_figure(ns.name, ns.override, ns.out)
    for f in files:
        print(f)
    return EXIT_OK


def _cmd_diag(ns) -> int:
    cfg = RunConfig.load(ns.config) if ns.config else diagnostic_config()
    path = run_diagnostics(cfg, out=ns.out)
    report = json.loads(path.read_text())
    for c in report["checks"]:
        print(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}")
    print(path)
    return EXIT_OK if report["passed"] else EXIT_DIAGNOSTIC


def main(argv=None) -> int:
    commands = {"price": _cmd_price, "smile": _cmd_smile, "atm": _cmd_atm,
                "figure": _cmd_figure, "diag": _cmd_diag}
    try:
        ns = _build_parser().parse_args(argv)
        return commands[ns.command](ns)
    except (ConfigError, DomainError) as exc:
        print(f"fwdsmile: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FwdSmileError, ArithmeticError) as exc:
        print(f"fwdsmile: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
