import csv
import json
import math

import pytest

from fwdsmile import harness
from fwdsmile.exceptions import ConfigError
from fwdsmile.fourier_pricer import QuadratureSettings
from fwdsmile.harness import (
    CSV_HEADER,
    RunConfig,
    apply_overrides,
    default_k_grid,
    diagnostic_config,
    diagnostics_report,
    figure_config,
    main,
    run_diagnostics,
    run_figure,
)
from fwdsmile.heston_core import HestonParams

SMALL_GRID = ["k_grid=-0.3,-0.15,0.15,0.3"]
EQUALITY = ["xi=0.52915026221291817"]


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_default_grid():
    ks = default_k_grid()
    assert len(ks) == 40
    assert min(ks) == -0.4 and max(ks) == 0.4
    assert all(abs(k) >= 1e-3 for k in ks)


def test_config_roundtrip(tmp_path):
    cfg = RunConfig(tau_list=[0.1, 0.01], orders=[0, 1], quadrature=QuadratureSettings(abs_tol=1e-9))
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert RunConfig.load(path) == cfg
    assert set(json.loads(path.read_text())) >= {
        "params", "t", "tau_list", "k_grid", "orders", "quadrature", "outputs", "formats"}


@pytest.mark.parametrize("bad", [
    {"tau_list": []}, {"k_grid": []}, {"orders": [4]}, {"formats": ["png"]}, {"t": -1.0},
    {"colour": "red"}, {"params": {"kappa": -1, "theta": 0.07, "xi": 0.5, "rho": 0.0, "v": 0.07}},
])
def test_config_errors(bad):
    with pytest.raises(ConfigError):
        RunConfig.from_dict({**RunConfig().to_dict(), **bad})


def test_config_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.load(tmp_path / "missing.json")
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(ConfigError):
        RunConfig.load(tmp_path / "bad.json")


def test_overrides():
    cfg = apply_overrides(RunConfig(), ["xi=0.5", "params.rho=-0.5", "tau_list=0.01,0.001",
                                        "quadrature.abs_tol=1e-9", "t=2"])
    assert cfg.params == HestonParams(1.0, 0.07, 0.5, -0.5, 0.07)
    assert cfg.tau_list == [0.01, 0.001] and cfg.t == 2
    assert cfg.quadrature.abs_tol == 1e-9
    assert apply_overrides(RunConfig(), {"tau_list": 0.5}).tau_list == [0.5]
    for bad in (["nonsense=1"], ["params.zeta=1"], ["noequals"], ["tau_list="]):
        with pytest.raises(ConfigError):
            apply_overrides(RunConfig(), bad)


def test_figure_presets():
    assert figure_config("fig1").tau_list == [1 / 24]
    assert figure_config("fig2").tau_list == [1 / 12]
    assert figure_config("fig4").tau_list == [1 / 100, 1 / 1000]
    f5 = figure_config("fig5")
    assert f5.t == 1 / 12 and f5.tau_list == [1 / 1000]
    assert figure_config("fig6").tau_list == [1.0, 0.5, 1 / 12, 1 / 50]
    with pytest.raises(ConfigError):
        figure_config("fig7")


def test_fig1_gated_columns(tmp_path):
    files = run_figure("fig1", SMALL_GRID, tmp_path)
    csv_path = tmp_path / "fig1.csv"
    assert csv_path in files
    text = csv_path.read_text()
    assert text.splitlines()[0] == CSV_HEADER
    assert "\r" not in text
    rows = read_csv(csv_path)
    assert len(rows) == 4
    for r in rows:
        assert r["asym_vol_0"] and r["asym_vol_1"]
        assert r["asym_vol_2"] == r["asym_vol_3"] == r["abs_err_2"] == r["abs_err_3"] == ""
        assert "GATED:23" in r["flags"].split(";")
        assert any(f.startswith("engine=") for f in r["flags"].split(";"))
        assert any(f.startswith("quad=") for f in r["flags"].split(";"))
        for o in (0, 1):
            assert float(r[f"abs_err_{o}"]) == abs(float(r[f"asym_vol_{o}"]) - float(r["exact_vol"]))
    assert [float(r["k"]) for r in rows] == sorted(float(r["k"]) for r in rows)


def test_fig1_under_equality_has_all_orders(tmp_path):
    run_figure("fig1", SMALL_GRID + EQUALITY, tmp_path)
    for r in read_csv(tmp_path / "fig1.csv"):
        assert all(r[f"asym_vol_{o}"] for o in range(4))
        assert "GATED" not in r["flags"]


def test_determinism(tmp_path):
    run_figure("fig1", SMALL_GRID, tmp_path / "a")
    run_figure("fig1", SMALL_GRID, tmp_path / "b")
    for name in sorted(p.name for p in (tmp_path / "a").iterdir()):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_plotdata_files(tmp_path):
    files = run_figure("fig4", SMALL_GRID, tmp_path)
    dat = [f for f in files if f.suffix == ".dat"]
    assert {f.name for f in dat} >= {"fig4_tau0_exact.dat", "fig4_tau1_order1.dat", "fig4_tau1_error0.dat"}
    for f in dat:
        for line in f.read_text().splitlines():
            x, y = line.split()
            float(x), float(y)


def test_csv_only(tmp_path):
    files = run_figure("fig2", SMALL_GRID + ["formats=csv"], tmp_path)
    assert [f.name for f in files] == ["fig2.csv"]


def test_row_failures_are_flagged(tmp_path):
    run_figure("fig1", ["k_grid=0.2", "tau_list=0.001", "quadrature.max_subdivisions=1"], tmp_path)
    (row,) = read_csv(tmp_path / "fig1.csv")
    assert row["exact_vol"] == "" and row["asym_vol_0"] != ""
    assert "PRICE_FAILED:QuadratureError" in row["flags"]


def test_fig3(tmp_path):
    run_figure("fig3", ["formats=csv"], tmp_path)
    rows = read_csv(tmp_path / "fig3.csv")
    assert [float(r["t"]) for r in rows] == [0.25 * i for i in range(1, 9)]
    for r in rows:
        assert float(r["tau"]) == 1 / 12
        assert abs(float(r["exact_vol"]) - float(r["sigma0"])) < 0.01


def test_fig6_domain_edges(tmp_path):
    run_figure("fig6", ["formats=csv"], tmp_path)
    rows = read_csv(tmp_path / "fig6.csv")
    last = [r for r in rows if float(r["tau"]) == 1 / 50]
    slopes = [float(r["dlambda_du"]) for r in last]
    # steep at both ends of the domain, which approaches (-6.29, 6.29)
    assert slopes[0] < -10 and slopes[-1] > 10
    assert all(b > a for a, b in zip(slopes, slopes[1:]))
    lo, hi = float(last[0]["domain_lo"]), float(last[0]["domain_hi"])
    assert -6.29 < lo < -5.5 and 6.29 < hi < 7.0


def test_diagnostics_pass_and_fault_injection(tmp_path):
    cfg = diagnostic_config()
    cfg.k_grid = [-0.3, -0.1, 0.1, 0.3]
    path = run_diagnostics(cfg, out=tmp_path)
    report = json.loads(path.read_text())
    names = [c["name"] for c in report["checks"]]
    assert names == ["martingale", "put_call_parity", "saddlepoint_expansion", "e_tau_expansion",
                     "measure_changed_cf", "saddlepoint_prefactor", "ldp_slope_trend", "atm_ratio_halving"]
    assert report["passed"], [c for c in report["checks"] if not c["passed"]]
    for field, target in (("a2", "saddlepoint_expansion"), ("e1", "e_tau_expansion"),
                          ("zeta", "measure_changed_cf"), ("c1", "saddlepoint_prefactor")):
        bad = diagnostics_report(cfg, corrupt={field: 1.5})
        failed = [c["name"] for c in bad["checks"] if not c["passed"]]
        assert failed == [target]
    with pytest.raises(ConfigError):
        diagnostics_report(cfg, corrupt={"nope": 2.0})


def test_diagnostics_empty_tau_grid():
    cfg = diagnostic_config()
    cfg.tau_list = []
    with pytest.raises(ConfigError):
        run_diagnostics(cfg)


# ---------------------------------------------------------------- command line

def test_cli_price(capsys):
    assert main(["price", "--t", "1", "--tau", "0.0833", "--k", "0.1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["call"] - out["put"] == pytest.approx(-math.expm1(0.1), abs=1e-12)


def test_cli_smile_and_atm(capsys):
    assert main(["smile", "--t", "1", "--tau", "0.0833", "--k", "0.1", "--order", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert set(out["asymptotic_vol"]) == {"0", "1"}
    assert main(["atm", "--t", "1", "--tau", "0.0833", "--xi", "0.4", "--rho", "-0.6"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["regime"] == "FELLER_STRICT"
    assert abs(out["exact_vol"] - out["sigma0"]) < 2 * abs(out["sigma1"]) * 0.0833


def test_cli_exit_codes(tmp_path, monkeypatch):
    assert main(["price", "--t", "1", "--tau", "0.1", "--k", "0.1", "--rho", "2"]) == 1
    assert main(["smile", "--t", "1", "--tau", "0.1", "--k", "0.1", "--order", "2"]) == 1
    assert main(["figure", "fig9"]) == 1
    assert main(["bogus"]) == 1
    assert main(["price", "--t", "1", "--tau", "0.1", "--k", "0.1", "--tol", "1e-300"]) == 2
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({**RunConfig().to_dict(), "tau_list": []}))
    assert main(["diag", "--config", str(cfg)]) == 1
    # a corrupted coefficient makes the diagnostic run fail
    real = harness.diagnostics_report
    monkeypatch.setattr(harness, "diagnostics_report", lambda c, corrupt=None: real(c, {"a2": 1.5}))
    good = {**diagnostic_config().to_dict(), "k_grid": [0.2]}
    cfg.write_text(json.dumps(good))
    assert main(["diag", "--config", str(cfg), "--out", str(tmp_path)]) == 3


def test_cli_figure(tmp_path, capsys):
    assert main(["figure", "fig2", "--out", str(tmp_path), "--override", "k_grid=0.2"]) == 0
    assert (tmp_path / "fig2.csv").exists()
    assert str(tmp_path / "fig2.csv") in capsys.readouterr().out
