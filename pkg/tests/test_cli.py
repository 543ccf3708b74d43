import csv
import io
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from backscatter_sched.cli import main
from backscatter_sched.scenario import load_scenario
from backscatter_sched.scheduler import narrow_surface

SCENARIOS = Path(__file__).parents[1] / "scenarios"
NARROW = str(SCENARIOS / "narrowband.ini")
OUTAGE = str(SCENARIOS / "outage.ini")


def run(tmp_path, *argv, name="out.csv"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    rows = list(csv.reader(io.StringIO(out.read_text()))) if out.exists() else []
    return code, rows


def test_optimize_narrow_rows_and_optimum(tmp_path):
    code, rows = run(tmp_path, "optimize-narrow", "--scenario", NARROW)
    assert code == 0
    header, body = rows[0], rows[1:]
    assert header[:4] == ["is_optimum", "kappa", "mu", "tau"]
    sc = load_scenario(NARROW)
    feasible = int(narrow_surface(sc.params, sc.grid, sc.variant).feasible.sum())
    assert len(body) == feasible + 1
    assert [r[0] for r in body].count("1") == 1
    opt = dict(zip(header, body[-1]))
    assert (float(opt["kappa"]), float(opt["mu"]), float(opt["tau"])) == (0.11, 0.11, 0.78)
    assert float(opt["rate_bps"]) == pytest.approx(395.0, rel=1e-9)
    assert all(len(r) == len(header) for r in rows)


def test_optimize_narrow_baseline(tmp_path):
    code, rows = run(tmp_path, "optimize-narrow", "--no-sensing", "--scenario", NARROW)
    opt = dict(zip(rows[0], rows[-1]))
    assert code == 0
    assert float(opt["rate_bps"]) == pytest.approx(224.0, rel=1e-9)


def test_modes_coincide_when_efficiencies_match(tmp_path):
    ini = tmp_path / "s.ini"
    ini.write_text("[node]\neta = 0.5\nbeta = 0.5\ne_s_dbm = -300\n[sources]\npower_dbm = -20\n")
    _, a = run(tmp_path, "optimize-narrow", "--scenario", str(ini), name="a.csv")
    _, b = run(tmp_path, "optimize-narrow", "--no-sensing", "--scenario", str(ini), name="b.csv")
    assert a == b


def test_optimize_wide_with_and_without_cs(tmp_path):
    wide = str(SCENARIOS / "wideband.ini")
    _, cs = run(tmp_path, "optimize-wide", "--scenario", wide, name="cs.csv")
    _, base = run(tmp_path, "optimize-wide", "--no-cs", "--scenario", wide, name="base.csv")
    r_cs = float(dict(zip(cs[0], cs[-1]))["rate_bps"])
    r_base = float(dict(zip(base[0], base[-1]))["rate_bps"])
    assert r_cs / r_base == pytest.approx(3864 / 2694, rel=1e-6)


def test_single_channel_wideband_cost(tmp_path):
    ini = tmp_path / "s.ini"
    ini.write_text("[sources]\nM_w = 1\nwide_power_dbm = -20\n")
    code, rows = run(tmp_path, "optimize-wide", "--scenario", str(ini))
    assert code == 0
    margin = float(dict(zip(rows[0], rows[-1]))["margin_j"])
    assert margin >= 0


def test_infeasible_exit_status(tmp_path):
    ini = tmp_path / "s.ini"
    ini.write_text("[sources]\npower_dbm = -60\nwide_power_dbm = -60\n")
    assert main(["optimize-narrow", "--scenario", str(ini), "--out", str(tmp_path / "a.csv")]) == 2
    assert main(["optimize-wide", "--scenario", str(ini), "--out", str(tmp_path / "b.csv")]) == 2


def test_usage_errors(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["optimize-narrow", "--grid", "abc"])
    assert exc.value.code == 64
    ini = tmp_path / "s.ini"
    ini.write_text("[node]\nbogus = 1\n")
    assert main(["optimize-narrow", "--scenario", str(ini)]) == 64
    assert main(["threshold", "--target", "1.5"]) == 64
    assert main(["optimize-narrow", "--plot"]) == 64


def test_sweep_time_linear(tmp_path):
    code, rows = run(tmp_path, "sweep-time", "--scenario", NARROW, "--T", "5", "10", "20")
    assert code == 0
    vals = np.array([[float(x) for x in r] for r in rows[1:]])
    assert np.allclose(vals[1, 1:], 2 * vals[0, 1:], rtol=1e-11)
    assert np.allclose(vals[2, 1:], 2 * vals[1, 1:], rtol=1e-11)
    ns, nb, wc, wb = vals[0, 1:5]
    assert wc > wb > ns > nb


def test_outage_curve_gamma_axis(tmp_path):
    code, rows = run(tmp_path, "outage-curve", "--scenario", OUTAGE, "--start", "0", "--stop", "1",
                     "--num", "11", "--samples", "200000", "--seed", "3")
    assert code == 0
    header = rows[0]
    assert header == ["gamma_th", "m", "pout_quad", "pout_mc", "abs_diff"]
    body = [dict(zip(header, r)) for r in rows[1:]]
    assert len(body) == 11 * 4
    assert all(float(r["pout_quad"]) == 0.0 for r in body if float(r["gamma_th"]) == 0.0)
    assert max(float(r["abs_diff"]) for r in body) <= 5e-3
    for i in range(11):
        block = [float(r["pout_quad"]) for r in body[4 * i: 4 * i + 4]]
        if block[0] > 0:
            assert all(a > b for a, b in zip(block, block[1:]))


@pytest.mark.parametrize("axis, start, stop", [("pth", "-60", "-37"), ("pt", "-40", "-17"), ("d", "1", "100")])
def test_outage_curve_other_axes(tmp_path, axis, start, stop):
    code, rows = run(tmp_path, "outage-curve", "--scenario", OUTAGE, "--axis", axis, "--start", start,
                     "--stop", stop, "--num", "5", "--samples", "1000")
    assert code == 0
    assert len(rows) == 1 + 5 * 4
    if axis == "d":
        pt = {}
        for r in rows[1:]:
            pt.setdefault(r[1], []).append(float(r[4]))
        assert all(np.all(np.diff(v) > 0) for v in pt.values())


def test_threshold_report(tmp_path):
    code, rows = run(tmp_path, "threshold", "--scenario", OUTAGE, "--target", "0.1")
    assert code == 0
    body = [dict(zip(rows[0], r)) for r in rows[1:]]
    assert [float(r["m"]) for r in body] == [0.5, 1, 2, 4]
    assert all(r["admissible"] == "1" for r in body)
    _, rows5 = run(tmp_path, "threshold", "--scenario", OUTAGE, "--target", "0.01", name="b.csv")
    lower1 = [float(dict(zip(rows[0], r))["lambda_b_lower_w"]) for r in rows[1:]]
    lower2 = [float(dict(zip(rows5[0], r))["lambda_b_lower_w"]) for r in rows5[1:]]
    assert all(b < a for a, b in zip(lower1, lower2))


def test_threshold_degenerate_channel(tmp_path, caplog):
    ini = tmp_path / "s.ini"
    ini.write_text("[channel]\nnoise_dbm = 30\n[fading]\nm = 1\nmu_db = 0\nsigma_db = 1e-6\nalpha_fade = 1\n")
    code, rows = run(tmp_path, "threshold", "--scenario", str(ini), "--target", "0.5")
    assert code == 0
    row = dict(zip(rows[0], rows[1]))
    assert float(row["lambda_b_lower_w"]) == pytest.approx(np.log(2), rel=1e-6)
    assert row["lambda_b_upper_w"] == "nan"
    assert "upper bound" in caplog.text


def test_detect_command(tmp_path):
    code, rows = run(tmp_path, "detect", "--scenario", OUTAGE, "--lambda-h-dbm", "-40",
                     "--lambda-b-dbm", "-25")
    assert code == 0
    body = [dict(zip(rows[0], r)) for r in rows[1:]]
    assert len(body) == 40
    for r in body:
        if r["backscatter"] == "1":
            assert r["harvest"] == "1"


def test_plots_written(tmp_path):
    for argv in (["optimize-narrow", "--scenario", NARROW],
                 ["sweep-time", "--T", "10", "20", "--scenario", NARROW],
                 ["outage-curve", "--scenario", OUTAGE, "--num", "5", "--samples", "1000"],
                 ["outage-curve", "--scenario", OUTAGE, "--axis", "d", "--start", "1", "--stop", "50",
                  "--num", "4"],
                 ["detect", "--scenario", OUTAGE]):
        out = tmp_path / f"{argv[0]}.csv"
        assert main([*argv, "--out", str(out), "--plot"]) == 0
        png = out.with_suffix(".png")
        assert png.exists() and png.stat().st_size > 1000


def test_module_entry_point(tmp_path):
    out = tmp_path / "x.csv"
    res = subprocess.run([sys.executable, "-m", "backscatter_sched", "optimize-wide", "--grid", "0.05",
                          "--out", str(out)], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert out.read_text().startswith("is_optimum,alpha,gamma")
