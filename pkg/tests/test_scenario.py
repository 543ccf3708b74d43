from pathlib import Path

import pytest

from backscatter_sched.channel import dbm_to_watts, path_loss
from backscatter_sched.power_model import SensingVariant
from backscatter_sched.scenario import ScenarioError, default_scenario, load_scenario

SCENARIOS = Path(__file__).parents[1] / "scenarios"


def write(tmp_path, text, name="s.ini"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_defaults_follow_simulation_section():
    sc = default_scenario()
    p = sc.params
    assert p.T == 10
    assert p.P_D == pytest.approx(1e-6)
    assert p.P_C == pytest.approx(1e-7)
    assert p.e_s == pytest.approx(dbm_to_watts(-33))
    assert p.f_s == 1000
    assert p.noise_rx == pytest.approx(1e-7)
    assert p.pathloss_up.exponent == 2
    assert p.pathloss_up.constant == 1
    assert sc.m_values == (0.5, 1.0, 2.0, 4.0)
    assert sc.fading.alpha_fade == 0.7


def test_unknown_key_and_section_rejected(tmp_path):
    with pytest.raises(ScenarioError, match="unknown key"):
        load_scenario(write(tmp_path, "[node]\nTT = 3\n"))
    with pytest.raises(ScenarioError, match="unknown section"):
        load_scenario(write(tmp_path, "[nodes]\nT = 3\n"))


def test_unparsable_and_missing(tmp_path):
    with pytest.raises(ScenarioError):
        load_scenario(write(tmp_path, "[node]\nT = ten\n"))
    with pytest.raises(ScenarioError, match="not found"):
        load_scenario(tmp_path / "nope.ini")
    with pytest.raises(ScenarioError, match="bank file"):
        load_scenario(write(tmp_path, "[sources]\nbank = missing.csv\n"))
    with pytest.raises(ScenarioError):
        load_scenario(write(tmp_path, "[node]\neta = 1.5\n"))


def test_tower_power_uses_downlink(tmp_path):
    sc = load_scenario(write(tmp_path, "[channel]\nd_down = 100\n[sources]\ntower_power_dbm = 60\n"))
    assert sc.params.P_R == pytest.approx(1e3 * path_loss(sc.params.pathloss_down))


def test_bank_drives_wideband_power(tmp_path):
    (tmp_path / "b.csv").write_text("frequency_hz,power_dbm\n5e8,-20\n6e8,-30\n7e8,-inf\n")
    sc = load_scenario(write(tmp_path, "[sources]\nbank = b.csv\nlambda_h_dbm = -25\n"))
    assert sc.params.M_w == 3
    assert sc.params.P_R_w == pytest.approx(1e-5)
    assert sc.lambda_h == pytest.approx(dbm_to_watts(-25))


def test_shipped_scenarios_load():
    n = load_scenario(SCENARIOS / "narrowband.ini")
    assert n.variant is SensingVariant.SINGLE
    assert n.params.min_sense_fraction == 0.11
    o = load_scenario(SCENARIOS / "outage.ini")
    assert o.bank is not None and len(o.bank) == 40
