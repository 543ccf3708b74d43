"""Scenario files: INI sections of flat key/value pairs.

Powers are given in dBm and converted once on load. Unknown sections or
keys are rejected so that a typo in a physical constant cannot pass
silently.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .channel import PathLossParams, dbm_to_watts, path_loss
from .outage import FadingParams, QuadratureSpec
from .power_model import ScenarioParams, SensingVariant
from .scheduler import GridSpec
from .sensing import ChannelBank, detect, load_bank


class ScenarioError(ValueError):
    """The scenario file is malformed or refers to missing data."""


SCHEMA = {
    "node": {"T": 10.0, "eta": 1.0, "beta": 1.0, "P_C_dbm": -40.0, "P_D_dbm": -30.0,
             "e_s_dbm": -33.0, "f_s": 1000.0, "N_s": 1,
             "baseline_eta": 0.5, "baseline_beta": 0.5},
    "channel": {"B_pl": 1.0, "varsigma": 2.0, "d_up": 1.0, "d_down": 1.0,
                "noise_dbm": -40.0, "B_w": 1.0},
    "sources": {"power_dbm": 0.0, "tower_power_dbm": None, "wide_power_dbm": None,
                "bank": None, "M_w": None, "sparsity": 0.75, "lambda_h_dbm": None},
    "fading": {"m": "0.5, 1, 2, 4", "mu_db": -0.115, "sigma_db": 0.161,
               "alpha_fade": 0.7, "units": "db", "target_pout": 0.1},
    "solver": {"resolution": 0.01, "refine_levels": 0, "constraint_variant": "double",
               "min_sense_fraction": 0.0, "mc_samples": 100000},
}

DEFAULT_M_W = 40
DEFAULT_WIDE_POWER_DBM = 10.0


@dataclass(frozen=True)
class Scenario:
    params: ScenarioParams
    grid: GridSpec = GridSpec()
    variant: SensingVariant = SensingVariant.DOUBLE
    fading: FadingParams = FadingParams(1.0)
    m_values: tuple = (0.5, 1.0, 2.0, 4.0)
    baseline_eta: float = 0.5
    baseline_beta: float = 0.5
    bank: Optional[ChannelBank] = None
    lambda_h: float = 0.0
    target_pout: float = 0.1
    mc_samples: int = 100000
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)

    def fadings(self):
        return [self.fading.with_m(m) for m in self.m_values]


def _coerce(default, raw: str, where: str):
    try:
        if isinstance(default, bool):
            return raw.strip().lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float) or default is None:
            try:
                return float(raw)
            except ValueError:
                if default is None:
                    return raw.strip()
                raise
        return raw.strip()
    except ValueError:
        raise ScenarioError(f"{where}: cannot parse {raw!r}") from None


def read_raw(path) -> dict:
    """Parse a scenario file into ``{section: {key: value}}`` with defaults."""
    path = Path(path)
    if not path.is_file():
        raise ScenarioError(f"scenario file not found: {path}")
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ScenarioError(f"{path}: {exc}") from None
    out = {sec: dict(keys) for sec, keys in SCHEMA.items()}
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise ScenarioError(f"{path}: unknown section [{sec}]")
        for key, raw in cp.items(sec):
            if key not in SCHEMA[sec]:
                raise ScenarioError(f"{path}: unknown key '{key}' in [{sec}]")
            out[sec][key] = _coerce(SCHEMA[sec][key], raw, f"{path} [{sec}] {key}")
    return out


def build(raw: dict, base_dir: Path = Path(".")) -> Scenario:
    node, ch, src, fad, sol = (raw[k] for k in ("node", "channel", "sources", "fading", "solver"))
    try:
        up = PathLossParams(ch["d_up"], ch["varsigma"], ch["B_pl"])
        down = PathLossParams(ch["d_down"], ch["varsigma"], ch["B_pl"])

        if src["tower_power_dbm"] is not None:
            P_R = dbm_to_watts(src["tower_power_dbm"]) * path_loss(down)
        else:
            P_R = dbm_to_watts(src["power_dbm"])

        lambda_h = 0.0 if src["lambda_h_dbm"] is None else dbm_to_watts(src["lambda_h_dbm"])
        bank = None
        if src["bank"] is not None:
            bank_path = Path(src["bank"])
            if not bank_path.is_absolute():
                bank_path = base_dir / bank_path
            if not bank_path.is_file():
                raise ScenarioError(f"channel bank file not found: {bank_path}")
            bank = load_bank(bank_path, src["sparsity"])

        if src["wide_power_dbm"] is not None:
            P_R_w = dbm_to_watts(src["wide_power_dbm"])
        elif bank is not None:
            P_R_w = detect(bank, lambda_h, lambda_h).aggregate_power
        else:
            P_R_w = dbm_to_watts(DEFAULT_WIDE_POWER_DBM)

        if src["M_w"] is not None:
            M_w = int(src["M_w"])
        else:
            M_w = len(bank) if bank is not None else DEFAULT_M_W

        params = ScenarioParams(
            T=node["T"], eta=node["eta"], beta=node["beta"],
            P_C=dbm_to_watts(node["P_C_dbm"]), P_D=dbm_to_watts(node["P_D_dbm"]),
            e_s=dbm_to_watts(node["e_s_dbm"]), f_s=node["f_s"], N_s=node["N_s"], M_w=M_w,
            B_w=ch["B_w"], noise_rx=dbm_to_watts(ch["noise_dbm"]), P_R=P_R, P_R_w=P_R_w,
            pathloss_up=up, pathloss_down=down, min_sense_fraction=sol["min_sense_fraction"],
        )
        m_values = tuple(float(x) for x in str(fad["m"]).replace(",", " ").split())
        if not m_values:
            raise ScenarioError("[fading] m: at least one value required")
        fading = FadingParams(m_values[0], fad["mu_db"], fad["sigma_db"], fad["alpha_fade"],
                              str(fad["units"]).lower())
        for m in m_values:
            fading.with_m(m)
        return Scenario(
            params=params,
            grid=GridSpec(sol["resolution"], sol["refine_levels"]),
            variant=SensingVariant.parse(sol["constraint_variant"]),
            fading=fading,
            m_values=m_values,
            baseline_eta=node["baseline_eta"],
            baseline_beta=node["baseline_beta"],
            bank=bank,
            lambda_h=lambda_h,
            target_pout=fad["target_pout"],
            mc_samples=sol["mc_samples"],
        )
    except ScenarioError:
        raise
    except (ValueError, TypeError) as exc:
        raise ScenarioError(str(exc)) from None


def load_scenario(path) -> Scenario:
    path = Path(path)
    return build(read_raw(path), path.parent)


def default_scenario() -> Scenario:
    return build({sec: dict(keys) for sec, keys in SCHEMA.items()})


def format_float(x: float) -> str:
    """Shortest round-tripping representation; used for scenario and CSV output."""
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return repr(float(x))
