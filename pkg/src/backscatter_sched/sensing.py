"""Energy-detection front end.

Compressive sensing is represented by its outcome only: every channel of
the bank is assumed to be recovered perfectly, and the sensing energy is
charged by the wideband budget.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .channel import dbm_to_watts
from .errors import ContractError, DomainError

TV_BAND_HZ = (470e6, 790e6)


@dataclass(frozen=True)
class SampleStream:
    samples: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise ContractError("a sample stream needs at least one sample")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def N_s(self) -> int:
        return self.samples.size


def received_power(s) -> float:
    """Sample-average power ``mean(|y[n]|**2)``."""
    y = s.samples if isinstance(s, SampleStream) else np.asarray(s, dtype=float)
    if y.size == 0:
        raise ContractError("empty sample stream")
    return float(np.mean(np.abs(y) ** 2))


def generate_stream(signal_power: float, noise_power: float, N_s: int, seed: int) -> SampleStream:
    """Synthetic ``y = x + n``: a unit-power +/-1 symbol carrier scaled to
    ``signal_power`` plus white Gaussian noise of variance ``noise_power``."""
    if N_s < 1:
        raise ContractError("N_s must be >= 1")
    if signal_power < 0 or noise_power < 0:
        raise DomainError("powers must be >= 0")
    rng = np.random.default_rng(seed)
    carrier = rng.choice((-1.0, 1.0), size=N_s)
    noise = rng.normal(0.0, np.sqrt(noise_power), size=N_s)
    return SampleStream(np.sqrt(signal_power) * carrier + noise)


@dataclass(frozen=True)
class ChannelBank:
    per_channel_power: Sequence[float]
    frequencies: Sequence[float]
    sparsity: float = 0.75

    def __post_init__(self):
        powers = tuple(float(x) for x in self.per_channel_power)
        freqs = tuple(float(x) for x in self.frequencies)
        if len(powers) != len(freqs):
            raise ContractError("powers and frequencies differ in length")
        if not 0 <= self.sparsity <= 1:
            raise ContractError("sparsity must lie in [0, 1]")
        if any(p < 0 for p in powers):
            raise ContractError("channel powers must be >= 0")
        object.__setattr__(self, "per_channel_power", powers)
        object.__setattr__(self, "frequencies", freqs)

    def __len__(self):
        return len(self.per_channel_power)

    @property
    def max_power(self) -> float | None:
        return max(self.per_channel_power) if self.per_channel_power else None


@dataclass(frozen=True)
class DetectionOutcome:
    harvest_set: frozenset = field(default_factory=frozenset)
    backscatter_set: frozenset = field(default_factory=frozenset)
    aggregate_power: float = 0.0


def detect(bank: ChannelBank, lambda_h: float, lambda_b: float) -> DetectionOutcome:
    """Inclusive threshold tests; the aggregate sums the harvestable channels."""
    if lambda_h < 0 or lambda_b < 0:
        raise DomainError("thresholds must be >= 0")
    powers = bank.per_channel_power
    harvest = frozenset(i for i, p in enumerate(powers) if p >= lambda_h)
    backscatter = frozenset(i for i, p in enumerate(powers) if p >= lambda_b)
    aggregate = float(sum(powers[i] for i in sorted(harvest)))
    return DetectionOutcome(harvest, backscatter, aggregate)


def measure_bank(bank: ChannelBank, noise_power: float, N_s: int, seed: int) -> ChannelBank:
    """Replace each channel's power by its energy-detector estimate."""
    est = [received_power(generate_stream(p, noise_power, N_s, seed + i))
           for i, p in enumerate(bank.per_channel_power)]
    return ChannelBank(est, bank.frequencies, bank.sparsity)


def synthetic_bank(M_w: int, sparsity: float, mean_power_dbm: float, seed: int,
                   spread_db: float = 6.0) -> ChannelBank:
    """Evenly spaced TV channels; a ``sparsity`` share of them carry a
    log-normally spread signal, the rest are empty."""
    rng = np.random.default_rng(seed)
    freqs = np.linspace(*TV_BAND_HZ, M_w)
    occupied = np.zeros(M_w, dtype=bool)
    occupied[rng.permutation(M_w)[: int(round(sparsity * M_w))]] = True
    powers_dbm = mean_power_dbm + spread_db * rng.standard_normal(M_w)
    powers = np.where(occupied, dbm_to_watts(powers_dbm), 0.0)
    return ChannelBank(powers.tolist(), freqs.tolist(), sparsity)


def load_bank(path, sparsity: float = 0.75) -> ChannelBank:
    """Read a CSV bank with ``frequency_hz`` and ``power_dbm`` columns."""
    freqs, powers = [], []
    with open(Path(path), newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"frequency_hz", "power_dbm"} - set(reader.fieldnames or ())
        if missing:
            raise ContractError(f"{path}: missing columns {sorted(missing)}")
        for row in reader:
            freqs.append(float(row["frequency_hz"]))
            dbm = float(row["power_dbm"])
            # an empty channel is written as -inf dBm
            powers.append(0.0 if dbm == float("-inf") else dbm_to_watts(dbm))
    return ChannelBank(powers, freqs, sparsity)


def write_bank(bank: ChannelBank, path) -> None:
    from .channel import watts_to_dbm

    with open(Path(path), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["frequency_hz", "power_dbm"])
        for f, p in zip(bank.frequencies, bank.per_channel_power):
            w.writerow([repr(f), repr(float(watts_to_dbm(p)))])
