"""Unit conversions, power-law path loss and SNR mapping.

Everything downstream works in linear SI units; dBm only appears at the
configuration and CLI boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


def dbm_to_watts(dbm):
    """Convert dBm to watts. Accepts scalars or arrays."""
    arr = np.asarray(dbm, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"non-finite power in dBm: {dbm!r}")
    watts = 1e-3 * np.power(10.0, arr / 10.0)
    return float(watts) if watts.ndim == 0 else watts


def watts_to_dbm(watts):
    """Convert watts to dBm. Zero maps to -inf."""
    arr = np.asarray(watts, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError(f"power in watts must be finite and >= 0: {watts!r}")
    with np.errstate(divide="ignore"):
        dbm = 10.0 * np.log10(arr / 1e-3)
    return float(dbm) if dbm.ndim == 0 else dbm


@dataclass(frozen=True)
class PathLossParams:
    """Power-law path loss ``B * d**-exponent``.

    Attributes:
        distance: link length in meters.
        exponent: path-loss exponent, at least 2.
        constant: frequency-dependent constant B (defaults to 1).
    """

    distance: float
    exponent: float = 2.0
    constant: float = 1.0

    def __post_init__(self):
        if not self.distance > 0:
            raise DomainError(f"distance must be > 0, got {self.distance}")
        if not self.exponent >= 2:
            raise DomainError(f"path-loss exponent must be >= 2, got {self.exponent}")
        if not self.constant > 0:
            raise DomainError(f"path-loss constant must be > 0, got {self.constant}")

    def with_distance(self, distance: float) -> "PathLossParams":
        return PathLossParams(distance, self.exponent, self.constant)


def path_loss(p: PathLossParams) -> float:
    """Linear channel gain; multiply a transmit power by it to get received power."""
    return p.constant * p.distance ** (-p.exponent)


def distance_for_gain(gain: float, exponent: float = 2.0, constant: float = 1.0) -> float:
    """Inverse of :func:`path_loss` in the distance argument."""
    if not 0 < gain:
        raise DomainError(f"gain must be > 0, got {gain}")
    return (constant / gain) ** (1.0 / exponent)


@dataclass(frozen=True)
class SnrMapping:
    alpha_fade: float
    noise: float

    def __post_init__(self):
        if not self.alpha_fade > 0:
            raise DomainError(f"fading amplitude must be > 0, got {self.alpha_fade}")
        if not self.noise > 0:
            raise DomainError(f"noise power must be > 0, got {self.noise}")


def snr_of_power(p, m: SnrMapping):
    """Map a received power (W) to SNR as ``alpha**2 * p / N``.

    The same mapping turns a power threshold into an SNR threshold.
    """
    if m.noise == 0:
        raise DomainError("noise power is zero")
    if np.any(np.asarray(p) < 0):
        raise DomainError(f"power must be >= 0, got {p!r}")
    return m.alpha_fade**2 * p / m.noise


def power_of_snr(snr, m: SnrMapping):
    return snr * m.noise / m.alpha_fade**2


def shannon_log2(snr):
    """``log2(1 + snr)`` evaluated accurately for small snr."""
    return np.log1p(snr) / math.log(2.0)
