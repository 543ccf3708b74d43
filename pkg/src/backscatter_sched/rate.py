"""Backscatter transmission-rate objectives.

Narrow and wide rates are bits per block (they carry the ``T`` factor);
divide by ``T`` for bits per second. The interference rate is bits/s.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channel import path_loss, shannon_log2
from .errors import DomainError
from .power_model import NarrowSchedule, ScenarioParams, WideSchedule


def narrow_snr(p: ScenarioParams, beta: float | None = None) -> float:
    beta = p.beta if beta is None else beta
    return beta * p.P_R * path_loss(p.pathloss_up) / p.noise_rx


def wide_snr(gamma, p: ScenarioParams):
    return p.beta * (1 - gamma) * p.P_R_w * path_loss(p.pathloss_up) / p.noise_rx


def narrow_rate_of(tau, p: ScenarioParams):
    """Vectorised narrowband rate as a function of the backscatter fraction."""
    if p.noise_rx == 0:
        raise DomainError("receiver noise is zero")
    return tau * p.T * p.B_w * shannon_log2(narrow_snr(p))


def wide_rate_of(alpha, gamma, p: ScenarioParams):
    if p.noise_rx == 0:
        raise DomainError("receiver noise is zero")
    return (1 - alpha) * p.T * p.B_w * shannon_log2(wide_snr(gamma, p))


def rate_narrow(s: NarrowSchedule, p: ScenarioParams) -> float:
    return float(narrow_rate_of(s.tau, p))


def rate_wide(s: WideSchedule, p: ScenarioParams) -> float:
    return float(wide_rate_of(s.alpha, s.gamma, p))


@dataclass(frozen=True)
class InterferenceScene:
    """``K`` nodes sharing a common transmit power.

    ``g`` holds the ``K - 1`` interferer gains seen by the node of interest.
    """

    P_l: float
    h: float
    N: float
    B_w: float = 1.0
    g: Sequence[float] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "g", tuple(float(x) for x in self.g))
        if self.h < 0 or any(x < 0 for x in self.g):
            raise DomainError("channel gains must be >= 0")
        if self.P_l < 0 or self.N < 0:
            raise DomainError("powers must be >= 0")

    @property
    def K(self) -> int:
        return len(self.g) + 1


def rate_interference(sc: InterferenceScene) -> float:
    """Shannon rate with interferers summed term by term."""
    interference = sc.P_l * float(np.sum(sc.g)) if sc.g else 0.0
    sinr = sc.P_l * sc.h / (sc.N + interference)
    return float(sc.B_w * shannon_log2(sinr))
