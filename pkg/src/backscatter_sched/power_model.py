"""Energy terms of the per-block causality constraint.

Harvested energy must cover sensing, backscatter circuit and data-sensing
consumption within one block of length ``T``. Two schedule families exist:
the narrowband one (backscatter ``tau``, per-sensing ``kappa``, harvest
``mu``) and the wideband/compressive-sensing one (sensing ``alpha`` and
power split ``gamma``).

The ``*_terms`` helpers broadcast over numpy arrays and are what the grid
search uses; the schedule-typed wrappers validate their inputs first.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import PathLossParams
from .errors import ContractError, DomainError

SIMPLEX_TOL = 1e-9


class SensingVariant(enum.Enum):
    """How many sensing slots of length ``kappa`` the narrowband block holds."""

    DOUBLE = "double"
    SINGLE = "single"

    @property
    def slots(self) -> int:
        return 2 if self is SensingVariant.DOUBLE else 1

    @classmethod
    def parse(cls, value) -> "SensingVariant":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "").replace("-", "")
        aliases = {"double": cls.DOUBLE, "doublesensing": cls.DOUBLE,
                   "single": cls.SINGLE, "singlesensing": cls.SINGLE}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown constraint variant {value!r}") from None


@dataclass(frozen=True)
class ScenarioParams:
    """Physical constants of one deployment, all in linear SI units.

    ``P_R`` is the post-detection narrowband power at the node and ``P_R_w``
    the aggregate wideband power. ``min_sense_fraction`` is a lower bound on
    the sensing share of the block (``kappa`` or ``alpha``); zero disables it.
    """

    T: float = 10.0
    eta: float = 1.0
    beta: float = 1.0
    P_C: float = 1e-7
    P_D: float = 1e-6
    e_s: float = 10 ** -6.3
    f_s: float = 1000.0
    N_s: int = 1
    M_w: int = 40
    B_w: float = 1.0
    noise_rx: float = 1e-7
    P_R: float = 1e-3
    P_R_w: float = 1e-2
    pathloss_up: PathLossParams = field(default_factory=lambda: PathLossParams(1.0))
    pathloss_down: PathLossParams = field(default_factory=lambda: PathLossParams(1.0))
    min_sense_fraction: float = 0.0

    def __post_init__(self):
        if not self.T > 0:
            raise DomainError(f"T must be > 0, got {self.T}")
        for name in ("eta", "beta"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise DomainError(f"{name} must lie in (0, 1], got {v}")
        for name in ("P_C", "P_D", "e_s", "P_R", "P_R_w", "f_s", "B_w"):
            v = getattr(self, name)
            if not (v >= 0 and np.isfinite(v)):
                raise DomainError(f"{name} must be finite and >= 0, got {v}")
        if not self.noise_rx > 0:
            raise DomainError(f"noise_rx must be > 0, got {self.noise_rx}")
        if self.N_s < 1 or self.M_w < 1:
            raise DomainError("N_s and M_w must be >= 1")
        if not 0 <= self.min_sense_fraction < 1:
            raise DomainError("min_sense_fraction must lie in [0, 1)")

    def replace(self, **changes) -> "ScenarioParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class NarrowSchedule:
    tau: float
    kappa: float
    mu: float
    variant: SensingVariant = SensingVariant.DOUBLE

    def __post_init__(self):
        for name in ("tau", "kappa", "mu"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ContractError(f"{name}={v} outside [0, 1]")
        total = self.tau + self.variant.slots * self.kappa + self.mu
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise ContractError(
                f"schedule does not fill the block: tau + {self.variant.slots}*kappa + mu = {total}")


@dataclass(frozen=True)
class WideSchedule:
    alpha: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "gamma"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ContractError(f"{name}={v} outside [0, 1]")


@dataclass(frozen=True)
class EnergyBudget:
    """Joules per block. ``margin`` is harvested minus consumed."""

    E_H: float
    E_S: float
    E_B: float
    E_D: float

    @property
    def margin(self) -> float:
        return self.E_H - self.E_S - self.E_B - self.E_D

    @property
    def consumed(self) -> float:
        return self.E_S + self.E_B + self.E_D


def narrow_terms(tau, kappa, mu, p: ScenarioParams, slots: int = 2):
    """Return ``(E_H, E_S, E_B, E_D)``; broadcasts over array inputs."""
    T = p.T
    E_H = mu * T * p.eta * p.P_R
    E_S = slots * kappa * T * p.e_s * p.f_s
    E_B = tau * T * p.P_C
    E_D = p.P_D * T
    return E_H, E_S, E_B, E_D


def wide_terms(alpha, gamma, p: ScenarioParams):
    T = p.T
    E_H = (1 - alpha) * T * p.eta * gamma * p.P_R_w
    E_S = p.e_s * p.f_s * p.M_w * alpha * T
    E_B = (1 - alpha) * T * p.P_C
    E_D = p.P_D * T
    return E_H, E_S, E_B, E_D


def margin_of(terms):
    E_H, E_S, E_B, E_D = terms
    return E_H - E_S - E_B - E_D


def energy_budget_narrow(s: NarrowSchedule, p: ScenarioParams) -> EnergyBudget:
    terms = narrow_terms(s.tau, s.kappa, s.mu, p, s.variant.slots)
    return EnergyBudget(*(float(t) for t in terms))


def energy_budget_wide(s: WideSchedule, p: ScenarioParams) -> EnergyBudget:
    return EnergyBudget(*(float(t) for t in wide_terms(s.alpha, s.gamma, p)))


def causality_satisfied(b: EnergyBudget) -> bool:
    """Harvested energy covers all consumption (equality admissible)."""
    return b.margin >= 0
