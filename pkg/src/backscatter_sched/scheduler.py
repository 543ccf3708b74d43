"""Optimal time scheduling and power splitting.

Closed forms cover the ideal case with zero sensing time; the general
problem is solved by exhaustive search over a regular grid of the free
fractions, optionally followed by local refinement around the incumbent.
The reduction to the maximiser is deterministic: near-ties (relative
difference below ``TIE_RTOL``) resolve to the smallest sensing fraction,
then the smallest harvest fraction or power split.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError
from .power_model import (
    EnergyBudget,
    NarrowSchedule,
    ScenarioParams,
    SensingVariant,
    WideSchedule,
    energy_budget_narrow,
    energy_budget_wide,
    margin_of,
    narrow_terms,
    wide_terms,
)
from .rate import narrow_rate_of, rate_narrow, rate_wide, wide_rate_of

TIE_RTOL = 1e-12
SENSE_FLOOR_TOL = 1e-12
REFINE_SPAN = 10


@dataclass(frozen=True)
class GridSpec:
    resolution: float = 0.01
    refine_levels: int = 0

    def __post_init__(self):
        if not 0 < self.resolution < 1:
            raise DomainError(f"grid resolution must lie in (0, 1), got {self.resolution}")
        if self.refine_levels < 0:
            raise DomainError("refine_levels must be >= 0")

    def axis(self) -> np.ndarray:
        """Interior grid points ``k * resolution`` strictly inside (0, 1)."""
        n = round(1.0 / self.resolution)
        if abs(n * self.resolution - 1.0) < 1e-9:
            return np.arange(1, n) / n
        k = np.arange(1, math.ceil(1.0 / self.resolution))
        pts = k * self.resolution
        return pts[pts < 1.0]


@dataclass(frozen=True)
class SolveResult:
    schedule: Union[NarrowSchedule, WideSchedule, None]
    rate: float
    budget: Union[EnergyBudget, None]
    feasible: bool
    evaluated: int = 0


@dataclass(frozen=True)
class NarrowSurface:
    """Every coarse grid point of the narrowband problem with its verdict."""

    kappa: np.ndarray
    mu: np.ndarray
    tau: np.ndarray
    rate: np.ndarray
    margin: np.ndarray
    feasible: np.ndarray


@dataclass(frozen=True)
class WideSurface:
    alpha: np.ndarray
    gamma: np.ndarray
    rate: np.ndarray
    margin: np.ndarray
    feasible: np.ndarray


def _pick(rate, feasible, primary, secondary):
    """Index of the maximiser under the deterministic tie order, or None."""
    idx = np.flatnonzero(feasible)
    if idx.size == 0:
        return None
    r = rate[idx]
    best = r.max()
    near = idx[r >= best - TIE_RTOL * abs(best)]
    order = np.lexsort((secondary[near], primary[near]))
    return int(near[order[0]])


# -- narrowband ------------------------------------------------------------

def _narrow_eval(kappa, mu, p, variant, tau=None):
    slots = variant.slots
    if tau is None:
        tau = 1.0 - slots * kappa - mu
    margin = margin_of(narrow_terms(tau, kappa, mu, p, slots))
    ok = (tau > 0) & (tau < 1) & (kappa > 0) & (kappa < 1) & (mu > 0) & (mu < 1)
    ok &= kappa >= p.min_sense_fraction - SENSE_FLOOR_TOL
    ok &= margin >= 0
    return tau, narrow_rate_of(tau, p), margin, ok


def narrow_surface(p: ScenarioParams, g: GridSpec = GridSpec(),
                   variant: SensingVariant = SensingVariant.DOUBLE) -> NarrowSurface:
    variant = SensingVariant.parse(variant)
    axis = g.axis()
    kappa, mu = (a.ravel() for a in np.meshgrid(axis, axis, indexing="ij"))
    n = round(1.0 / g.resolution)
    if abs(n * g.resolution - 1.0) < 1e-9:
        # exact rational tau on regular grids keeps table values like 0.78 clean
        ki, mi = (a.ravel() for a in np.meshgrid(np.arange(1, n), np.arange(1, n), indexing="ij"))
        tau = (n - variant.slots * ki - mi) / n
    else:
        tau = None
    tau, rate, margin, ok = _narrow_eval(kappa, mu, p, variant, tau)
    return NarrowSurface(kappa, mu, tau, rate, margin, ok)


def _refine_narrow(p, variant, kappa0, mu0, step):
    offs = np.arange(-REFINE_SPAN, REFINE_SPAN + 1) * step
    kappa, mu = (a.ravel() for a in np.meshgrid(kappa0 + offs, mu0 + offs, indexing="ij"))
    tau, rate, margin, ok = _narrow_eval(kappa, mu, p, variant)
    return kappa, mu, tau, rate, ok


def solve_narrow_grid(p: ScenarioParams, g: GridSpec = GridSpec(),
                      variant: SensingVariant = SensingVariant.DOUBLE) -> SolveResult:
    """Maximise the narrowband rate over (kappa, mu) with tau from the simplex."""
    variant = SensingVariant.parse(variant)
    surf = narrow_surface(p, g, variant)
    evaluated = surf.kappa.size
    i = _pick(surf.rate, surf.feasible, surf.kappa, surf.mu)
    if i is None:
        return SolveResult(None, 0.0, None, False, evaluated)
    kb, mb, tb = surf.kappa[i], surf.mu[i], surf.tau[i]
    step = g.resolution
    for _ in range(g.refine_levels):
        step /= 10.0
        kappa, mu, tau, rate, ok = _refine_narrow(p, variant, kb, mb, step)
        evaluated += kappa.size
        j = _pick(rate, ok, kappa, mu)
        if j is not None:
            kb, mb, tb = kappa[j], mu[j], tau[j]
    sched = NarrowSchedule(float(tb), float(kb), float(mb), variant)
    return SolveResult(sched, rate_narrow(sched, p), energy_budget_narrow(sched, p), True, evaluated)


def solve_narrow_closed_form(p: ScenarioParams,
                             variant: SensingVariant = SensingVariant.DOUBLE) -> SolveResult:
    """Ideal case without sensing time: the energy constraint binds at
    ``tau = (eta P_R - P_D) / (eta P_R + P_C)`` with ``mu = 1 - tau``."""
    harvest = p.eta * p.P_R
    feasible = harvest > p.P_D
    tau = (harvest - p.P_D) / (harvest + p.P_C) if harvest + p.P_C > 0 else 0.0
    tau = min(max(tau, 0.0), 1.0)
    sched = NarrowSchedule(tau, 0.0, 1.0 - tau, SensingVariant.parse(variant))
    return SolveResult(sched, rate_narrow(sched, p), energy_budget_narrow(sched, p), feasible)


# -- wideband --------------------------------------------------------------

def _wide_eval(alpha, gamma, p):
    margin = margin_of(wide_terms(alpha, gamma, p))
    ok = (alpha > 0) & (alpha < 1) & (gamma > 0) & (gamma < 1)
    ok &= alpha >= p.min_sense_fraction - SENSE_FLOOR_TOL
    ok &= margin >= 0
    return wide_rate_of(alpha, gamma, p), margin, ok


def wide_surface(p: ScenarioParams, g: GridSpec = GridSpec()) -> WideSurface:
    axis = g.axis()
    alpha, gamma = (a.ravel() for a in np.meshgrid(axis, axis, indexing="ij"))
    rate, margin, ok = _wide_eval(alpha, gamma, p)
    return WideSurface(alpha, gamma, rate, margin, ok)


def solve_wide_grid(p: ScenarioParams, g: GridSpec = GridSpec()) -> SolveResult:
    """Maximise the wideband rate over (alpha, gamma)."""
    surf = wide_surface(p, g)
    evaluated = surf.alpha.size
    i = _pick(surf.rate, surf.feasible, surf.alpha, surf.gamma)
    if i is None:
        return SolveResult(None, 0.0, None, False, evaluated)
    ab, gb = surf.alpha[i], surf.gamma[i]
    step = g.resolution
    offs_n = np.arange(-REFINE_SPAN, REFINE_SPAN + 1)
    for _ in range(g.refine_levels):
        step /= 10.0
        alpha, gamma = (a.ravel() for a in np.meshgrid(ab + offs_n * step, gb + offs_n * step,
                                                       indexing="ij"))
        rate, _, ok = _wide_eval(alpha, gamma, p)
        evaluated += alpha.size
        j = _pick(rate, ok, alpha, gamma)
        if j is not None:
            ab, gb = alpha[j], gamma[j]
    sched = WideSchedule(float(ab), float(gb))
    return SolveResult(sched, rate_wide(sched, p), energy_budget_wide(sched, p), True, evaluated)


def solve_wide_closed_form(p: ScenarioParams) -> SolveResult:
    """Ideal case without sensing time: ``gamma = (P_C + P_D) / (eta P_R_w)``."""
    harvest = p.eta * p.P_R_w
    need = p.P_C + p.P_D
    feasible = harvest > need
    gamma = min(need / harvest, 1.0) if harvest > 0 else 1.0
    sched = WideSchedule(0.0, gamma)
    return SolveResult(sched, rate_wide(sched, p), energy_budget_wide(sched, p), feasible)
