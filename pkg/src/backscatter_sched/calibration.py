"""Recover unstated scenario constants from target optima.

The optimal schedules depend only on the power reaching the node, while the
rate ratio between a scheme and its baseline depends only on the
backscatter SNR scale. Calibration therefore runs in two stages: a
logarithmic sweep of the node power that locates the window reproducing a
target schedule, then a root search for the SNR scale (hence the uplink
distance) that reproduces a target rate ratio. The bandwidth is finally
set so the scheme's rate matches a target in bits per second.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .channel import distance_for_gain, shannon_log2
from .errors import NumericalError
from .power_model import ScenarioParams, SensingVariant
from .scheduler import GridSpec, solve_narrow_grid, solve_wide_grid

BASELINE_EFFICIENCY = 0.5


@dataclass(frozen=True)
class Calibration:
    power: float
    window: tuple
    snr_scale: float
    distance: float
    bandwidth: float
    schedule: tuple
    baseline_schedule: tuple
    ratio: float


def baseline_of(p: ScenarioParams, eta: float = BASELINE_EFFICIENCY,
                beta: float = BASELINE_EFFICIENCY) -> ScenarioParams:
    """The scheme without threshold filtering: same time structure, lossy
    harvesting and reflection."""
    return p.replace(eta=eta, beta=beta)


def _matches(values, target, tol):
    return all(abs(a - b) <= tol for a, b in zip(values, target))


def power_window(solve, target, powers, tol):
    """Contiguous range of swept powers whose optimum equals ``target``."""
    hits = [P for P in powers if (s := solve(P)) is not None and _matches(s, target, tol)]
    if not hits:
        raise NumericalError("no swept power reproduces the target schedule", target=target)
    return min(hits), max(hits)


def _ratio_root(ratio_of_x, target_ratio):
    f = lambda lx: ratio_of_x(math.exp(lx)) - target_ratio
    grid = np.linspace(-20.0, 20.0, 401)
    vals = np.array([f(v) for v in grid])
    sign_change = np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))
    if sign_change.size == 0:
        raise NumericalError("target rate ratio is not attainable", target=target_ratio)
    k = sign_change[0]
    return math.exp(optimize.brentq(f, grid[k], grid[k + 1], xtol=1e-14, rtol=1e-14))


def calibrate_narrow(base: ScenarioParams, target=(0.11, 0.11, 0.78), target_ratio=395 / 224,
                     target_bps=395.0, grid: GridSpec = GridSpec(0.01),
                     variant=SensingVariant.SINGLE, powers=None,
                     baseline_target=(0.11, 0.21, 0.68)) -> Calibration:
    """``target`` is ``(kappa, mu, tau)`` of the optimum with sensing.

    When ``baseline_target`` is given the power window is narrowed to the
    powers that also reproduce the baseline optimum.
    """
    powers = np.geomspace(1e-5, 1e-1, 801) if powers is None else powers
    tol = grid.resolution / 2

    def sched_at(P, p0=base):
        r = solve_narrow_grid(p0.replace(P_R=float(P)), grid, variant)
        return None if not r.feasible else (r.schedule.kappa, r.schedule.mu, r.schedule.tau)

    def both_at(P):
        s, b = sched_at(P), sched_at(P, baseline_of(base))
        return None if s is None or b is None else s + b

    if baseline_target is None:
        lo, hi = power_window(sched_at, target, powers, tol)
    else:
        lo, hi = power_window(both_at, tuple(target) + tuple(baseline_target), powers, tol)
    P = math.sqrt(lo * hi)
    p = base.replace(P_R=P)
    s = solve_narrow_grid(p, grid, variant).schedule
    b_res = solve_narrow_grid(baseline_of(p), grid, variant)
    if not b_res.feasible:
        raise NumericalError("baseline is infeasible at the calibrated power", power=P)
    b = b_res.schedule
    bl = baseline_of(p)

    def ratio(x):
        return (s.tau * shannon_log2(p.beta * x)) / (b.tau * shannon_log2(bl.beta * x))

    x = _ratio_root(ratio, target_ratio)
    gain = x * p.noise_rx / P
    d = distance_for_gain(gain, p.pathloss_up.exponent, p.pathloss_up.constant)
    bw = target_bps / (s.tau * shannon_log2(p.beta * x))
    return Calibration(P, (lo, hi), x, d, bw, (s.kappa, s.mu, s.tau), (b.kappa, b.mu, b.tau), ratio(x))


def calibrate_wide(base: ScenarioParams, target=(0.11, 0.11), target_ratio=3864 / 2694,
                   target_bps=3864.0, grid: GridSpec = GridSpec(0.01), powers=None) -> Calibration:
    """``target`` is ``(alpha, gamma)`` of the optimum with compressive sensing."""
    powers = np.geomspace(1e-4, 1.0, 801) if powers is None else powers
    tol = grid.resolution / 2

    def sched_at(P):
        r = solve_wide_grid(base.replace(P_R_w=float(P)), grid)
        return None if not r.feasible else (r.schedule.alpha, r.schedule.gamma)

    lo, hi = power_window(sched_at, target, powers, tol)
    P = math.sqrt(lo * hi)
    p = base.replace(P_R_w=P)
    s = solve_wide_grid(p, grid).schedule
    b_res = solve_wide_grid(baseline_of(p), grid)
    if not b_res.feasible:
        raise NumericalError("baseline is infeasible at the calibrated power", power=P)
    b = b_res.schedule
    bl = baseline_of(p)

    def ratio(x):
        return ((1 - s.alpha) * shannon_log2(p.beta * (1 - s.gamma) * x)
                / ((1 - b.alpha) * shannon_log2(bl.beta * (1 - b.gamma) * x)))

    x = _ratio_root(ratio, target_ratio)
    gain = x * p.noise_rx / P
    d = distance_for_gain(gain, p.pathloss_up.exponent, p.pathloss_up.constant)
    bw = target_bps / ((1 - s.alpha) * shannon_log2(p.beta * (1 - s.gamma) * x))
    return Calibration(P, (lo, hi), x, d, bw, (s.alpha, s.gamma), (b.alpha, b.gamma), ratio(x))
