"""Outage probability over composite Nakagami-m / log-normal channels.

The instantaneous SNR is Gamma distributed (shape ``m``, mean ``Omega``)
given the local mean power ``Omega``, and ``10 log10 Omega`` is Gaussian.
The SNR integral of the outage probability is done in closed form with the
regularised lower incomplete gamma function, leaving a single adaptive
quadrature over the shadowing variable. The shadowing integral is taken in
standardised form ``z = (ln Omega - mean) / std`` on ``[-10, 10]``, whose
Gaussian tail mass outside is below 1e-22.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .channel import PathLossParams, SnrMapping, path_loss, power_of_snr, snr_of_power
from .errors import DomainError, NumericalError

Z_SPAN = 10.0
_DB_TO_NEPER = math.log(10.0) / 10.0
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class FadingParams:
    """Composite channel description.

    ``mu_db`` and ``sigma_db`` are the mean and standard deviation of
    ``10 log10 Omega`` when ``units == "db"``; with ``units == "ln"`` they
    are read as the moments of ``ln Omega`` instead.
    """

    m: float
    mu_db: float = -0.115
    sigma_db: float = 0.161
    alpha_fade: float = 0.7
    units: str = "db"

    def __post_init__(self):
        if not self.m > 0:
            raise DomainError(f"Nakagami m must be > 0, got {self.m}")
        if not self.sigma_db > 0:
            raise DomainError(f"shadowing std must be > 0, got {self.sigma_db}")
        if not self.alpha_fade > 0:
            raise DomainError(f"fading amplitude must be > 0, got {self.alpha_fade}")
        if self.units not in ("db", "ln"):
            raise DomainError(f"units must be 'db' or 'ln', got {self.units!r}")

    @property
    def ln_mean(self) -> float:
        return self.mu_db * _DB_TO_NEPER if self.units == "db" else self.mu_db

    @property
    def ln_std(self) -> float:
        return self.sigma_db * _DB_TO_NEPER if self.units == "db" else self.sigma_db

    def with_m(self, m: float) -> "FadingParams":
        return FadingParams(m, self.mu_db, self.sigma_db, self.alpha_fade, self.units)


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("quadrature tolerances must be > 0")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


def _omega(z, f: FadingParams):
    return np.exp(f.ln_mean + f.ln_std * z)


def _shadow_integral(func, f: FadingParams, q: QuadratureSpec, what: str) -> float:
    """Integrate ``func(Omega) * phi(z)`` over the standardised shadowing axis."""

    def integrand(z):
        return func(_omega(z, f)) * _INV_SQRT_2PI * math.exp(-0.5 * z * z)

    out = integrate.quad(integrand, -Z_SPAN, Z_SPAN, epsabs=q.abs_tol, epsrel=q.rel_tol,
                         limit=q.max_subdivisions, full_output=1)
    if len(out) > 3:
        value, abserr, info, message = out
        raise NumericalError(f"{what}: quadrature did not converge ({message.strip()})",
                             value=value, abserr=abserr, neval=info.get("neval"))
    return float(out[0])


def _nakagami_power_pdf(gamma: float, omega: float, m: float) -> float:
    log_pdf = (m * math.log(m) + (m - 1.0) * math.log(gamma) - m * math.log(omega)
               - special.gammaln(m) - m * gamma / omega)
    return math.exp(log_pdf)


def composite_pdf(gamma: float, f: FadingParams, q: QuadratureSpec = QuadratureSpec()) -> float:
    """Density of the instantaneous SNR after averaging over shadowing."""
    if gamma < 0:
        raise DomainError(f"SNR must be >= 0, got {gamma}")
    if gamma == 0:
        if f.m < 1:
            return math.inf
        if f.m > 1:
            return 0.0
        return _shadow_integral(lambda om: 1.0 / om, f, q, "composite_pdf")
    return _shadow_integral(lambda om: _nakagami_power_pdf(gamma, om, f.m), f, q, "composite_pdf")


def outage_probability(gamma_th: float, f: FadingParams, q: QuadratureSpec = QuadratureSpec()) -> float:
    """Probability that the instantaneous SNR falls below ``gamma_th``."""
    if gamma_th < 0 or math.isnan(gamma_th):
        raise DomainError(f"SNR threshold must be >= 0, got {gamma_th}")
    if gamma_th == 0:
        return 0.0
    if math.isinf(gamma_th):
        return 1.0
    m = f.m
    p = _shadow_integral(lambda om: special.gammainc(m, m * gamma_th / om), f, q,
                         "outage_probability")
    return min(max(p, 0.0), 1.0)


def outage_monte_carlo(gamma_th, f: FadingParams, n_samples: int, seed: int):
    """Empirical outage from ``n_samples`` shadowed Nakagami draws.

    ``gamma_th`` may be an array; every threshold shares the same draws.
    """
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    omega = _omega(rng.standard_normal(n_samples), f)
    snr = np.sort(rng.gamma(f.m, omega / f.m))
    th = np.asarray(gamma_th, dtype=float)
    frac = np.searchsorted(snr, th, side="left") / n_samples
    return float(frac) if frac.ndim == 0 else frac


def outage_vs_received_power(P_th: float, f: FadingParams, N: float,
                             q: QuadratureSpec = QuadratureSpec()) -> float:
    if N <= 0:
        raise DomainError(f"noise power must be > 0, got {N}")
    return outage_probability(snr_of_power(P_th, SnrMapping(f.alpha_fade, N)), f, q)


def invert_threshold(target_pout: float, f: FadingParams, N: float,
                     q: QuadratureSpec = QuadratureSpec(), max_expansions: int = 200) -> float:
    """Received-power threshold whose outage equals ``target_pout``.

    Bisection on the power axis; the result is the lower bound of the
    backscatter detection threshold.
    """
    if not 0 < target_pout < 1:
        raise DomainError(f"target outage must lie in (0, 1), got {target_pout}")
    if N <= 0:
        raise DomainError(f"noise power must be > 0, got {N}")
    tol = 10.0 * q.rel_tol

    def pout(P):
        return outage_vs_received_power(P, f, N, q)

    hi = power_of_snr(1.0, SnrMapping(f.alpha_fade, N))
    for _ in range(max_expansions):
        if pout(hi) >= target_pout:
            break
        hi *= 2.0
    else:
        raise NumericalError("invert_threshold: could not bracket the target from above",
                             target=target_pout, hi=hi)
    lo = hi
    for _ in range(max_expansions):
        lo /= 2.0
        if pout(lo) < target_pout:
            break
    else:
        raise NumericalError("invert_threshold: could not bracket the target from below",
                             target=target_pout, lo=lo)

    mid = 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = pout(mid)
        if abs(val - target_pout) <= tol:
            return mid
        if val < target_pout:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    if abs(pout(mid) - target_pout) > tol:
        raise NumericalError("invert_threshold: bisection stalled", target=target_pout, p_th=mid)
    return mid


def transmit_power_threshold(P_th: float, pl: PathLossParams) -> float:
    """Minimum transmit power so the received power reaches ``P_th``."""
    return P_th / path_loss(pl)


def required_transmit_power(target_pout: float, f: FadingParams, N: float, pl: PathLossParams,
                            q: QuadratureSpec = QuadratureSpec()) -> float:
    return transmit_power_threshold(invert_threshold(target_pout, f, N, q), pl)
