"""Parameter estimates for a resonant dimer model of the FMO complex.

Spectroscopic inputs are wavenumbers (cm^-1). Rates convert to ps^-1 by
multiplying with the speed of light in cm/ps, without a factor 2 pi.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

C_CM_PER_PS = 0.0299792458


def wavenumber_to_rate(value: float) -> float:
    """cm^-1 -> ps^-1."""
    if value < 0:
        raise ValueError("wavenumber must be non-negative")
    return C_CM_PER_PS * value


def rate_to_wavenumber(rate: float) -> float:
    """ps^-1 -> cm^-1."""
    if rate < 0:
        raise ValueError("rate must be non-negative")
    return rate / C_CM_PER_PS


def wavenumber_to_time_ps(value: float) -> float:
    """1/rate in ps for a rate given in cm^-1 (inf for 0)."""
    r = wavenumber_to_rate(value)
    return float("inf") if r == 0 else 1.0 / r


@dataclass(frozen=True)
class FMOParams:
    omega0: float = 202.0  # vibrational peak, cm^-1
    beta_inv: float = 53.0  # k_B T, cm^-1
    S: float = 0.02  # Huang-Rhys factor
    gamma0_half: float = 133.0  # Markovian coherence decay rate, cm^-1

    def __post_init__(self):
        for k, v in asdict(self).items():
            if not v > 0:
                raise ValueError(f"{k} must be positive")


def fmo_derive(p: FMOParams) -> dict:
    n = 1.0 / np.expm1(p.omega0 / p.beta_inv)
    g = np.sqrt(p.S) * p.omega0
    gamma0 = 2.0 * p.gamma0_half
    gamma = 4.0 * g * g / gamma0
    disc = gamma**2 - 16.0 * g * g
    abs_delta = 0.25 * np.sqrt(abs(disc))
    regime = "oscillatory" if disc < 0 else ("critical" if disc == 0 else "overdamped")
    return {
        "n": float(n),
        "g_cm": float(g),
        "gamma0_cm": float(gamma0),
        "gamma_cm": float(gamma),
        "gamma_quarter_cm": float(gamma / 4),
        "discriminant_cm2": float(disc),
        "abs_delta_cm": float(abs_delta),
        "regime": regime,
        "markov_coherence_time_fs": 1e3 * wavenumber_to_time_ps(p.gamma0_half),
        "coherence_lifetime_ps": wavenumber_to_time_ps(gamma / 4),
        # populations oscillate like cos^2(|Delta| t): period pi/|Delta|
        "population_oscillation_period_ps": float(np.pi * wavenumber_to_time_ps(abs_delta)) if abs_delta > 0 else float("inf"),
        "inputs": asdict(p),
    }
