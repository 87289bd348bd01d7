"""Finite-temperature deformation of the resonant pseudomode generator.

    gamma0 n D_{0,1} + 4 g^2/(gamma0 (n + 1)) D_{2,0} + g h_{1,2}

on {|0>, |1>, |2> = pseudomode}. At n = 0 it is the zero-temperature
generator; under t -> t/lam^2, g -> lam g, gamma0 -> lam^2 gamma0 the reduced
state tends to the thermal Markov solution in ``finite_temp_markov_rho``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..gksl import RATE_CUTOFF, LindbladModel, jump
from ..quantum_core import coherent_coupling_h, dissipator_D, outer
from .resonance import PSEUDO, SYSTEM, VACUUM, _rho0_2level, traced_propagation, van_hove_rescale


@dataclass(frozen=True)
class FiniteTempParams:
    g: float
    gamma0: float
    n: float

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("thermal occupation n must be non-negative")
        if self.gamma0 <= 0:
            raise ValueError("gamma0 must be positive")

    @property
    def pump_rate(self) -> float:
        return self.gamma0 * self.n

    @property
    def pseudo_rate(self) -> float:
        return 4 * self.g**2 / (self.gamma0 * (self.n + 1))


def finite_temp_generator(p: FiniteTempParams) -> LindbladModel:
    H = p.g * (outer(SYSTEM, PSEUDO, 3) + outer(PSEUDO, SYSTEM, 3))
    jumps = []
    if p.pump_rate >= RATE_CUTOFF:
        jumps.append(jump(p.pump_rate, SYSTEM, VACUUM, 3))
    if p.pseudo_rate >= RATE_CUTOFF:
        jumps.append(jump(p.pseudo_rate, VACUUM, PSEUDO, 3))
    return LindbladModel(H, tuple(jumps))


def finite_temp_superop(p: FiniteTempParams):
    """The generator built term by term from D and h superoperators."""
    return (
        p.pump_rate * dissipator_D(VACUUM, SYSTEM, 3)
        + p.pseudo_rate * dissipator_D(PSEUDO, VACUUM, 3)
        + p.g * coherent_coupling_h(SYSTEM, PSEUDO, 3)
    )


def finite_temp_markov_rho(gamma0: float, n: float, rho11: float, rho10: complex, t) -> np.ndarray:
    """Thermal Markov solution relaxing to diag((1+n)/(1+2n), n/(1+2n))."""
    if n < 0:
        raise ValueError("n must be non-negative")
    _rho0_2level(rho11, rho10)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    stat = n / (1 + 2 * n)
    rate = gamma0 * (2 * n + 1)
    p11 = stat + (rho11 - stat) * np.exp(-rate * t)
    rho = np.empty(t.shape + (2, 2), dtype=complex)
    rho[..., 1, 1] = p11
    rho[..., 0, 0] = 1.0 - p11
    coh = np.exp(-0.5 * rate * t)
    rho[..., 1, 0] = rho10 * coh
    rho[..., 0, 1] = np.conj(rho10) * coh
    return rho


def finite_temp_limit_errors(g: float, gamma0: float, n: float, rho11: float, rho10: complex, lambdas, t) -> list[float]:
    """sup_t max-entry distance between the scaled, traced propagation and the Markov form."""
    t = np.asarray(t, dtype=float)
    ref = finite_temp_markov_rho(gamma0, n, rho11, rho10, t)
    out = []
    for lam in lambdas:
        ts, gs, g0s = van_hove_rescale(lam, t, g, gamma0)
        red, _ = traced_propagation(finite_temp_generator(FiniteTempParams(gs, g0s, n)), rho11, rho10, ts)
        out.append(float(np.max(np.abs(red - ref))))
    return out
