"""Resonant decay through a single pseudomode, and its scaling limits.

Interaction picture, real coupling g, pseudomode width gamma. On the levels
{|0> vacuum, |1> system, |2> pseudomode} the generator is

    d rho/dt = (4 g^2/gamma0) D_{2,0}(rho) + g h_{1,2}(rho),   gamma = 4 g^2 / gamma0,

and the system amplitude from psi_1(0) = 1 is

    psi_1(t) = e^{-gamma t/4} (cosh(Delta t) + gamma/(4 Delta) sinh(Delta t)),
    Delta = sqrt(gamma^2 - 16 g^2) / 4.

Delta is imaginary in the oscillatory regime gamma^2 < 16 g^2, where psi_1
oscillates at |Delta| under the e^{-gamma t/4} envelope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..gksl import LindbladModel, jump, propagate
from ..quantum_core import DEFAULT_TOL, Tolerances, coherent_coupling_h, dissipator_D, outer, partial_trace_over_indices, require_state

VACUUM, SYSTEM, PSEUDO = 0, 1, 2
CRITICAL_RTOL = 1e-12


@dataclass(frozen=True)
class ResonanceParams:
    g: float
    gamma: float

    def __post_init__(self):
        if self.g < 0 or self.gamma <= 0:
            raise ValueError("need g >= 0 and gamma > 0")

    @classmethod
    def from_markov_rate(cls, g: float, gamma0: float) -> "ResonanceParams":
        return cls(g, 4 * g * g / gamma0)

    @property
    def gamma0(self) -> float:
        """Decay rate in the weak-coupling (Markovian) limit."""
        return 4 * self.g**2 / self.gamma

    @property
    def discriminant(self) -> float:
        return self.gamma**2 - 16 * self.g**2

    @property
    def delta(self) -> complex:
        return 0.25 * np.sqrt(complex(self.discriminant))

    @property
    def oscillatory(self) -> bool:
        return self.discriminant < 0


def _enveloped(p: ResonanceParams, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """e^{-gamma t/4} cosh(Delta t) and e^{-gamma t/4} sinh(Delta t)/Delta.

    The envelope is folded into the exponentials so the overdamped branch
    cannot overflow; Delta -> 0 uses the analytic limit.
    """
    q = 0.25 * p.gamma
    scale = max(p.gamma**2, 16 * p.g**2)
    if abs(p.discriminant) < CRITICAL_RTOL * scale:
        env = np.exp(-q * t)
        return env + 0j, (env * t) + 0j
    if p.discriminant < 0:
        w = 0.25 * np.sqrt(-p.discriminant)  # Delta = i w
        env = np.exp(-q * t)
        return env * np.cos(w * t) + 0j, env * np.sin(w * t) / w + 0j
    d = 0.25 * np.sqrt(p.discriminant)  # 0 < d < q
    lead = np.exp((d - q) * t)
    return lead * 0.5 * (1.0 + np.exp(-2 * d * t)) + 0j, lead * (-np.expm1(-2 * d * t)) / (2 * d) + 0j


def resonance_amplitudes(p: ResonanceParams, t) -> tuple[np.ndarray, np.ndarray]:
    """(psi_1(t), psi_pseudo(t)) for psi_1(0) = 1, psi_pseudo(0) = 0."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    c, s = _enveloped(p, t)
    return c + 0.25 * p.gamma * s, -1j * p.g * s


def interaction_heff(p: ResonanceParams) -> np.ndarray:
    """Interaction-picture H_eff on {|1>, |1~>}."""
    return np.array([[0.0, p.g], [p.g, -0.5j * p.gamma]], dtype=complex)


def _rho0_2level(rho11: float, rho10: complex) -> np.ndarray:
    rho = np.array([[1.0 - rho11, np.conj(rho10)], [rho10, rho11]], dtype=complex)
    return require_state(rho, name="initial system state")


def _assemble(pop: np.ndarray, coh: np.ndarray, rho11: float, rho10: complex) -> np.ndarray:
    rho = np.empty(pop.shape + (2, 2), dtype=complex)
    rho[..., 1, 1] = rho11 * pop
    rho[..., 0, 0] = 1.0 - rho11 * pop
    rho[..., 1, 0] = rho10 * coh
    rho[..., 0, 1] = np.conj(rho10) * np.conj(coh)
    return rho


def resonance_rho_s(g: float, gamma0: float, rho11: float, rho10: complex, t) -> np.ndarray:
    """Reduced state on {|0>, |1>} of the resonant pseudomode model.

    rho_11(t) = rho11 |psi_1(t)|^2 and rho_10(t) = rho10 psi_1(t), where
    psi_1 uses gamma = 4 g^2/gamma0 (so Delta = g sqrt((g/gamma0)^2 - 1)).
    """
    _rho0_2level(rho11, rho10)
    t = np.asarray(t, dtype=float)
    if g == 0:
        psi1 = np.ones_like(t, dtype=complex)
    else:
        psi1, _ = resonance_amplitudes(ResonanceParams.from_markov_rate(g, gamma0), t)
    return _assemble(np.abs(psi1) ** 2, psi1, rho11, rho10)


def markov_limit_rho(gamma0: float, rho11: float, rho10: complex, t) -> np.ndarray:
    """Pure exponential decay: populations at rate gamma0, coherences at gamma0/2."""
    _rho0_2level(rho11, rho10)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    return _assemble(np.exp(-gamma0 * t), np.exp(-0.5 * gamma0 * t), rho11, rho10)


def strong_coupling_limit_rho(g: float, t) -> np.ndarray:
    """cos^2(g t)|1><1| + sin^2(g t)|0><0| (system initially excited)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    rho = np.zeros(t.shape + (2, 2), dtype=complex)
    rho[..., 1, 1] = np.cos(g * t) ** 2
    rho[..., 0, 0] = np.sin(g * t) ** 2
    return rho


def van_hove_rescale(lam: float, t, g: float, gamma0: float | None = None):
    """(t, g, gamma0) -> (t/lam^2, lam g, lam^2 gamma0); gamma0 may be omitted."""
    if not lam > 0:
        raise ValueError("scaling parameter must be positive")
    t2 = np.asarray(t, dtype=float) / lam**2
    return t2, lam * g, None if gamma0 is None else lam**2 * gamma0


def resonance_model(g: float, gamma0: float) -> LindbladModel:
    """(4 g^2/gamma0) D_{2,0} + g h_{1,2} on {|0>, |1>, |2> = pseudomode}."""
    H = g * (outer(SYSTEM, PSEUDO, 3) + outer(PSEUDO, SYSTEM, 3))
    return LindbladModel(H, (jump(4 * g * g / gamma0, VACUUM, PSEUDO, 3),))


def resonance_generator(g: float, gamma0: float):
    """The same generator assembled from the D and h superoperators."""
    return (4 * g * g / gamma0) * dissipator_D(PSEUDO, VACUUM, 3) + g * coherent_coupling_h(SYSTEM, PSEUDO, 3)


def embed_initial(rho11: float, rho10: complex) -> np.ndarray:
    """Three-level initial state with the pseudomode empty."""
    rho = np.zeros((3, 3), dtype=complex)
    rho[:2, :2] = _rho0_2level(rho11, rho10)
    return rho


def traced_propagation(model: LindbladModel, rho11: float, rho10: complex, t, tol: Tolerances = DEFAULT_TOL):
    """Propagate from the embedded initial state and trace out the pseudomode.

    Returns (reduced states, full trajectory).
    """
    traj = propagate(model, embed_initial(rho11, rho10), t, tol)
    return partial_trace_over_indices(traj.states, [PSEUDO]).rho, traj


def _sup_dist(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)))


def van_hove_errors(g: float, gamma0: float, rho11: float, rho10: complex, lambdas, t) -> list[float]:
    """sup_t max-entry distance between rho_S(t/lam^2, lam g, lam^2 gamma0) and rho_M(t)."""
    t = np.asarray(t, dtype=float)
    ref = markov_limit_rho(gamma0, rho11, rho10, t)
    out = []
    for lam in lambdas:
        ts, gs, g0s = van_hove_rescale(lam, t, g, gamma0)
        out.append(_sup_dist(resonance_rho_s(gs, g0s, rho11, rho10, ts), ref))
    return out


def strong_coupling_errors(g: float, gamma: float, lambdas, t) -> list[float]:
    """sup_t distance between rho_S(t/lam, lam g) at fixed width gamma and the oscillatory limit."""
    t = np.asarray(t, dtype=float)
    ref = strong_coupling_limit_rho(g, t)
    out = []
    for lam in lambdas:
        psi1, _ = resonance_amplitudes(ResonanceParams(lam * g, gamma), t / lam)
        out.append(_sup_dist(_assemble(np.abs(psi1) ** 2, psi1, 1.0, 0.0), ref))
    return out
