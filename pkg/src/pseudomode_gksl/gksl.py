"""GKSL (Lindblad) models, the map from an admissible H_eff, and the propagator."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .nonhermitian import decompose_heff
from .quantum_core import (
    DEFAULT_TOL,
    DimensionError,
    Tolerances,
    as_square,
    commutator_superop,
    direct_sum_vacuum,
    lindblad_dissipator_superop,
    outer,
    require_state,
    validate_density_matrix,
)

RATE_CUTOFF = 1e-14
EXPM_MAX_DIM = 64


@dataclass(frozen=True)
class LindbladModel:
    H: np.ndarray
    jumps: tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        H = as_square(self.H, "H")
        if np.max(np.abs(H - H.conj().T)) > DEFAULT_TOL.herm * max(1.0, np.max(np.abs(H))):
            raise ValueError("model Hamiltonian is not Hermitian")
        jumps = tuple(as_square(L, "jump operator") for L in self.jumps)
        for L in jumps:
            if L.shape != H.shape:
                raise DimensionError(f"jump operator {L.shape} does not match H {H.shape}")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "jumps", jumps)

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        """d rho/dt evaluated directly in matrix form."""
        out = -1j * (self.H @ rho - rho @ self.H)
        for L in self.jumps:
            Ld = L.conj().T
            LdL = Ld @ L
            out += L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)
        return out


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (T, d, d)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=complex)
        if self.states.shape[0] != self.times.shape[0]:
            raise ValueError("one state per time point is required")

    def element(self, i: int, j: int) -> np.ndarray:
        return self.states[:, i, j]

    def diagnostics(self, tol: Tolerances = DEFAULT_TOL) -> list:
        return [validate_density_matrix(r, tol) for r in self.states]


def build_gksl_from_heff(heff, tol: Tolerances = DEFAULT_TOL) -> LindbladModel:
    """GKSL model on n+1 levels whose solution is the reconstruction of R(t).

    Hamiltonian 0 (+) H, jumps sqrt(gamma_l)|0><l| with |l> the decay vectors
    (shifted by one to make room for the vacuum). Channels with
    gamma_l < 1e-14 are dropped.
    """
    dec = decompose_heff(heff, tol)
    n = dec.dim
    H = direct_sum_vacuum(dec.H)
    jumps = []
    for g, v in zip(dec.gammas, dec.basis.T):
        if g < RATE_CUTOFF:
            continue
        L = np.zeros((n + 1, n + 1), dtype=complex)
        L[0, 1:] = np.sqrt(g) * v.conj()
        jumps.append(L)
    return LindbladModel(H, tuple(jumps))


def liouvillian_matrix(model: LindbladModel) -> np.ndarray:
    """L with vec(d rho/dt) = L vec(rho), vec = row-major flatten."""
    L = commutator_superop(model.H)
    for J in model.jumps:
        L = L + lindblad_dissipator_superop(J)
    return L


def _uniform_step(times: np.ndarray) -> float | None:
    if len(times) < 2:
        return None
    d = np.diff(times)
    h = d[0]
    if h > 0 and np.all(np.abs(d - h) <= 1e-12 * max(abs(times[-1]), 1.0)):
        return float(h)
    return None


def propagate(
    model: LindbladModel,
    rho0,
    times: Sequence[float],
    tol: Tolerances = DEFAULT_TOL,
    *,
    method: str = "auto",
) -> Trajectory:
    """Solve the GKSL equation on a time grid.

    ``method``: "expm" (superoperator exponential), "rk" (DOP853), or
    "auto" (expm for dim <= 64). On a uniform grid starting at 0 the expm
    path exponentiates once, e^{L h}, and steps; otherwise it exponentiates
    per time point.
    """
    rho0 = require_state(rho0, tol, name="rho0")
    d = model.dim
    if rho0.shape != (d, d):
        raise DimensionError(f"rho0 is {rho0.shape}, model has dim {d}")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0:
        raise ValueError("times must be a non-empty 1-d grid")
    if method == "auto":
        method = "expm" if d <= EXPM_MAX_DIM else "rk"
    if method == "expm":
        states, solver = _propagate_expm(model, rho0, times)
    elif method == "rk":
        states, solver = _propagate_rk(model, rho0, times)
    else:
        raise ValueError(f"unknown method {method!r}")
    return Trajectory(times, states, {"solver": solver, "dim": d})


def _propagate_expm(model, rho0, times):
    Lmat = liouvillian_matrix(model)
    d = model.dim
    v0 = rho0.reshape(-1)
    h = _uniform_step(times)
    out = np.empty((len(times), d * d), dtype=complex)
    if h is not None and times[0] == 0.0:
        P = expm(Lmat * h)
        v = v0
        out[0] = v
        for i in range(1, len(times)):
            v = P @ v
            out[i] = v
        solver = "expm-step"
    else:
        for i, t in enumerate(times):
            out[i] = expm(Lmat * t) @ v0
        solver = "expm"
    return out.reshape(len(times), d, d), solver


def _propagate_rk(model, rho0, times):
    d = model.dim

    def f(_t, y):
        return model.rhs(y.reshape(d, d)).reshape(-1)

    t0 = min(0.0, float(times[0]))
    sol = solve_ivp(f, (t0, float(times[-1])), rho0.reshape(-1), method="DOP853",
                    t_eval=times, rtol=1e-11, atol=1e-13)
    if not sol.success:
        raise RuntimeError(f"GKSL integration failed: {sol.message}")
    return sol.y.T.reshape(len(times), d, d), "rk-dop853"


def jump(rate: float, to: int, frm: int, dim: int) -> np.ndarray:
    """sqrt(rate)|to><frm|."""
    return np.sqrt(rate) * outer(to, frm, dim)
