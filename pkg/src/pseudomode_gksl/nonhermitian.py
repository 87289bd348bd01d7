"""Von Neumann and Schroedinger evolution with a dissipative non-Hermitian Hamiltonian.

    dR/dt = -i H_eff R + i R H_eff^+,        R(t) = e^{-i H_eff t} R(0) e^{i H_eff^+ t}

An H_eff is admissible (normalization never grows) iff its anti-Hermitian
part (H_eff - H_eff^+)/i is negative semidefinite, i.e. iff

    H_eff = H - (i/2) sum_l gamma_l |l><l|,   H = H^+,  gamma_l >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .quantum_core import DEFAULT_TOL, DimensionError, Tolerances, as_square, require_state


class NotDissipative(ValueError):
    """H_eff would let the normalization Tr R grow."""


@dataclass(frozen=True)
class HeffDecomposition:
    H: np.ndarray
    gammas: np.ndarray
    basis: np.ndarray  # columns are the decay vectors |l>

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    def reconstruct(self) -> np.ndarray:
        V = self.basis
        return self.H - 0.5j * (V * self.gammas) @ V.conj().T

    def in_decay_basis(self) -> tuple[np.ndarray, np.ndarray]:
        """Hermitian part expressed in the decay basis, and the rates."""
        V = self.basis
        return V.conj().T @ self.H @ V, self.gammas.copy()


def decompose_heff(heff, tol: Tolerances = DEFAULT_TOL) -> HeffDecomposition:
    """Split H_eff into its Hermitian part and decay rates/vectors.

    Eigenvalues of -(H_eff - H_eff^+)/i inside [-tol.psd, 0) are clamped
    to zero. For degenerate rates any orthonormal eigenbasis is returned.
    """
    heff = as_square(heff, "H_eff")
    H = 0.5 * (heff + heff.conj().T)
    A = (heff - heff.conj().T) / 1j
    A = 0.5 * (A + A.conj().T)
    evals, evecs = np.linalg.eigh(-A)
    if evals[0] < -tol.psd:
        raise NotDissipative(
            f"(H_eff - H_eff^+)/i has eigenvalue {-evals[0]:.3e} > 0; the normalization would grow"
        )
    gammas = np.where(evals < 0.0, 0.0, evals)
    return HeffDecomposition(H=H, gammas=gammas, basis=evecs)


def is_admissible(heff, tol: Tolerances = DEFAULT_TOL) -> bool:
    try:
        decompose_heff(heff, tol)
    except NotDissipative:
        return False
    return True


def propagators(heff: np.ndarray, times) -> np.ndarray:
    """Stack of e^{-i H_eff t} for every t in ``times``."""
    t = np.asarray(times, dtype=float)
    return expm(-1j * t[:, None, None] * heff[None, :, :])


def evolve_R(heff, R0, times, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """R(t) for each time point, shape (len(times), n, n)."""
    heff = as_square(heff, "H_eff")
    decompose_heff(heff, tol)
    R0 = require_state(R0, tol, normalized=False, name="R0")
    if R0.shape != heff.shape:
        raise DimensionError(f"R0 is {R0.shape}, H_eff is {heff.shape}")
    U = propagators(heff, times)
    return U @ R0 @ np.conj(np.swapaxes(U, -1, -2))


def evolve_psi(heff, psi0, times, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """psi(t) = e^{-i H_eff t} psi0, shape (len(times), n)."""
    heff = as_square(heff, "H_eff")
    decompose_heff(heff, tol)
    psi0 = np.asarray(psi0, dtype=complex).reshape(-1)
    if psi0.shape[0] != heff.shape[0]:
        raise DimensionError(f"psi0 has length {psi0.shape[0]}, H_eff is {heff.shape}")
    return propagators(heff, times) @ psi0


def trace_decay_rate(R, dec: HeffDecomposition) -> float:
    """d/dt Tr R = -sum_l gamma_l <l|R|l> (never positive)."""
    R = np.asarray(R, dtype=complex)
    if R.shape != (dec.dim, dec.dim):
        raise DimensionError(f"R is {R.shape}, decomposition has dim {dec.dim}")
    V = dec.basis
    diag = np.einsum("il,ij,jl->l", V.conj(), R, V).real
    return float(-np.dot(dec.gammas, diag))
