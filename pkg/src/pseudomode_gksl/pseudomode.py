"""Pseudomodes for a level coupled to a Lorentzian continuum at zero temperature.

A single excited level |1> (frequency omega1) couples to a bath whose
memory kernel is a finite sum of damped exponentials,

    G(t) = sum_l g_l^2 exp(-(gamma_l/2 + i omega_l) t),
    J(w) = sum_l gamma_l g_l^2 / ((gamma_l/2)^2 + (w - omega_l)^2),

with G(t) = int dw/(2 pi) e^{-i w t} J(w). The amplitude psi_1 obeys

    dpsi_1/dt = -i omega1 psi_1 - int_0^t G(t - s) psi_1(s) ds,

which is solved here three ways: as a finite non-Hermitian Schroedinger
equation (one pseudomode per Lorentzian), by direct trapezoidal quadrature
of the integro-differential equation, and by unitary evolution of a
discretized Friedrichs bath.

Index layout of the effective Hamiltonian: 0 is the system level |1>,
1..n are the pseudomodes. After normalization reconstruction everything
shifts up by one and the vacuum takes index 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .nonhermitian import decompose_heff, evolve_psi
from .quantum_core import DEFAULT_TOL, Tolerances


@dataclass(frozen=True)
class PseudomodeParams:
    omega1: float
    g: np.ndarray
    gamma: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        g = np.atleast_1d(np.asarray(self.g, dtype=complex))
        gamma = np.atleast_1d(np.asarray(self.gamma, dtype=float))
        omega = np.atleast_1d(np.asarray(self.omega, dtype=float))
        if not (g.shape == gamma.shape == omega.shape) or g.ndim != 1 or g.size == 0:
            raise ValueError("g, gamma, omega must be 1-d arrays of equal, non-zero length")
        if np.any(gamma <= 0) or not np.all(np.isfinite(gamma)):
            raise ValueError("pseudomode widths gamma_l must be positive")
        object.__setattr__(self, "omega1", float(self.omega1))
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "omega", omega)

    @classmethod
    def from_terms(cls, omega1: float, terms: Sequence[Sequence]) -> "PseudomodeParams":
        """Build from a list of (g_l, gamma_l, omega_l) triples."""
        terms = list(terms)
        if not terms:
            raise ValueError("at least one (g, gamma, omega) term is required")
        g, gamma, omega = zip(*terms)
        return cls(omega1, np.array(g), np.array(gamma), np.array(omega))

    @property
    def n(self) -> int:
        return self.g.size

    @property
    def real_coupling(self) -> bool:
        return bool(np.all(self.g.imag == 0))


def memory_kernel(p: PseudomodeParams, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("memory kernel is defined for t >= 0 only")
    rates = p.gamma / 2 + 1j * p.omega
    return np.sum(p.g**2 * np.exp(-np.multiply.outer(t, rates)), axis=-1)


def spectral_density(p: PseudomodeParams, w) -> np.ndarray:
    if not p.real_coupling:
        raise ValueError("J(w) is only defined here for real couplings g_l")
    w = np.asarray(w, dtype=float)
    g2 = p.g.real**2
    x = np.subtract.outer(w, p.omega)
    return np.sum(p.gamma * g2 / ((p.gamma / 2) ** 2 + x**2), axis=-1)


def build_pseudomode_heff(p: PseudomodeParams, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Effective Hamiltonian on {|1>, |1~>, ..., |n~>}, checked for admissibility."""
    n = p.n
    H = np.zeros((n + 1, n + 1), dtype=complex)
    H[0, 0] = p.omega1
    H[np.arange(1, n + 1), np.arange(1, n + 1)] = p.omega - 0.5j * p.gamma
    H[1:, 0] = p.g
    H[0, 1:] = p.g
    decompose_heff(H, tol)
    return H


def pseudomode_amplitudes(p: PseudomodeParams, times, psi1_0: complex = 1.0) -> np.ndarray:
    """(psi_1(t), phi_1(t), ..., phi_n(t)) from the effective Hamiltonian."""
    H = build_pseudomode_heff(p)
    psi0 = np.zeros(p.n + 1, dtype=complex)
    psi0[0] = psi1_0
    return evolve_psi(H, psi0, times)


def pseudomode_psi1(p: PseudomodeParams, times, psi1_0: complex = 1.0) -> np.ndarray:
    return pseudomode_amplitudes(p, times, psi1_0)[:, 0]


def convolve_pseudomode_amplitudes(p: PseudomodeParams, times, psi1) -> np.ndarray:
    """phi_l(t) = -i g_l int_0^t e^{-(gamma_l/2 + i omega_l)(t - s)} psi_1(s) ds.

    Trapezoidal rule on the given uniform grid, written as a stable
    one-step recursion. Returns shape (len(times), n).
    """
    times = _uniform_grid(times)
    psi1 = np.asarray(psi1, dtype=complex)
    h = times[1] - times[0]
    a = p.gamma / 2 + 1j * p.omega
    decay = np.exp(-a * h)
    out = np.zeros((len(times), p.n), dtype=complex)
    acc = np.zeros(p.n, dtype=complex)
    for i in range(1, len(times)):
        acc = decay * acc + 0.5 * h * (decay * psi1[i - 1] + psi1[i])
        out[i] = acc
    return -1j * p.g * out


# ---------------------------------------------------------------------------
# Volterra (integro-differential) oracle
# ---------------------------------------------------------------------------


def _uniform_grid(times) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or len(t) < 2:
        raise ValueError("need a 1-d grid with at least two points")
    if t[0] != 0.0:
        raise ValueError("grid must start at t = 0")
    d = np.diff(t)
    if np.any(d <= 0) or np.max(np.abs(d - d[0])) > 1e-9 * d[0]:
        raise ValueError("grid must be uniform")
    return t


def solve_volterra(
    p: PseudomodeParams | None,
    times,
    psi1_0: complex = 1.0,
    *,
    omega1: float | None = None,
    kernel: Callable[[np.ndarray], np.ndarray] | None = None,
) -> np.ndarray:
    """Trapezoidal solution of dpsi/dt = -i omega1 psi - int_0^t G(t-s) psi(s) ds.

    Both the memory integral and the time step use the trapezoidal rule; the
    new point enters linearly and is solved for in closed form. Second order
    in the step. O(N^2) work: the kernel is sampled once on the grid and the
    memory sum is evaluated directly, with no use of the exponential form.

    ``kernel`` and ``omega1`` override the values implied by ``p``.
    """
    t = _uniform_grid(times)
    h = t[1] - t[0]
    if p is None and (kernel is None or omega1 is None):
        raise ValueError("without params both omega1 and kernel must be given")
    w1 = p.omega1 if omega1 is None else omega1
    if kernel is None:
        Gs = memory_kernel(p, t)
    else:
        Gs = np.asarray(kernel(t), dtype=complex)
    N = len(t)
    psi = np.zeros(N, dtype=complex)
    psi[0] = psi1_0
    # f_n = -i w1 psi_n - I_n,   I_n = h * (G_n psi_0/2 + sum_{j=1}^{n-1} G_{n-j} psi_j + G_0 psi_n/2)
    f_prev = -1j * w1 * psi[0]  # I_0 = 0
    denom = 1.0 + 0.5j * h * w1 + 0.25 * h * h * Gs[0]
    Grev = Gs[::-1]  # Grev[N-1-k] = G_k
    for i in range(1, N):
        # known part of I_i: j = 0..i-1 with trapezoid end weight on j = 0
        known = h * (np.dot(Grev[N - 1 - i:N - 1], psi[:i]) - 0.5 * Gs[i] * psi[0])
        psi[i] = (psi[i - 1] + 0.5 * h * f_prev - 0.5 * h * known) / denom
        f_prev = -1j * w1 * psi[i] - (known + 0.5 * h * Gs[0] * psi[i])
    return psi


@dataclass(frozen=True)
class RichardsonResult:
    times: np.ndarray
    psi: np.ndarray  # finest-grid solution, sampled on ``times``
    extrapolated: np.ndarray
    order: float
    steps: tuple[float, ...]
    error_estimate: float  # |psi_{h/2} - psi_{h/4}| / 3, sup norm: error of ``psi``


def richardson_volterra(p: PseudomodeParams, t_max: float, n_coarse: int, psi1_0: complex = 1.0) -> RichardsonResult:
    """Solve on steps h, h/2, h/4 and report the observed convergence order.

    The order is log2(|psi_h - psi_{h/2}| / |psi_{h/2} - psi_{h/4}|) using
    sup norms on the coarse grid. ``extrapolated`` is (4 psi_{h/4} - psi_{h/2})/3.
    """
    sols = []
    steps = []
    for k in range(3):
        m = n_coarse * 2**k
        tk = np.linspace(0.0, t_max, m + 1)
        steps.append(tk[1] - tk[0])
        sols.append(solve_volterra(p, tk, psi1_0)[:: 2**k])
    d1 = np.max(np.abs(sols[0] - sols[1]))
    d2 = np.max(np.abs(sols[1] - sols[2]))
    order = float(np.log2(d1 / d2)) if d2 > 0 else float("inf")
    t = np.linspace(0.0, t_max, n_coarse + 1)
    return RichardsonResult(t, sols[2], (4 * sols[2] - sols[1]) / 3, order, tuple(steps), d2 / 3)


def choose_volterra_step(
    p: PseudomodeParams,
    t_max: float,
    target: float = 2.5e-7,
    n_coarse: int = 250,
    max_coarse: int = 64000,
    psi1_0: complex = 1.0,
) -> RichardsonResult:
    """Halve the step until the order is 2 +- 0.2 and the error estimate is below ``target``."""
    while True:
        r = richardson_volterra(p, t_max, n_coarse, psi1_0)
        if abs(r.order - 2.0) <= 0.2 and r.error_estimate <= target:
            return r
        if n_coarse * 2 > max_coarse:
            raise RuntimeError(
                f"Volterra step selection did not settle (order {r.order:.3f}, "
                f"error estimate {r.error_estimate:.2e} at h = {r.steps[-1]:.2e})"
            )
        n_coarse *= 2


# ---------------------------------------------------------------------------
# discretized Friedrichs bath
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiscretizedBath:
    omega: np.ndarray
    g: np.ndarray
    dw: np.ndarray
    windows: tuple[tuple[float, float], ...]

    @property
    def n_modes(self) -> int:
        return self.omega.size

    def kernel(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.exp(-1j * np.multiply.outer(t, self.omega)) @ (np.abs(self.g) ** 2)


def _merge_windows(p: PseudomodeParams, K: float) -> list[list[float]]:
    wins = sorted([[w - K * gm, w + K * gm] for w, gm in zip(p.omega, p.gamma)])
    merged = [wins[0]]
    for lo, hi in wins[1:]:
        if lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return merged


def discretize_bath(p: PseudomodeParams, N: int, K: float = 40.0) -> DiscretizedBath:
    """Midpoint discretization of J(w) over the union of [w_l - K g_l, w_l + K g_l].

    Mode couplings are g_k = sqrt(J(w_k) dw / 2 pi). The N modes are shared
    between disjoint windows in proportion to their width.
    """
    if N < 2:
        raise ValueError("need at least two bath modes")
    if K < 1:
        raise ValueError("window half-width K must be >= 1")
    merged = _merge_windows(p, K)
    lengths = np.array([hi - lo for lo, hi in merged])
    total = lengths.sum()
    if not np.isfinite(total) or total <= 0:
        raise ValueError("degenerate bath window")
    counts = np.maximum(1, np.round(N * lengths / total).astype(int))
    counts[np.argmax(counts)] += N - counts.sum()
    if np.any(counts < 1):
        raise ValueError(f"cannot share {N} modes between {len(merged)} windows")
    omegas, dws = [], []
    for (lo, hi), m in zip(merged, counts):
        dw = (hi - lo) / m
        omegas.append(lo + dw * (np.arange(m) + 0.5))
        dws.append(np.full(m, dw))
    omega = np.concatenate(omegas)
    dw = np.concatenate(dws)
    g = np.sqrt(spectral_density(p, omega) * dw / (2 * np.pi))
    return DiscretizedBath(omega, g, dw, tuple((lo, hi) for lo, hi in merged))


def friedrichs_hamiltonian(bath: DiscretizedBath, omega1: float) -> np.ndarray:
    """Hermitian matrix on {|1>, |k_1>, ..., |k_N>}."""
    N = bath.n_modes
    H = np.zeros((N + 1, N + 1), dtype=complex)
    H[0, 0] = omega1
    H[np.arange(1, N + 1), np.arange(1, N + 1)] = bath.omega
    H[0, 1:] = bath.g
    H[1:, 0] = np.conj(bath.g)
    return H


def evolve_friedrichs(bath: DiscretizedBath, omega1: float, psi1_0: complex, times, *, full: bool = False) -> np.ndarray:
    """Unitary evolution from psi(0) = psi1_0 |1>; returns psi_1(t) (or the full state)."""
    H = friedrichs_hamiltonian(bath, omega1)
    E, V = np.linalg.eigh(H)
    t = np.asarray(times, dtype=float)
    c = V.conj()[0] * psi1_0  # V^+ psi(0)
    phases = np.exp(-1j * np.multiply.outer(t, E))
    psi = (phases * c) @ V.T
    return psi if full else psi[:, 0]


# ---------------------------------------------------------------------------
# reduced state of the system
# ---------------------------------------------------------------------------


def reduced_density_matrix(psi_vac: complex, psi1_0: complex, psi1_t, *, atol: float = 1e-10) -> np.ndarray:
    """rho_S(t) on {|0>, |1>} for an initial superposition psi_vac|0> + psi1_0|1>.

    rho_S = |psi1|^2 |1><1| + psi1 psi_vac^* |1><0| + h.c. + (1 - |psi1|^2)|0><0|.
    Returns shape (len(psi1_t), 2, 2) (or (2, 2) for a scalar).
    """
    if abs(abs(psi_vac) ** 2 + abs(psi1_0) ** 2 - 1.0) > atol:
        raise ValueError("initial amplitudes must be normalized")
    a = np.asarray(psi1_t, dtype=complex)
    pop = np.abs(a) ** 2
    rho = np.empty(a.shape + (2, 2), dtype=complex)
    rho[..., 1, 1] = pop
    rho[..., 0, 0] = 1.0 - pop
    rho[..., 1, 0] = a * np.conj(psi_vac)
    rho[..., 0, 1] = np.conj(a) * psi_vac
    return rho
