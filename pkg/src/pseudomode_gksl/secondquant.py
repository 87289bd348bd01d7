"""One-particle second quantization into a register of two-level modes.

Level l of an (n+1)-level system maps to the product state with a single
excitation in mode l; the vacuum level maps to all modes empty:

    |0> -> |0...0>,     |l> -> |0..0 1_l 0..0>,   l = 1..n.

Mode 1 is the leftmost tensor factor (most significant bit), so |l> sits at
register index 2**(n - l). The annihilators are two-level lowering operators
sigma_l = |0><1| on factor l; they commute across different modes, which is
enough on the zero- and one-excitation sectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .gksl import RATE_CUTOFF, LindbladModel
from .quantum_core import as_square, check_index_set, partial_trace_over_indices

MAX_MODES = 12

_LOWER = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |0><1|
_EYE2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class TensorState:
    rho: np.ndarray  # (2**n_modes, 2**n_modes), or a stack of them
    labels: tuple[int, ...]  # original mode label of each tensor factor, left to right

    @property
    def n_modes(self) -> int:
        return len(self.labels)


def _check_modes(n: int) -> None:
    if n < 0 or n > MAX_MODES:
        raise ValueError(f"number of modes must be in 0..{MAX_MODES}, got {n}")


def one_particle_indices(n: int) -> np.ndarray:
    """Register indices of |0^>, |1^>, ..., |n^>."""
    _check_modes(n)
    return np.array([0] + [1 << (n - l) for l in range(1, n + 1)], dtype=np.int64)


def lowering(l: int, n: int) -> np.ndarray:
    """sigma_l on an n-mode register (1-based mode index)."""
    _check_modes(n)
    if not 1 <= l <= n:
        raise IndexError(f"mode {l} outside 1..{n}")
    factors = [_LOWER if i == l else _EYE2 for i in range(1, n + 1)]
    return reduce(np.kron, factors)


def embed_one_particle(rho, labels: Sequence[int] | None = None) -> TensorState:
    """rho^ = sum_lk rho_lk |l^><k^| for an (n+1)-level rho (vacuum at 0)."""
    a = np.asarray(rho, dtype=complex)
    n = a.shape[-1] - 1
    _check_modes(n)
    idx = one_particle_indices(n)
    out = np.zeros(a.shape[:-2] + (2**n, 2**n), dtype=complex)
    out[..., idx[:, None], idx[None, :]] = a
    return TensorState(out, tuple(range(1, n + 1)) if labels is None else tuple(labels))


def unembed_one_particle(ts: TensorState) -> tuple[np.ndarray, np.ndarray]:
    """Read rho_lk off the one-particle positions.

    Returns ``(rho, leakage)`` where leakage is the population outside the
    one-particle sector (per state in a stack). Nothing is renormalized.
    """
    idx = one_particle_indices(ts.n_modes)
    rho = ts.rho[..., idx[:, None], idx[None, :]]
    pops = np.real(np.diagonal(ts.rho, axis1=-2, axis2=-1))
    leakage = np.sum(pops, axis=-1) - np.sum(pops[..., idx], axis=-1)
    return rho, leakage


def build_second_quantized_gksl(H, gammas) -> LindbladModel:
    """Register model with Hamiltonian sum_lk H_lk s_l^+ s_k and jumps sqrt(gamma_l) s_l.

    ``H`` and ``gammas`` must be written in the decay basis (the basis where
    the anti-Hermitian part of H_eff is diagonal).
    """
    H = as_square(H, "H")
    n = H.shape[0]
    _check_modes(n)
    gammas = np.asarray(gammas, dtype=float).reshape(-1)
    if gammas.shape[0] != n:
        raise ValueError(f"{gammas.shape[0]} rates for {n} modes")
    if np.any(gammas < 0):
        raise ValueError("rates must be non-negative")
    sig = [lowering(l, n) for l in range(1, n + 1)]
    dim = 2**n
    Hhat = np.zeros((dim, dim), dtype=complex)
    for l in range(n):
        sl_dag = sig[l].conj().T
        for k in range(n):
            if H[l, k] != 0:
                Hhat += H[l, k] * (sl_dag @ sig[k])
    jumps = tuple(np.sqrt(g) * s for g, s in zip(gammas, sig) if g >= RATE_CUTOFF)
    return LindbladModel(Hhat, jumps)


def partial_trace_tensor(ts: TensorState, modes: Iterable[int]) -> TensorState:
    """Generic partial trace over the factors carrying the given mode labels."""
    drop = set(int(m) for m in modes)
    unknown = drop - set(ts.labels)
    if 0 in drop:
        raise ValueError("label 0 is the vacuum, not a tensor factor")
    if unknown:
        raise IndexError(f"no tensor factor labelled {sorted(unknown)}")
    n = ts.n_modes
    lead = ts.rho.shape[:-2]
    nb = len(lead)
    t = ts.rho.reshape(lead + (2,) * (2 * n))
    keep = [i for i, lab in enumerate(ts.labels) if lab not in drop]
    # trace the highest positions first so remaining axis numbers stay valid
    for pos in sorted((i for i, lab in enumerate(ts.labels) if lab in drop), reverse=True):
        cur = t.ndim - nb
        half = cur // 2
        t = np.trace(t, axis1=nb + pos, axis2=nb + half + pos)
    m = len(keep)
    return TensorState(t.reshape(lead + (2**m, 2**m)), tuple(ts.labels[i] for i in keep))


def index_trace_formula(rho, indices: Iterable[int]) -> TensorState:
    """Closed form of the partial trace of an embedded one-particle state.

    Keeps rho_lk for the kept levels and adds rho_00 + sum_{l in I} rho_ll
    to the vacuum, then re-embeds on the kept modes.
    """
    a = np.asarray(rho, dtype=complex)
    n = a.shape[-1] - 1
    check_index_set(indices, n)
    red = partial_trace_over_indices(a, indices)
    labels = tuple(old for old in red.kept if old != 0)
    return embed_one_particle(red.rho, labels)
