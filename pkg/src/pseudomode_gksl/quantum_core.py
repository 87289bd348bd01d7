"""Dense matrix utilities shared by every solver in the package.

Basis convention: the vacuum level |0> always sits at row/column 0. A matrix
on n "physical" levels becomes (n+1)x(n+1) once the vacuum is appended, and
the original indices shift to 1..n.

Superoperators act on row-major vectorized matrices, ``vec(rho) =
rho.reshape(-1)``, so that ``vec(A @ rho @ B) = kron(A, B.T) @ vec(rho)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np


class DimensionError(ValueError):
    pass


class InvalidStateError(ValueError):
    """Raised when a matrix violates the density-matrix invariants."""


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-10
    tr: float = 1e-10
    psd: float = 1e-9

    def replace(self, **kw) -> "Tolerances":
        bad = set(kw) - {"herm", "tr", "psd"}
        if bad:
            raise KeyError(f"unknown tolerance(s): {sorted(bad)}")
        vals = {"herm": self.herm, "tr": self.tr, "psd": self.psd}
        vals.update({k: float(v) for k, v in kw.items()})
        return Tolerances(**vals)


DEFAULT_TOL = Tolerances()


def as_square(m, name: str = "matrix") -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def ket(i: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[i] = 1.0
    return v


def projector(i: int, dim: int) -> np.ndarray:
    return outer(i, i, dim)


def outer(i: int, j: int, dim: int) -> np.ndarray:
    """Matrix unit |i><j|."""
    m = np.zeros((dim, dim), dtype=complex)
    m[i, j] = 1.0
    return m


def direct_sum_vacuum(m: np.ndarray) -> np.ndarray:
    """Return 0 (+) m: a zero vacuum row/column prepended at index 0."""
    n = m.shape[-1]
    out = np.zeros(m.shape[:-2] + (n + 1, n + 1), dtype=complex)
    out[..., 1:, 1:] = m
    return out


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DensityReport:
    herm_defect: float
    min_eig: float
    trace: complex
    trace_dev: float
    ok_herm: bool
    ok_psd: bool
    ok_trace: bool

    @property
    def ok(self) -> bool:
        return self.ok_herm and self.ok_psd and self.ok_trace

    def failures(self) -> list[str]:
        out = []
        if not self.ok_herm:
            out.append(f"hermiticity defect {self.herm_defect:.3e}")
        if not self.ok_psd:
            out.append(f"min eigenvalue {self.min_eig:.3e}")
        if not self.ok_trace:
            out.append(f"trace {self.trace:.12g}")
        return out


def validate_density_matrix(rho, tol: Tolerances = DEFAULT_TOL, *, normalized: bool = True) -> DensityReport:
    """Diagnose Hermiticity, positivity and trace of ``rho``.

    With ``normalized=False`` the trace condition becomes 0 <= Tr <= 1 (a
    non-normalized density matrix); otherwise |Tr - 1| <= tol.tr. Never raises
    on bad input; malformed shapes give a failing report with NaN fields.
    """
    a = np.asarray(rho, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.size == 0 or not np.all(np.isfinite(a)):
        nan = float("nan")
        return DensityReport(nan, nan, complex(nan), nan, False, False, False)
    herm_defect = float(np.max(np.abs(a - a.conj().T)))
    min_eig = float(np.linalg.eigvalsh(hermitian_part(a))[0])
    tr = complex(np.trace(a))
    if normalized:
        trace_dev = abs(tr - 1.0)
        ok_trace = trace_dev <= tol.tr
    else:
        trace_dev = max(0.0, tr.real - 1.0, -tr.real) + abs(tr.imag)
        ok_trace = trace_dev <= tol.tr
    return DensityReport(
        herm_defect=herm_defect,
        min_eig=min_eig,
        trace=tr,
        trace_dev=float(trace_dev),
        ok_herm=herm_defect <= tol.herm,
        ok_psd=min_eig >= -tol.psd,
        ok_trace=bool(ok_trace),
    )


def require_state(rho, tol: Tolerances = DEFAULT_TOL, *, normalized: bool = True, name: str = "rho") -> np.ndarray:
    a = as_square(rho, name)
    rep = validate_density_matrix(a, tol, normalized=normalized)
    if not rep.ok:
        raise InvalidStateError(f"{name} is not a valid state: " + "; ".join(rep.failures()))
    return a


# ---------------------------------------------------------------------------
# normalization reconstruction
# ---------------------------------------------------------------------------


def normalization_reconstruction(R, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Map a non-normalized density matrix R (n x n) to a state on n+1 levels.

    rho = 0 (+) R + (1 - Tr R)|0><0|, with the missing weight parked on the
    vacuum at index 0. The trace of the result is 1 by construction.
    """
    R = require_state(R, tol, normalized=False, name="R")
    return reconstruct_stack(R)


def reconstruct_stack(R: np.ndarray) -> np.ndarray:
    # no validation; also accepts a stack (..., n, n)
    rho = direct_sum_vacuum(R)
    tr = np.trace(R, axis1=-2, axis2=-1).real
    rho[..., 0, 0] = 1.0 - tr
    return rho


# ---------------------------------------------------------------------------
# superoperators
# ---------------------------------------------------------------------------


class Superoperator:
    """A linear map on dim x dim matrices, stored as its dim^2 x dim^2 matrix."""

    __slots__ = ("matrix", "dim")

    def __init__(self, matrix: np.ndarray, dim: int):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (dim * dim, dim * dim):
            raise DimensionError(f"superoperator for dim {dim} must be {dim * dim}x{dim * dim}")
        self.matrix = matrix
        self.dim = dim

    def __call__(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        if rho.shape[-2:] != (self.dim, self.dim):
            raise DimensionError(f"expected {self.dim}x{self.dim} input, got {rho.shape}")
        flat = rho.reshape(rho.shape[:-2] + (self.dim * self.dim,))
        return (flat @ self.matrix.T).reshape(rho.shape)

    def _check(self, other: "Superoperator") -> None:
        if not isinstance(other, Superoperator) or other.dim != self.dim:
            raise DimensionError("superoperators must share a dimension")

    def __add__(self, other: "Superoperator") -> "Superoperator":
        self._check(other)
        return Superoperator(self.matrix + other.matrix, self.dim)

    def __sub__(self, other: "Superoperator") -> "Superoperator":
        self._check(other)
        return Superoperator(self.matrix - other.matrix, self.dim)

    def __mul__(self, c) -> "Superoperator":
        return Superoperator(complex(c) * self.matrix, self.dim)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Superoperator(dim={self.dim})"


def left_right(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Matrix of rho -> A rho B in the row-major convention."""
    return np.kron(A, B.T)


def commutator_superop(H: np.ndarray) -> np.ndarray:
    """Matrix of rho -> -i[H, rho]."""
    eye = np.eye(H.shape[0], dtype=complex)
    return -1j * (left_right(H, eye) - left_right(eye, H))


def lindblad_dissipator_superop(L: np.ndarray) -> np.ndarray:
    """Matrix of rho -> L rho L^+ - 1/2 {L^+ L, rho}."""
    eye = np.eye(L.shape[0], dtype=complex)
    LdL = L.conj().T @ L
    return left_right(L, L.conj().T) - 0.5 * left_right(LdL, eye) - 0.5 * left_right(eye, LdL)


def _check_index(i: int, dim: int) -> None:
    if not (0 <= i < dim):
        raise IndexError(f"index {i} out of range for dimension {dim}")


def dissipator_D(l: int, k: int, dim: int) -> Superoperator:
    """D_lk(rho) = |k><l| rho |l><k| - 1/2 |l><l| rho - 1/2 rho |l><l|.

    The jump moves population from level l to level k.
    """
    _check_index(l, dim)
    _check_index(k, dim)
    if l == k:
        raise ValueError("dissipator_D needs distinct levels")
    return Superoperator(lindblad_dissipator_superop(outer(k, l, dim)), dim)


def coherent_coupling_h(k: int, l: int, dim: int) -> Superoperator:
    """h_kl(rho) = -i[|k><l| + |l><k|, rho]."""
    _check_index(l, dim)
    _check_index(k, dim)
    if l == k:
        raise ValueError("coherent_coupling_h needs distinct levels")
    return Superoperator(commutator_superop(outer(k, l, dim) + outer(l, k, dim)), dim)


# ---------------------------------------------------------------------------
# trace over an index set
# ---------------------------------------------------------------------------


class IndexTrace(NamedTuple):
    rho: np.ndarray
    index_map: dict[int, int]  # old index -> new index, for kept levels

    @property
    def kept(self) -> list[int]:
        return sorted(self.index_map, key=self.index_map.__getitem__)


def check_index_set(indices: Iterable[int], n: int) -> tuple[int, ...]:
    idx = tuple(sorted({int(i) for i in indices}))
    if 0 in idx:
        raise ValueError("the vacuum index 0 can never be traced out")
    for i in idx:
        if not 1 <= i <= n:
            raise IndexError(f"index {i} outside 1..{n}")
    return idx


def partial_trace_over_indices(rho, indices: Iterable[int]) -> IndexTrace:
    """Trace an (n+1)-level matrix over a set of non-vacuum indices.

    Rows/columns in ``indices`` are removed and their populations are added
    to the vacuum population. The kept indices are renumbered in increasing
    order (vacuum stays at 0); ``index_map`` records old -> new. Works on a
    stack of matrices as well.
    """
    a = np.asarray(rho, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise DimensionError(f"expected square matrices, got shape {a.shape}")
    n = a.shape[-1] - 1
    drop = check_index_set(indices, n)
    kept = [i for i in range(n + 1) if i not in drop]
    out = a[..., kept, :][..., :, kept].copy()
    if drop:
        out[..., 0, 0] += np.sum(a[..., list(drop), list(drop)], axis=-1)
    return IndexTrace(out, {old: new for new, old in enumerate(kept)})


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def matrix_to_json(m) -> dict:
    a = as_square(m)
    return {
        "dim": int(a.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in a.reshape(-1)],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        dim = int(obj["dim"])
        entries = obj["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError("matrix JSON needs 'dim' and 'entries'") from exc
    if dim < 1 or len(entries) != dim * dim:
        raise ValueError(f"matrix JSON: expected {dim * dim} entries, got {len(entries)}")
    vals = np.empty(dim * dim, dtype=complex)
    for i, e in enumerate(entries):
        if isinstance(e, (int, float)):
            vals[i] = float(e)
        else:
            re, im = e
            vals[i] = complex(float(re), float(im))
    return vals.reshape(dim, dim)
