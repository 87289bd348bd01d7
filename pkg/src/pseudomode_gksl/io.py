"""CSV/JSON serialization of trajectories and amplitude series, and trajectory comparison.

Trajectory CSV layout: ``t``, then ``rho_<i><j>_re`` / ``rho_<i><j>_im`` for
each requested element, then ``trace`` and ``min_eig``. Every float is
written with 17 significant digits so files round-trip bit for bit.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.integrate import trapezoid

from .gksl import Trajectory
from .quantum_core import matrix_from_json, matrix_to_json

FLOAT_FMT = "{:.17g}"


def _fmt(x: float) -> str:
    return FLOAT_FMT.format(float(x))


def element_name(i: int, j: int) -> str:
    sep = "" if max(i, j) < 10 else "_"
    return f"rho_{i}{sep}{j}"


def all_elements(dim: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(dim) for j in range(dim)]


def write_table(path, header: Sequence[str], rows: Iterable[Sequence[float]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) for x in r])
    return path


def read_table(path) -> tuple[list[str], np.ndarray]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty CSV")
    header = rows[0]
    data = np.array([[float(x) for x in r] for r in rows[1:]], dtype=float)
    if data.size == 0:
        data = data.reshape(0, len(header))
    if data.shape[1] != len(header):
        raise ValueError(f"{path}: ragged CSV")
    return header, data


def trajectory_rows(times, states, elements: Sequence[tuple[int, int]]):
    states = np.asarray(states, dtype=complex)
    min_eigs = np.linalg.eigvalsh(hermitian_part_stack(states))[:, 0]
    traces = np.trace(states, axis1=1, axis2=2).real
    for k, t in enumerate(times):
        row = [t]
        for i, j in elements:
            z = states[k, i, j]
            row += [z.real, z.imag]
        row += [traces[k], min_eigs[k]]
        yield row


def hermitian_part_stack(states: np.ndarray) -> np.ndarray:
    return 0.5 * (states + np.conj(np.swapaxes(states, -1, -2)))


def write_trajectory_csv(path, times, states, elements: Sequence[tuple[int, int]] | None = None) -> Path:
    states = np.asarray(states, dtype=complex)
    if elements is None:
        elements = all_elements(states.shape[-1])
    header = ["t"]
    for i, j in elements:
        header += [element_name(i, j) + "_re", element_name(i, j) + "_im"]
    header += ["trace", "min_eig"]
    return write_table(path, header, trajectory_rows(times, states, elements))


def write_amplitude_csv(path, times, psi) -> Path:
    psi = np.asarray(psi, dtype=complex)
    rows = ((t, z.real, z.imag, abs(z) ** 2) for t, z in zip(times, psi))
    return write_table(path, ["t", "psi_re", "psi_im", "psi_abs2"], rows)


def trajectory_to_json(traj: Trajectory) -> dict:
    return {
        "times": [float(t) for t in traj.times],
        "states": [matrix_to_json(s) for s in traj.states],
        "meta": traj.meta,
    }


def trajectory_from_json(obj: dict) -> Trajectory:
    return Trajectory(
        np.asarray(obj["times"], dtype=float),
        np.array([matrix_from_json(s) for s in obj["states"]]),
        dict(obj.get("meta", {})),
    )


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")
    return path


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


# ---------------------------------------------------------------------------
# comparison
# ---------------------------------------------------------------------------

DIAGNOSTIC_COLUMNS = ("trace", "min_eig")


class GridMismatch(ValueError):
    pass


def compare_tables(a: tuple[list[str], np.ndarray], b: tuple[list[str], np.ndarray], columns: Sequence[str] | None = None, grid_atol: float = 1e-12) -> dict:
    """Sup-norm and L2 distance over shared value columns of two tables on the same grid.

    L2 is the trapezoidal integral over the first column (the grid) of the
    squared pointwise max-column deviation, square-rooted.
    """
    ha, da = a
    hb, db = b
    if da.shape[0] != db.shape[0] or not np.allclose(da[:, 0], db[:, 0], rtol=0, atol=grid_atol):
        raise GridMismatch("trajectories are not on the same grid")
    if columns is None:
        columns = [c for c in ha[1:] if c in hb and c not in DIAGNOSTIC_COLUMNS]
    missing = [c for c in columns if c not in ha or c not in hb]
    if missing:
        raise KeyError(f"columns missing from an input: {missing}")
    if not columns:
        raise ValueError("no shared value columns to compare")
    diff = np.abs(np.stack([da[:, ha.index(c)] - db[:, hb.index(c)] for c in columns], axis=1))
    per_col = {c: float(np.max(diff[:, k])) if len(diff) else 0.0 for k, c in enumerate(columns)}
    pointwise = np.max(diff, axis=1) if len(diff) else np.zeros(0)
    grid = da[:, 0]
    l2 = float(np.sqrt(trapezoid(pointwise**2, grid))) if len(grid) > 1 else float(pointwise.max(initial=0.0))
    return {
        "columns": list(columns),
        "points": int(len(grid)),
        "sup": float(pointwise.max(initial=0.0)),
        "l2": l2,
        "per_column_sup": per_col,
    }


def compare(path_a, path_b, columns: Sequence[str] | None = None) -> dict:
    rep = compare_tables(read_table(path_a), read_table(path_b), columns)
    rep["a"] = str(path_a)
    rep["b"] = str(path_b)
    return rep
