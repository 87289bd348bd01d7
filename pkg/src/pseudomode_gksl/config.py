"""Flat JSON run configurations (one scenario per file), validated strictly."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .quantum_core import Tolerances, matrix_from_json

SCENARIOS = (
    "nonhermitian",
    "gksl-equivalence",
    "pseudomode",
    "friedrichs-convergence",
    "resonance",
    "van-hove-sweep",
    "finite-temp",
    "fmo",
)

COMMON_KEYS = {"scenario", "name", "t_max", "points", "tolerances", "out_dir", "elements", "sweep"}

# scenario -> (required keys, optional keys with defaults)
SCENARIO_KEYS: dict[str, tuple[set[str], dict[str, Any]]] = {
    "nonhermitian": ({"heff", "r0"}, {}),
    "gksl-equivalence": ({"heff", "r0"}, {}),
    "pseudomode": ({"omega1", "terms"}, {"psi1_0": 1.0, "psi_vac": 0.0, "volterra_target": 2.5e-7}),
    "friedrichs-convergence": ({"omega1", "terms"}, {"modes": [100, 200, 400, 800], "window": 40.0, "psi1_0": 1.0}),
    "resonance": ({"g", "gamma0"}, {"rho11": 1.0, "rho10": 0.0}),
    "van-hove-sweep": ({"g", "gamma0", "lambdas"}, {"rho11": 1.0, "rho10": 0.0, "n": 0.0}),
    "finite-temp": ({"g", "gamma0", "n"}, {"rho11": 1.0, "rho10": 0.0, "lambda": 1.0}),
    "fmo": ({"omega0", "beta_inv", "S", "gamma0_half"}, {}),
}

# scenarios that can run without a time grid
GRID_OPTIONAL = {"fmo"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    scenario: str
    name: str
    params: dict[str, Any]
    t_max: float | None = None
    points: int | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    out_dir: str | None = None
    elements: list[tuple[int, int]] | None = None
    sweep: dict[str, Any] | None = None
    raw: dict[str, Any] = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray | None:
        if self.t_max is None:
            return None
        return np.linspace(0.0, self.t_max, self.points)

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def with_param(self, key: str, value) -> "RunConfig":
        raw = dict(self.raw)
        raw.pop("sweep", None)
        raw[key] = value
        raw["name"] = f"{self.name}__{key}_{value}"
        return parse_config(raw)


def as_complex(v, what: str) -> complex:
    if isinstance(v, bool):
        raise ConfigError(f"{what}: expected a number or [re, im]")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        return complex(v[0], v[1])
    raise ConfigError(f"{what}: expected a number or [re, im], got {v!r}")


def as_float(v, what: str, *, positive: bool = False, nonneg: bool = False) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{what}: expected a number, got {v!r}")
    v = float(v)
    if not np.isfinite(v):
        raise ConfigError(f"{what}: must be finite")
    if positive and v <= 0:
        raise ConfigError(f"{what}: must be positive")
    if nonneg and v < 0:
        raise ConfigError(f"{what}: must be non-negative")
    return v


def _as_matrix(v, what: str) -> np.ndarray:
    try:
        return matrix_from_json(v)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{what}: {exc}") from exc


def _terms(v) -> list[tuple[complex, float, float]]:
    if not isinstance(v, list) or not v:
        raise ConfigError("terms: expected a non-empty list of [g, gamma, omega]")
    out = []
    for k, term in enumerate(v):
        if not isinstance(term, list) or len(term) != 3:
            raise ConfigError(f"terms[{k}]: expected [g, gamma, omega]")
        out.append((as_complex(term[0], f"terms[{k}].g"), as_float(term[1], f"terms[{k}].gamma", positive=True), as_float(term[2], f"terms[{k}].omega")))
    return out


def _check_params(scenario: str, p: dict[str, Any]) -> dict[str, Any]:
    out = dict(p)
    for key in ("heff", "r0"):
        if key in out:
            out[key] = _as_matrix(out[key], key)
    if "terms" in out:
        out["terms"] = _terms(out["terms"])
    for key in ("omega1", "window", "volterra_target"):
        if key in out:
            out[key] = as_float(out[key], key, positive=key != "omega1")
    for key in ("g", "n", "rho11"):
        if key in out:
            out[key] = as_float(out[key], key, nonneg=True)
    for key in ("gamma0", "lambda", "omega0", "beta_inv", "S", "gamma0_half"):
        if key in out:
            out[key] = as_float(out[key], key, positive=True)
    for key in ("rho10", "psi1_0", "psi_vac"):
        if key in out:
            out[key] = as_complex(out[key], key)
    if "lambdas" in out:
        lam = out["lambdas"]
        if not isinstance(lam, list) or not lam:
            raise ConfigError("lambdas: expected a non-empty list")
        out["lambdas"] = [as_float(x, "lambdas[]", positive=True) for x in lam]
    if "modes" in out:
        m = out["modes"]
        if not isinstance(m, list) or not m or not all(isinstance(x, int) and not isinstance(x, bool) and x >= 2 for x in m):
            raise ConfigError("modes: expected a non-empty list of integers >= 2")
    if "rho11" in out:
        r11, r10 = out["rho11"], out.get("rho10", 0j)
        if r11 > 1 or abs(r10) ** 2 > r11 * (1 - r11) + 1e-12:
            raise ConfigError("rho11/rho10 do not form a valid 2x2 density matrix")
    if scenario == "pseudomode" and abs(abs(out["psi1_0"]) ** 2 + abs(out["psi_vac"]) ** 2 - 1) > 1e-10:
        raise ConfigError("psi1_0 and psi_vac must be normalized")
    return out


def parse_config(raw: dict[str, Any]) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    scenario = raw.get("scenario")
    if scenario is None:
        raise ConfigError("missing required field 'scenario'")
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; expected one of {', '.join(SCENARIOS)}")
    required, optional = SCENARIO_KEYS[scenario]
    allowed = COMMON_KEYS | required | set(optional)
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) for scenario {scenario!r}: {', '.join(unknown)}")
    missing = sorted(required - set(raw))
    if scenario not in GRID_OPTIONAL:
        missing += [k for k in ("t_max", "points") if k not in raw]
    if missing:
        raise ConfigError(f"missing required field(s): {', '.join(missing)}")

    t_max = points = None
    if "t_max" in raw or "points" in raw:
        if not ("t_max" in raw and "points" in raw):
            raise ConfigError("t_max and points must be given together")
        t_max = as_float(raw["t_max"], "t_max", positive=True)
        points = raw["points"]
        if isinstance(points, bool) or not isinstance(points, int) or points < 2:
            raise ConfigError("points: expected an integer >= 2")

    tol = Tolerances()
    if "tolerances" in raw:
        tr = raw["tolerances"]
        if not isinstance(tr, dict):
            raise ConfigError("tolerances: expected an object")
        try:
            tol = tol.replace(**{k: as_float(v, f"tolerances.{k}", positive=True) for k, v in tr.items()})
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc

    elements = None
    if "elements" in raw:
        el = raw["elements"]
        if not isinstance(el, list) or not all(isinstance(e, list) and len(e) == 2 and all(isinstance(i, int) and i >= 0 for i in e) for e in el):
            raise ConfigError("elements: expected a list of [i, j] index pairs")
        elements = [tuple(e) for e in el]

    sweep = None
    if "sweep" in raw:
        sw = raw["sweep"]
        if not isinstance(sw, dict) or set(sw) != {"parameter", "values"}:
            raise ConfigError("sweep: expected {parameter, values}")
        if sw["parameter"] not in (required | set(optional)) or sw["parameter"] in ("heff", "r0", "terms"):
            raise ConfigError(f"sweep: {sw['parameter']!r} is not a sweepable parameter of {scenario!r}")
        if not isinstance(sw["values"], list) or not sw["values"]:
            raise ConfigError("sweep.values: expected a non-empty list")
        sweep = {"parameter": sw["parameter"], "values": list(sw["values"])}

    params = {k: raw[k] for k in raw if k in required or k in optional}
    for k, v in optional.items():
        params.setdefault(k, v)
    params = _check_params(scenario, params)

    name = raw.get("name", scenario)
    if not isinstance(name, str) or not name or "/" in name:
        raise ConfigError("name: expected a plain file stem")
    out_dir = raw.get("out_dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise ConfigError("out_dir: expected a string")
    return RunConfig(scenario, name, params, t_max, points, tol, out_dir, elements, sweep, dict(raw))


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError as exc:
        raise FileNotFoundError(f"config file not found: {path}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: JSON parse error: {exc.msg}") from exc
    try:
        return parse_config(raw)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
