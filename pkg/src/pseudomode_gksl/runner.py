"""Scenario execution: turns a RunConfig into CSV/JSON files plus invariant checks."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .config import RunConfig
from .gksl import build_gksl_from_heff, propagate
from .io import write_amplitude_csv, write_json, write_table, write_trajectory_csv
from .nonhermitian import decompose_heff, evolve_R, trace_decay_rate
from .pseudomode import (
    PseudomodeParams,
    build_pseudomode_heff,
    choose_volterra_step,
    discretize_bath,
    evolve_friedrichs,
    pseudomode_psi1,
    reduced_density_matrix,
)
from .quantum_core import Tolerances, reconstruct_stack, matrix_to_json, normalization_reconstruction, partial_trace_over_indices, validate_density_matrix
from .scenarios import (
    FiniteTempParams,
    FMOParams,
    ResonanceParams,
    finite_temp_generator,
    finite_temp_limit_errors,
    finite_temp_markov_rho,
    fmo_derive,
    resonance_model,
    resonance_rho_s,
    traced_propagation,
    van_hove_errors,
    van_hove_rescale,
    wavenumber_to_rate,
)

log = logging.getLogger(__name__)

EQUIVALENCE_TOL = 1e-9
VOLTERRA_TOL = 1e-6
NORM_TOL = 1e-12


@dataclass
class Check:
    name: str
    value: float
    limit: float
    passed: bool

    def as_dict(self) -> dict:
        return {"value": self.value, "limit": self.limit, "pass": self.passed}


@dataclass
class ScenarioResult:
    summary: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    # file suffix -> writer(path)
    outputs: dict[str, Callable[[Path], Path]] = field(default_factory=dict)
    solver: str = ""

    def check_le(self, name: str, value: float, limit: float) -> None:
        self.checks.append(Check(name, float(value), float(limit), bool(value <= limit)))

    def check_true(self, name: str, ok: bool) -> None:
        self.checks.append(Check(name, float(bool(ok)), 1.0, bool(ok)))

    def check_states(self, name: str, states, tol: Tolerances, *, normalized: bool = True) -> None:
        reps = [validate_density_matrix(s, tol, normalized=normalized) for s in np.asarray(states)]
        self.summary.setdefault("diagnostics", {})[name] = {
            "max_herm_defect": max(r.herm_defect for r in reps),
            "min_eig": min(r.min_eig for r in reps),
            "max_trace_dev": max(r.trace_dev for r in reps),
        }
        self.check_true(f"{name}: valid states ({len(reps)} rows)", all(r.ok for r in reps))


def _traj_writer(times, states, elements):
    return lambda path: write_trajectory_csv(path, times, states, elements)


def _elements(cfg: RunConfig, dim: int):
    if cfg.elements is None:
        return None
    for i, j in cfg.elements:
        if i >= dim or j >= dim:
            raise ValueError(f"requested element ({i}, {j}) outside a {dim}x{dim} state")
    return cfg.elements


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------


def _nonhermitian(cfg: RunConfig) -> ScenarioResult:
    p, tol, t = cfg.params, cfg.tolerances, cfg.times
    dec = decompose_heff(p["heff"], tol)
    R = evolve_R(p["heff"], p["r0"], t, tol)
    traces = np.trace(R, axis1=1, axis2=2).real
    res = ScenarioResult(solver="expm per time point")
    res.summary.update(
        gammas=dec.gammas.tolist(),
        hermitian_part=matrix_to_json(dec.H),
        initial_trace=float(traces[0]),
        final_trace=float(traces[-1]),
        initial_decay_rate=trace_decay_rate(R[0], dec),
    )
    res.check_states("R(t)", R, tol, normalized=False)
    res.check_le("trace non-increasing (max step increase)", float(np.max(np.diff(traces), initial=0.0)), tol.tr)
    res.outputs[".csv"] = _traj_writer(t, R, _elements(cfg, R.shape[-1]))
    return res


def _gksl_equivalence(cfg: RunConfig) -> ScenarioResult:
    p, tol, t = cfg.params, cfg.tolerances, cfg.times
    model = build_gksl_from_heff(p["heff"], tol)
    traj = propagate(model, normalization_reconstruction(p["r0"], tol), t, tol)
    ref = reconstruct_stack(evolve_R(p["heff"], p["r0"], t, tol))
    err = float(np.max(np.abs(traj.states - ref)))
    res = ScenarioResult(solver=traj.meta["solver"])
    res.summary.update(dim=model.dim, jumps=len(model.jumps), sup_error_vs_reconstruction=err)
    res.check_states("rho(t)", traj.states, tol)
    res.check_le("GKSL vs reconstructed non-Hermitian evolution", err, EQUIVALENCE_TOL)
    res.outputs[".csv"] = _traj_writer(t, traj.states, _elements(cfg, model.dim))
    return res


def _pm_params(p: dict) -> PseudomodeParams:
    return PseudomodeParams.from_terms(p["omega1"], p["terms"])


def _pseudomode(cfg: RunConfig) -> ScenarioResult:
    p, tol, t = cfg.params, cfg.tolerances, cfg.times
    pm = _pm_params(p)
    heff = build_pseudomode_heff(pm, tol)
    psi1 = pseudomode_psi1(pm, t, p["psi1_0"])

    model = build_gksl_from_heff(heff, tol)
    v = np.zeros(model.dim, dtype=complex)
    v[0], v[1] = p["psi_vac"], p["psi1_0"]
    traj = propagate(model, np.outer(v, v.conj()), t, tol)
    rho_s = partial_trace_over_indices(traj.states, range(2, model.dim)).rho
    formula = reduced_density_matrix(p["psi_vac"], p["psi1_0"], psi1)
    trace_err = float(np.max(np.abs(rho_s - formula)))

    vol = choose_volterra_step(pm, cfg.t_max, p["volterra_target"], psi1_0=p["psi1_0"])
    vol_err = float(np.max(np.abs(vol.psi - pseudomode_psi1(pm, vol.times, p["psi1_0"]))))

    res = ScenarioResult(solver=traj.meta["solver"])
    res.summary.update(
        pseudomodes=pm.n,
        volterra_sup_error=vol_err,
        volterra_order=vol.order,
        volterra_step=vol.steps[-1],
        volterra_error_estimate=vol.error_estimate,
        reduced_state_vs_formula=trace_err,
        final_excited_population=float(abs(psi1[-1]) ** 2),
    )
    res.check_states("rho(t)", traj.states, tol)
    res.check_states("rho_S(t)", rho_s, tol)
    res.check_le("traced GKSL vs amplitude formula", trace_err, EQUIVALENCE_TOL)
    res.check_le("pseudomode vs Volterra", vol_err, VOLTERRA_TOL)
    res.check_le("Volterra order |p - 2|", abs(vol.order - 2.0), 0.2)
    res.check_le("|psi_1(t)| - |psi_1(0)|", float(np.max(np.abs(psi1)) - abs(p["psi1_0"])), 1e-12)
    res.outputs[".csv"] = _traj_writer(t, rho_s, _elements(cfg, 2))
    res.outputs["_amplitude.csv"] = lambda path: write_amplitude_csv(path, t, psi1)
    return res


def _friedrichs(cfg: RunConfig) -> ScenarioResult:
    p, t = cfg.params, cfg.times
    pm = _pm_params(p)
    ref = pseudomode_psi1(pm, t, p["psi1_0"])
    cols, errs, amp_errs, norm_errs = [], [], [], []
    for N in p["modes"]:
        bath = discretize_bath(pm, N, p["window"])
        full = evolve_friedrichs(bath, pm.omega1, p["psi1_0"], t, full=True)
        psi = full[:, 0]
        norm_errs.append(float(np.max(np.abs(np.linalg.norm(full, axis=1) - abs(p["psi1_0"])))))
        errs.append(float(np.max(np.abs(np.abs(psi) ** 2 - np.abs(ref) ** 2))))
        amp_errs.append(float(np.max(np.abs(psi - ref))))
        cols.append(np.abs(psi) ** 2)
    res = ScenarioResult(solver="Hermitian eigendecomposition")
    res.summary.update(
        modes=p["modes"],
        window=p["window"],
        population_sup_errors=errs,
        amplitude_sup_errors=amp_errs,
        norm_errors=norm_errs,
        strictly_decreasing=bool(np.all(np.diff(errs) < 0)),
    )
    res.check_true("error strictly decreasing in N", res.summary["strictly_decreasing"])
    res.check_le("norm conservation", max(norm_errs), NORM_TOL)
    header = ["t", "pseudomode_abs2"] + [f"friedrichs_N{N}_abs2" for N in p["modes"]]
    rows = np.column_stack([t, np.abs(ref) ** 2] + cols)
    res.outputs[".csv"] = lambda path: write_table(path, header, rows)
    return res


def _resonance(cfg: RunConfig) -> ScenarioResult:
    p, tol, t = cfg.params, cfg.tolerances, cfg.times
    red, traj = traced_propagation(resonance_model(p["g"], p["gamma0"]), p["rho11"], p["rho10"], t, tol)
    closed = resonance_rho_s(p["g"], p["gamma0"], p["rho11"], p["rho10"], t)
    err = float(np.max(np.abs(red - closed)))
    rp = ResonanceParams.from_markov_rate(p["g"], p["gamma0"]) if p["g"] > 0 else None
    res = ScenarioResult(solver=traj.meta["solver"])
    res.summary.update(
        gamma=None if rp is None else rp.gamma,
        delta=None if rp is None else [rp.delta.real, rp.delta.imag],
        regime=None if rp is None else ("oscillatory" if rp.oscillatory else "relaxation"),
        sup_error_vs_closed_form=err,
    )
    res.check_states("rho(t)", traj.states, tol)
    res.check_states("rho_S(t)", red, tol)
    res.check_le("propagated vs closed form", err, EQUIVALENCE_TOL)
    res.outputs[".csv"] = _traj_writer(t, red, _elements(cfg, 2))
    return res


def _van_hove(cfg: RunConfig) -> ScenarioResult:
    p, t = cfg.params, cfg.times
    lams = p["lambdas"]
    if p["n"] == 0:
        errs = van_hove_errors(p["g"], p["gamma0"], p["rho11"], p["rho10"], lams, t)
    else:
        errs = finite_temp_limit_errors(p["g"], p["gamma0"], p["n"], p["rho11"], p["rho10"], lams, t)
    order = np.argsort(lams)[::-1]
    sorted_errs = np.asarray(errs)[order]
    mono = bool(np.all(np.diff(sorted_errs) < 0))
    res = ScenarioResult(solver="closed form" if p["n"] == 0 else "expm-step + index trace")
    res.summary.update(lambdas=lams, errors=errs, monotone=mono)
    res.check_true("error decreases with lambda", mono)
    rows = [(lam, e) for lam, e in zip(lams, errs)]
    res.outputs[".csv"] = lambda path: write_table(path, ["lambda", "sup_error"], rows)
    return res


def _finite_temp(cfg: RunConfig) -> ScenarioResult:
    p, tol, t = cfg.params, cfg.tolerances, cfg.times
    ts, gs, g0s = van_hove_rescale(p["lambda"], t, p["g"], p["gamma0"])
    red, traj = traced_propagation(finite_temp_generator(FiniteTempParams(gs, g0s, p["n"])), p["rho11"], p["rho10"], ts, tol)
    markov = finite_temp_markov_rho(p["gamma0"], p["n"], p["rho11"], p["rho10"], t)
    n = p["n"]
    res = ScenarioResult(solver=traj.meta["solver"])
    res.summary.update(
        sup_distance_to_markov=float(np.max(np.abs(red - markov))),
        stationary_markov=[(1 + n) / (1 + 2 * n), n / (1 + 2 * n)],
        final_rho11=float(red[-1, 1, 1].real),
    )
    res.check_states("rho(t)", traj.states, tol)
    res.check_states("rho_S(t)", red, tol)
    res.outputs[".csv"] = _traj_writer(t, red, _elements(cfg, 2))
    return res


def _fmo(cfg: RunConfig) -> ScenarioResult:
    p = cfg.params
    rep = fmo_derive(FMOParams(p["omega0"], p["beta_inv"], p["S"], p["gamma0_half"]))
    res = ScenarioResult(solver="closed form")
    res.summary.update(rep)
    if cfg.times is not None:
        t = cfg.times  # ps
        g_ps = wavenumber_to_rate(rep["g_cm"])
        g0_ps = wavenumber_to_rate(rep["gamma0_cm"])
        rho = resonance_rho_s(g_ps, g0_ps, 1.0, 0.0, t)
        res.check_states("rho_S(t)", rho, cfg.tolerances)
        res.outputs[".csv"] = _traj_writer(t, rho, _elements(cfg, 2))
    return res


SCENARIO_RUNNERS: dict[str, Callable[[RunConfig], ScenarioResult]] = {
    "nonhermitian": _nonhermitian,
    "gksl-equivalence": _gksl_equivalence,
    "pseudomode": _pseudomode,
    "friedrichs-convergence": _friedrichs,
    "resonance": _resonance,
    "van-hove-sweep": _van_hove,
    "finite-temp": _finite_temp,
    "fmo": _fmo,
}


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


@dataclass
class RunOutcome:
    name: str
    files: list[str]
    checks_passed: bool
    summary: dict


def run_one(cfg: RunConfig, out_dir: Path) -> RunOutcome:
    res = SCENARIO_RUNNERS[cfg.scenario](cfg)
    files = []
    for suffix, writer in res.outputs.items():
        files.append(str(writer(out_dir / f"{cfg.name}{suffix}")))
    doc = {
        "scenario": cfg.scenario,
        "name": cfg.name,
        "version": __version__,
        "config_hash": cfg.config_hash,
        "solver": res.solver,
        "tolerances": {"herm": cfg.tolerances.herm, "tr": cfg.tolerances.tr, "psd": cfg.tolerances.psd},
        "summary": res.summary,
        "checks": {c.name: c.as_dict() for c in res.checks},
        "files": [Path(f).name for f in files],
    }
    files.append(str(write_json(out_dir / f"{cfg.name}.json", doc)))
    ok = all(c.passed for c in res.checks)
    for c in res.checks:
        log.info("%s %-50s %.3e (limit %.1e)", "PASS" if c.passed else "FAIL", c.name, c.value, c.limit)
    return RunOutcome(cfg.name, files, ok, doc)


def run(cfg: RunConfig, out_dir=None, *, max_workers: int | None = None) -> list[RunOutcome]:
    """Run a config (and its sweep entries, concurrently) and write outputs.

    Each sweep entry writes to its own files; a ``<name>_sweep.json`` index
    collects the entry summaries.
    """
    out = Path(out_dir or cfg.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    if cfg.sweep is None:
        return [run_one(cfg, out)]
    key = cfg.sweep["parameter"]
    entries = [cfg.with_param(key, v) for v in cfg.sweep["values"]]
    for e in entries:
        e.tolerances = cfg.tolerances
    with ThreadPoolExecutor(max_workers=max_workers) as ex:
        outcomes = list(ex.map(lambda c: run_one(c, out), entries))
    write_json(
        out / f"{cfg.name}_sweep.json",
        {
            "parameter": key,
            "values": cfg.sweep["values"],
            "entries": [{"name": o.name, "checks_passed": o.checks_passed, "summary": o.summary["summary"]} for o in outcomes],
        },
    )
    return outcomes
