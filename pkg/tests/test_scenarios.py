import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pseudomode_gksl.gksl import liouvillian_matrix, propagate
from pseudomode_gksl.nonhermitian import evolve_psi
from pseudomode_gksl.quantum_core import outer
from pseudomode_gksl.scenarios import (
    FiniteTempParams,
    FMOParams,
    ResonanceParams,
    embed_initial,
    finite_temp_generator,
    finite_temp_limit_errors,
    finite_temp_markov_rho,
    finite_temp_superop,
    fmo_derive,
    interaction_heff,
    markov_limit_rho,
    rate_to_wavenumber,
    resonance_amplitudes,
    resonance_generator,
    resonance_model,
    resonance_rho_s,
    strong_coupling_errors,
    strong_coupling_limit_rho,
    traced_propagation,
    van_hove_errors,
    van_hove_rescale,
    wavenumber_to_rate,
    wavenumber_to_time_ps,
)

T = np.linspace(0, 10, 401)


# --- resonance closed forms ------------------------------------------------


def test_amplitudes_at_zero_and_decoupled():
    a, b = resonance_amplitudes(ResonanceParams(0.7, 1.0), 0.0)
    assert np.isclose(a, 1) and np.isclose(b, 0)
    a, b = resonance_amplitudes(ResonanceParams(0.0, 1.0), T)
    assert np.allclose(a, 1) and np.allclose(b, 0)


@pytest.mark.parametrize("g,gamma", [(1.0, 1.0), (0.1, 2.0), (0.25, 1.0), (2.0, 0.3), (0.05, 5.0)])
def test_amplitudes_match_nonhermitian_evolution(g, gamma):
    p = ResonanceParams(g, gamma)
    a, b = resonance_amplitudes(p, T)
    psi = evolve_psi(interaction_heff(p), [1.0, 0.0], T)
    assert np.max(np.abs(psi[:, 0] - a)) <= 1e-10
    assert np.max(np.abs(psi[:, 1] - b)) <= 1e-10


def test_regime_flags():
    assert ResonanceParams(1.0, 1.0).oscillatory
    assert not ResonanceParams(0.1, 1.0).oscillatory
    assert np.isclose(ResonanceParams.from_markov_rate(1.0, 2.0).gamma0, 2.0)


@pytest.mark.parametrize("g", [0.3, 1.0, 4.0])
def test_continuity_across_critical_point(g):
    lo = ResonanceParams(g, np.sqrt(16 * g * g * (1 - 1e-8)))
    hi = ResonanceParams(g, np.sqrt(16 * g * g * (1 + 1e-8)))
    crit = ResonanceParams(g, 4 * g)
    t = np.linspace(0, 20 / g, 500)
    a_lo, _ = resonance_amplitudes(lo, t)
    a_hi, _ = resonance_amplitudes(hi, t)
    a_c, _ = resonance_amplitudes(crit, t)
    assert lo.oscillatory and not hi.oscillatory
    assert np.max(np.abs(a_lo - a_hi)) <= 1e-6
    assert np.max(np.abs(a_c - a_hi)) <= 1e-6


def test_long_times_do_not_overflow():
    with np.errstate(over="raise", invalid="raise"):
        a, _ = resonance_amplitudes(ResonanceParams(0.01, 100.0), np.array([0.0, 1e4, 1e6]))
    assert np.all(np.isfinite(a))


def test_rho_s_initial_and_excited_population():
    r = resonance_rho_s(0.8, 1.1, 0.7, 0.2 + 0.1j, 0.0)
    assert np.allclose(r, [[0.3, 0.2 - 0.1j], [0.2 + 0.1j, 0.7]])
    p = ResonanceParams.from_markov_rate(0.8, 1.1)
    a, _ = resonance_amplitudes(p, T)
    assert np.allclose(resonance_rho_s(0.8, 1.1, 1.0, 0.0, T)[:, 1, 1], np.abs(a) ** 2)


@pytest.mark.parametrize("g,g0,r11,r10", [(1.0, 1.0, 0.7, 0.3 + 0.2j), (0.3, 2.0, 1.0, 0.0), (0.5, 0.2, 0.5, -0.4j)])
def test_rho_s_matches_traced_propagation(g, g0, r11, r10):
    red, traj = traced_propagation(resonance_model(g, g0), r11, r10, T)
    assert np.max(np.abs(red - resonance_rho_s(g, g0, r11, r10, T))) <= 1e-9
    assert all(rep.ok for rep in traj.diagnostics())


def test_generator_two_ways():
    m = liouvillian_matrix(resonance_model(0.6, 1.3))
    assert np.allclose(m, resonance_generator(0.6, 1.3).matrix, atol=1e-14)


def test_markov_limit_endpoints():
    r0 = markov_limit_rho(1.0, 0.6, 0.2j, 0.0)
    assert np.allclose(r0, [[0.4, -0.2j], [0.2j, 0.6]])
    assert np.allclose(markov_limit_rho(1.0, 0.6, 0.2j, 60.0), outer(0, 0, 2), atol=1e-12)


def test_strong_coupling_form():
    assert np.allclose(strong_coupling_limit_rho(1.3, 0.0), outer(1, 1, 2))
    assert np.allclose(strong_coupling_limit_rho(1.3, np.pi / 2 / 1.3), outer(0, 0, 2), atol=1e-15)


def test_rescale_identity_and_composition():
    t, g, g0 = van_hove_rescale(1.0, T, 0.7, 1.2)
    assert np.array_equal(t, T) and g == 0.7 and g0 == 1.2
    rng = np.random.default_rng(0)
    for a, b in rng.uniform(0.1, 3.0, size=(10, 2)):
        t1, g1, h1 = van_hove_rescale(b, *van_hove_rescale(a, T, 0.7, 1.2))
        t2, g2, h2 = van_hove_rescale(a * b, T, 0.7, 1.2)
        assert np.allclose(t1, t2) and np.isclose(g1, g2) and np.isclose(h1, h2)
    _, g, g0 = van_hove_rescale(0.3, T, 0.7, 1.2)
    assert np.isclose(4 * g * g / g0, 4 * 0.7**2 / 1.2)
    with pytest.raises(ValueError):
        van_hove_rescale(0.0, T, 1.0)


def test_van_hove_sweep_monotone():
    errs = van_hove_errors(1.0, 1.0, 1.0, 0.0, [1.0, 0.5, 0.25, 0.1], T)
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_strong_coupling_sweep_monotone():
    errs = strong_coupling_errors(1.0, 1.0, [1.0, 4.0, 16.0], np.linspace(0, 10, 401))
    assert errs[0] > errs[1] > errs[2]


def test_invalid_initial_state_rejected():
    with pytest.raises(ValueError):
        resonance_rho_s(1.0, 1.0, 0.5, 0.6, T)
    with pytest.raises(ValueError):
        embed_initial(1.2, 0.0)


# --- finite temperature ----------------------------------------------------


def test_zero_occupation_is_zero_temperature_generator():
    a = liouvillian_matrix(finite_temp_generator(FiniteTempParams(0.7, 1.3, 0.0)))
    b = liouvillian_matrix(resonance_model(0.7, 1.3))
    assert np.max(np.abs(a - b)) <= 1e-12


def test_finite_temp_generator_two_ways():
    p = FiniteTempParams(0.7, 1.3, 0.4)
    assert np.allclose(liouvillian_matrix(finite_temp_generator(p)), finite_temp_superop(p).matrix, atol=1e-14)


def test_pumping_without_coupling():
    p = FiniteTempParams(0.0, 1.5, 0.4)
    t = np.linspace(0, 5, 51)
    traj = propagate(finite_temp_generator(p), outer(0, 0, 3), t)
    assert np.allclose(traj.element(1, 1).real, 1 - np.exp(-p.pump_rate * t), atol=1e-12)


def test_markov_form_endpoints():
    n = 0.5
    r = finite_temp_markov_rho(1.0, n, 0.6, 0.1, np.array([0.0, 80.0]))
    assert np.allclose(r[0], [[0.4, 0.1], [0.1, 0.6]])
    assert np.allclose(r[1], np.diag([(1 + n) / (1 + 2 * n), n / (1 + 2 * n)]))
    assert np.allclose(finite_temp_markov_rho(1.0, 0.0, 0.6, 0.1j, T), markov_limit_rho(1.0, 0.6, 0.1j, T))


def test_finite_temp_limit_sweep():
    errs = finite_temp_limit_errors(1.0, 1.0, 0.5, 0.7, 0.3 + 0.2j, [1.0, 0.3, 0.1], T)
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 0.02


def test_scaled_stationary_population():
    n, lam = 0.5, 0.1
    t = np.array([0.0, 30.0])
    ts, g, g0 = van_hove_rescale(lam, t, 1.0, 1.0)
    red, _ = traced_propagation(finite_temp_generator(FiniteTempParams(g, g0, n)), 1.0, 0.0, ts)
    assert abs(red[-1, 1, 1].real - n / (1 + 2 * n)) < 1e-2


# --- FMO dimer -------------------------------------------------------------


def test_unit_conversions():
    assert abs(1e3 * wavenumber_to_time_ps(133) - 250.7) < 0.2
    assert abs(wavenumber_to_time_ps(3.2) - 10.4) < 0.05
    assert wavenumber_to_rate(0.0) == 0.0 and wavenumber_to_time_ps(0.0) == np.inf
    assert np.isclose(rate_to_wavenumber(wavenumber_to_rate(77.0)), 77.0)
    with pytest.raises(ValueError):
        wavenumber_to_rate(-1.0)


def test_fmo_derived_numbers():
    r = fmo_derive(FMOParams())
    assert 0.015 <= r["n"] <= 0.03
    assert 28 <= r["g_cm"] <= 30
    assert 3.0 <= r["gamma_quarter_cm"] <= 3.3
    assert 10.0 <= r["coherence_lifetime_ps"] <= 11.0
    assert 28 <= r["abs_delta_cm"] <= 30
    assert r["regime"] == "oscillatory"
    assert abs(r["markov_coherence_time_fs"] - 250) <= 2


def test_fmo_rejects_nonpositive():
    with pytest.raises(ValueError):
        FMOParams(S=0.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(0.1, 3.0), st.floats(0, 1), st.floats(0, 1), st.floats(0, 2 * np.pi))
def test_closed_form_is_always_a_state(g, g0, r11, frac, phase):
    r10 = frac * np.sqrt(r11 * (1 - r11)) * np.exp(1j * phase)
    rho = resonance_rho_s(g, g0, r11, r10, np.linspace(0, 20, 60))
    assert np.all(np.linalg.eigvalsh(rho) >= -1e-12)
    assert np.allclose(np.trace(rho, axis1=1, axis2=2), 1)
