import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from pseudomode_gksl.gksl import build_gksl_from_heff, propagate
from pseudomode_gksl.nonhermitian import NotDissipative
from pseudomode_gksl.pseudomode import (
    PseudomodeParams,
    build_pseudomode_heff,
    choose_volterra_step,
    convolve_pseudomode_amplitudes,
    discretize_bath,
    evolve_friedrichs,
    memory_kernel,
    pseudomode_amplitudes,
    pseudomode_psi1,
    reduced_density_matrix,
    richardson_volterra,
    solve_volterra,
    spectral_density,
)
from pseudomode_gksl.quantum_core import partial_trace_over_indices
from pseudomode_gksl.scenarios import ResonanceParams, resonance_amplitudes
from randmodels import rand_lorentzians

seeds = st.integers(0, 2**32 - 1)


def single(g=0.5, gamma=1.0, omega=0.0, omega1=0.0):
    return PseudomodeParams.from_terms(omega1, [(g, gamma, omega)])


def test_params_validation():
    with pytest.raises(ValueError):
        PseudomodeParams.from_terms(0.0, [(0.5, 0.0, 0.0)])
    with pytest.raises(ValueError):
        PseudomodeParams.from_terms(0.0, [])
    with pytest.raises(ValueError):
        PseudomodeParams(0.0, [1.0, 2.0], [1.0], [0.0])


def test_kernel_at_zero():
    assert np.isclose(memory_kernel(single(0.7), 0.0), 0.49)
    with pytest.raises(ValueError):
        memory_kernel(single(), -1.0)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 4))
def test_kernel_envelope(seed, n):
    w1, terms = rand_lorentzians(np.random.default_rng(seed), n)
    p = PseudomodeParams.from_terms(w1, terms)
    t = np.linspace(0, 20, 200)
    bound = np.sum(np.abs(p.g) ** 2) * np.exp(-p.gamma.min() * t / 2)
    assert np.all(np.abs(memory_kernel(p, t)) <= bound + 1e-14)


@pytest.mark.parametrize("t", [0.0, 0.7, 2.5])
def test_kernel_is_fourier_transform_of_density(t):
    p = PseudomodeParams.from_terms(0.0, [(0.5, 1.0, 0.3), (0.3, 0.6, -0.8)])
    lo = min(p.omega - 40 * p.gamma)
    hi = max(p.omega + 40 * p.gamma)
    re = quad(lambda w: np.cos(w * t) * spectral_density(p, w), lo, hi, limit=400)[0]
    im = quad(lambda w: -np.sin(w * t) * spectral_density(p, w), lo, hi, limit=400)[0]
    G = memory_kernel(p, t)
    # the window cuts the Lorentzian tails, which carry ~1/(40 pi) of the weight
    assert abs((re + 1j * im) / (2 * np.pi) - G) / abs(G) <= 2e-2


def test_kernel_quadrature_with_full_tails():
    p = single(0.5, 1.0, 0.2)
    t = 1.3
    f = lambda w: spectral_density(p, w) / (2 * np.pi)
    # oscillatory integrals over the real line through quad's Fourier weights
    re = quad(f, 0, np.inf, weight="cos", wvar=t)[0] + quad(lambda w: f(-w), 0, np.inf, weight="cos", wvar=t)[0]
    im = -(quad(f, 0, np.inf, weight="sin", wvar=t)[0] - quad(lambda w: f(-w), 0, np.inf, weight="sin", wvar=t)[0])
    G = memory_kernel(p, t)
    assert abs(re + 1j * im - G) / abs(G) <= 1e-4


def test_spectral_density_values():
    p = single(0.5, 1.2, 0.3)
    assert np.isclose(spectral_density(p, 0.3), 4 * 0.25 / 1.2)
    assert spectral_density(p, 1e9) < 1e-15
    total = quad(lambda w: spectral_density(p, w), -np.inf, np.inf)[0] / (2 * np.pi)
    assert np.isclose(total, memory_kernel(p, 0.0).real, rtol=1e-8)
    with pytest.raises(ValueError):
        spectral_density(PseudomodeParams.from_terms(0, [(0.5j, 1.0, 0.0)]), 0.0)


def test_resonant_heff_is_two_level_form():
    g, gam = 0.4, 1.5
    H = build_pseudomode_heff(single(g, gam))
    assert np.allclose(H, [[0, g], [g, -0.5j * gam]])


def test_inadmissible_heff_is_rejected():
    # complex couplings are allowed, but a non-symmetric H_eff must still decay
    p = PseudomodeParams.from_terms(0.0, [(2.0 + 2.0j, 0.1, 0.0)])
    with pytest.raises(NotDissipative):
        build_pseudomode_heff(p)


def test_uncoupled_mode_freezes_system():
    p = PseudomodeParams.from_terms(0.3, [(0.0, 1.0, 0.0)])
    t = np.linspace(0, 5, 11)
    psi = pseudomode_psi1(p, t)
    assert np.allclose(np.abs(psi), 1.0)


def test_volterra_without_kernel():
    t = np.linspace(0, 4, 401)
    psi = solve_volterra(None, t, 0.8, omega1=0.6, kernel=lambda s: np.zeros_like(s, dtype=complex))
    assert np.max(np.abs(psi - 0.8 * np.exp(-0.6j * t))) < 1e-5
    with pytest.raises(ValueError):
        solve_volterra(None, t)


def test_volterra_grid_checks():
    with pytest.raises(ValueError):
        solve_volterra(single(), [0.0, 0.1, 0.3])
    with pytest.raises(ValueError):
        solve_volterra(single(), [0.1, 0.2])


def test_volterra_matches_resonance_closed_form():
    g, gam = 0.5, 1.0
    t = np.arange(0, 8001) * 1e-3 / gam
    psi = solve_volterra(single(g, gam), t)
    ref, _ = resonance_amplitudes(ResonanceParams(g, gam), t)
    assert np.max(np.abs(psi - ref)) <= 1e-6


def test_step_selection_meets_target():
    p = single(0.6, 1.2, 0.3, 0.1)
    r = choose_volterra_step(p, 8.0, target=1e-6, n_coarse=50)
    assert r.error_estimate <= 1e-6
    assert np.max(np.abs(pseudomode_psi1(p, r.times) - r.psi)) <= 2e-6


def test_richardson_order_is_two():
    r = richardson_volterra(single(0.6, 1.2, 0.3, 0.1), 8.0, 200)
    assert abs(r.order - 2) <= 0.2
    # extrapolation improves on the finest grid
    ref = pseudomode_psi1(single(0.6, 1.2, 0.3, 0.1), r.times)
    assert np.max(np.abs(r.extrapolated - ref)) < np.max(np.abs(r.psi - ref))


@settings(max_examples=5, deadline=None)
@given(seeds)
def test_heff_matches_volterra_three_terms(seed):
    w1, terms = rand_lorentzians(np.random.default_rng(seed), 3)
    p = PseudomodeParams.from_terms(w1, terms)
    t_max = 8 / p.gamma.min()
    r = richardson_volterra(p, t_max, 1000)
    assert abs(r.order - 2) <= 0.2
    assert np.max(np.abs(pseudomode_psi1(p, r.times) - r.extrapolated)) <= 1e-8


def test_convolution_reproduces_pseudomode_amplitudes():
    p = PseudomodeParams.from_terms(0.2, [(0.5, 1.0, 0.3), (0.3, 2.0, -0.5)])
    t = np.linspace(0, 6, 6001)
    amps = pseudomode_amplitudes(p, t)
    phi = convolve_pseudomode_amplitudes(p, t, amps[:, 0])
    assert np.max(np.abs(phi - amps[:, 1:])) < 1e-6


def test_friedrichs_mode_count_and_kernel():
    p = single()
    bath = discretize_bath(p, 400)
    assert bath.n_modes == 400
    assert np.isclose(np.sum(bath.g**2), memory_kernel(p, 0.0).real, rtol=2e-2)
    big = discretize_bath(p, 4000, K=400)
    assert abs(np.sum(big.g**2) - 0.25) < abs(np.sum(bath.g**2) - 0.25)


def test_friedrichs_two_modes_runs():
    bath = discretize_bath(single(), 2)
    psi = evolve_friedrichs(bath, 0.0, 1.0, np.linspace(0, 8, 9))
    assert psi.shape == (9,) and np.all(np.abs(psi) <= 1 + 1e-12)


def test_friedrichs_windows_split():
    p = PseudomodeParams.from_terms(0.0, [(0.3, 0.1, -10.0), (0.3, 0.1, 10.0)])
    bath = discretize_bath(p, 100, K=20)
    assert len(bath.windows) == 2 and bath.n_modes == 100


def test_friedrichs_uncoupled_and_norm():
    bath = discretize_bath(single(0.0), 50)
    t = np.linspace(0, 8, 17)
    assert np.allclose(np.abs(evolve_friedrichs(bath, 0.4, 1.0, t)), 1.0)
    full = evolve_friedrichs(discretize_bath(single(), 300), 0.0, 1.0, t, full=True)
    assert np.max(np.abs(np.linalg.norm(full, axis=1) - 1)) <= 1e-12


def test_friedrichs_n400_close_to_pseudomode():
    p = single()
    t = np.linspace(0, 8, 161)
    psi = evolve_friedrichs(discretize_bath(p, 400), 0.0, 1.0, t)
    assert np.max(np.abs(np.abs(psi) ** 2 - np.abs(pseudomode_psi1(p, t)) ** 2)) <= 2e-3


def test_friedrichs_error_decreases_with_modes():
    p = single()
    t = np.linspace(0, 8, 161)
    ref = np.abs(pseudomode_psi1(p, t)) ** 2
    errs = [np.max(np.abs(np.abs(evolve_friedrichs(discretize_bath(p, N), 0.0, 1.0, t)) ** 2 - ref)) for N in (100, 200, 400)]
    assert errs[0] > errs[1] > errs[2]


def test_reduced_state_trivial_cases():
    assert np.allclose(reduced_density_matrix(0.6, 0.8, 0.0), np.diag([1.0, 0.0]))
    assert np.allclose(reduced_density_matrix(0.0, 1.0, np.sqrt(0.3)), np.diag([0.7, 0.3]))
    with pytest.raises(ValueError):
        reduced_density_matrix(0.5, 0.5, 0.1)


def test_reduced_state_matches_traced_gksl():
    p = PseudomodeParams.from_terms(0.1, [(0.5, 1.0, 0.2), (0.4, 1.7, -0.6)])
    a, b = 0.6, 0.8j
    t = np.linspace(0, 8, 81)
    H = build_pseudomode_heff(p)
    model = build_gksl_from_heff(H)
    rho0 = np.zeros((4, 4), dtype=complex)
    psi = np.array([a, b, 0, 0])
    rho0[:] = np.outer(psi, psi.conj())
    traj = propagate(model, rho0, t)
    red = partial_trace_over_indices(traj.states, [2, 3]).rho
    ref = reduced_density_matrix(a, b, pseudomode_psi1(p, t, b))
    assert np.max(np.abs(red - ref)) < 1e-9
