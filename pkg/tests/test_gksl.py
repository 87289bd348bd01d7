import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pseudomode_gksl.gksl import (
    LindbladModel,
    Trajectory,
    build_gksl_from_heff,
    jump,
    liouvillian_matrix,
    propagate,
)
from pseudomode_gksl.nonhermitian import evolve_R
from pseudomode_gksl.quantum_core import (
    DimensionError,
    InvalidStateError,
    Tolerances,
    normalization_reconstruction,
    outer,
    reconstruct_stack,
    validate_density_matrix,
)
from pseudomode_gksl.scenarios import ResonanceParams, interaction_heff, resonance_amplitudes
from randmodels import rand_hermitian, rand_heff, rand_R

seeds = st.integers(0, 2**32 - 1)


def test_hermitian_heff_gives_no_jumps():
    rng = np.random.default_rng(0)
    H = rand_hermitian(rng, 3)
    m = build_gksl_from_heff(H)
    assert m.jumps == ()
    assert np.allclose(m.H[1:, 1:], H) and np.allclose(m.H[0], 0)


def test_scalar_decay_model():
    g = 0.9
    m = build_gksl_from_heff(np.array([[-0.5j * g]]))
    assert m.dim == 2 and len(m.jumps) == 1
    assert np.allclose(np.abs(m.jumps[0]), np.sqrt(g) * np.abs(outer(0, 1, 2)))


def test_resonance_model_structure():
    g, gam = 0.5, 1.2
    m = build_gksl_from_heff(interaction_heff(ResonanceParams(g, gam)))
    H = np.zeros((3, 3))
    H[1, 2] = H[2, 1] = g
    assert np.allclose(m.H, H)
    assert len(m.jumps) == 1
    assert np.allclose(np.abs(m.jumps[0]), np.sqrt(gam) * outer(0, 2, 3).real)


def test_zero_liouvillian():
    assert np.allclose(liouvillian_matrix(LindbladModel(np.zeros((3, 3)))), 0)


def test_amplitude_damping_spectrum():
    g = 0.7
    L = liouvillian_matrix(LindbladModel(np.zeros((2, 2)), (jump(g, 0, 1, 2),)))
    ev = np.sort_complex(np.linalg.eigvals(L))
    assert np.allclose(ev, np.sort_complex(np.array([-g, -g / 2, -g / 2, 0])), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 5))
def test_trace_is_left_null_vector(seed, n):
    rng = np.random.default_rng(seed)
    m = build_gksl_from_heff(rand_heff(rng, n))
    d = m.dim
    tr_row = np.eye(d).reshape(-1)
    assert np.max(np.abs(tr_row @ liouvillian_matrix(m))) < 1e-12


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(2, 4))
def test_liouvillian_matches_rhs(seed, d):
    rng = np.random.default_rng(seed)
    H = rand_hermitian(rng, d)
    Ls = tuple(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for _ in range(2))
    m = LindbladModel(H, Ls)
    rho = rand_R(rng, d, trace=1.0)
    assert np.allclose((liouvillian_matrix(m) @ rho.reshape(-1)).reshape(d, d), m.rhs(rho))


def test_model_validation():
    with pytest.raises(ValueError):
        LindbladModel(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        LindbladModel(np.eye(2), (np.eye(3),))


def test_diagonal_hamiltonian_freezes_populations():
    m = LindbladModel(np.diag([0.0, 1.0, 2.5]))
    rho0 = normalization_reconstruction(rand_R(np.random.default_rng(4), 2))
    tr = propagate(m, rho0, np.linspace(0, 5, 11))
    pops = np.real(np.diagonal(tr.states, axis1=1, axis2=2))
    assert np.allclose(pops, pops[0])


def test_resonance_population_via_propagation():
    p = ResonanceParams(0.8, 0.9)
    t = np.linspace(0, 12, 121)
    m = build_gksl_from_heff(interaction_heff(p))
    tr = propagate(m, normalization_reconstruction(np.diag([1.0, 0.0])), t)
    psi1, _ = resonance_amplitudes(p, t)
    assert np.max(np.abs(tr.element(1, 1) - np.abs(psi1) ** 2)) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 6))
def test_equivalence_with_reconstructed_nonhermitian(seed, n):
    rng = np.random.default_rng(seed)
    heff = rand_heff(rng, n)
    R0 = rand_R(rng, n)
    t = np.linspace(0, 4, 40)
    traj = propagate(build_gksl_from_heff(heff), normalization_reconstruction(R0), t)
    ref = reconstruct_stack(evolve_R(heff, R0, t))
    assert np.max(np.abs(traj.states - ref)) <= 1e-9


def test_methods_agree():
    rng = np.random.default_rng(5)
    heff = rand_heff(rng, 3)
    rho0 = normalization_reconstruction(rand_R(rng, 3))
    m = build_gksl_from_heff(heff)
    t = np.linspace(0, 3, 16)
    a = propagate(m, rho0, t, method="expm")
    b = propagate(m, rho0, t, method="rk")
    c = propagate(m, rho0, np.array([0.0, 0.1, 0.5, 3.0]))
    assert a.meta["solver"] == "expm-step" and b.meta["solver"] == "rk-dop853"
    assert c.meta["solver"] == "expm"
    assert np.max(np.abs(a.states - b.states)) < 1e-9
    assert np.allclose(c.states[-1], a.states[-1], atol=1e-12)
    with pytest.raises(ValueError):
        propagate(m, rho0, t, method="euler")


def test_propagate_rejects_bad_initial_state():
    m = LindbladModel(np.zeros((2, 2)))
    with pytest.raises(InvalidStateError):
        propagate(m, np.diag([0.5, 0.2]), [0.0, 1.0])
    with pytest.raises(DimensionError):
        propagate(m, np.eye(3) / 3, [0.0, 1.0])


def test_late_states_are_valid_at_tight_psd():
    rng = np.random.default_rng(6)
    heff = rand_heff(rng, 4)
    gmax = np.max(np.linalg.eigvalsh(-(heff - heff.conj().T) / 1j))
    traj = propagate(build_gksl_from_heff(heff), normalization_reconstruction(rand_R(rng, 4)), np.linspace(0, 10 / gmax, 50))
    tol = Tolerances(psd=1e-10)
    assert all(r.ok for r in traj.diagnostics(tol))


def test_trajectory_shape_check():
    with pytest.raises(ValueError):
        Trajectory(np.zeros(3), np.zeros((2, 2, 2)))
