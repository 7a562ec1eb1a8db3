import numpy as np
import pytest
from _oracles import random_hermitian, taylor_expm

from probespec.evolution import (
    Circuit,
    Exact,
    Trotter,
    exact_propagator,
    interaction_exponential_circuit,
    method_from_name,
    run_protocol_step,
    trotter_plan,
    trotter_propagator,
)
from probespec.model import (
    ProbeParameters,
    SystemHamiltonian,
    build_excitation_operator,
    build_total_hamiltonian,
    prepare_initial_state,
    random_system,
)
from probespec.operators import expm_hermitian, hadamard_gate, identity, kron, kron_all, pauli


def small_model(n=2, seed=5, c=0.05, omega=1.0, tau=1.0):
    sys = random_system(n, seed, spectral_window=(0.25, 1.75), alpha=0.0)
    params = ProbeParameters(omega=omega, c=c, alpha=0.0, tau=tau)
    return build_total_hamiltonian(sys, params), params


def test_method_from_name():
    assert method_from_name("exact") == Exact()
    assert method_from_name("trotter", 32) == Trotter(slices=32)
    assert method_from_name("circuit", 16) == Circuit(slices=16)
    with pytest.raises(ValueError):
        method_from_name("adiabatic")
    with pytest.raises(ValueError):
        Trotter(slices=0)


def test_exact_propagator_zero_time_is_identity():
    model, _ = small_model()
    u = exact_propagator(model, 0.0)
    assert np.max(np.abs(u - identity(u.shape[0]))) <= 1e-12


def test_exact_propagator_matches_taylor_oracle():
    model, _ = small_model()
    u = exact_propagator(model, 1.0)
    assert np.max(np.abs(u - taylor_expm(model.total, 1.0))) <= 1e-9


def test_no_decay_without_coupling():
    model, params = small_model(c=0.0)
    state = run_protocol_step(model, params.tau, Exact())
    dim = state.shape[0]
    excited = float(np.sum(np.abs(state[dim // 2 :]) ** 2))
    assert abs(excited - 1.0) <= 1e-12


def test_trotter_factors_unitary_and_structured():
    model, params = small_model()
    plan = trotter_plan(model, params.tau, 16)
    assert plan.L == 16
    probe, register, interaction = plan.per_slice_factors
    for factor in plan.per_slice_factors:
        assert np.max(np.abs(factor.conj().T @ factor - identity(factor.shape[0]))) <= 1e-9
    # probe factor is a pure diagonal of two phase values
    assert np.max(np.abs(probe - np.diag(np.diag(probe)))) == 0.0
    dim = probe.shape[0]
    assert np.allclose(np.diag(probe)[: dim // 2], np.exp(1j * params.omega / 2 * params.tau / 16))
    assert np.allclose(np.diag(probe)[dim // 2 :], np.exp(-1j * params.omega / 2 * params.tau / 16))
    # register factor never mixes probe halves
    half = dim // 2
    assert np.max(np.abs(register[:half, half:])) == 0.0
    assert np.max(np.abs(register[half:, :half])) == 0.0


def test_single_slice_is_product_of_factors():
    model, params = small_model()
    plan = trotter_plan(model, params.tau, 1)
    probe, register, interaction = plan.per_slice_factors
    expected = probe @ register @ interaction
    assert np.max(np.abs(plan.slice_unitary() - expected)) == 0.0
    assert np.max(np.abs(trotter_propagator(model, params.tau, 1) - expected)) <= 1e-12


def test_zero_coupling_trotter_equals_exact():
    model, params = small_model(c=0.0)
    for L in (1, 8):
        diff = trotter_propagator(model, params.tau, L) - exact_propagator(model, params.tau)
        assert np.max(np.abs(diff)) <= 1e-12


def test_trotter_error_halves_and_is_monotone():
    model, params = small_model()
    exact = exact_propagator(model, params.tau)
    errors = [
        np.linalg.norm(trotter_propagator(model, params.tau, L) - exact, ord=2)
        for L in (8, 16, 32, 64, 128)
    ]
    for a, b in zip(errors, errors[1:]):
        assert b <= a
        assert 0.4 <= b / a <= 0.6


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_interaction_circuit_matches_dense_exponential(n):
    c, dt = 0.002, 0.1
    gl = interaction_exponential_circuit(n, c, dt)
    target = expm_hermitian(c * kron(pauli("X"), build_excitation_operator(n)), dt)
    assert np.max(np.abs(gl.to_matrix() - target)) <= 1e-10


def test_interaction_circuit_zero_angle_is_identity():
    gl = interaction_exponential_circuit(2, 0.002, 0.0)
    assert np.max(np.abs(gl.to_matrix() - identity(16))) <= 1e-12


def test_interaction_circuit_middle_diagonal_structure():
    n = 2
    c, dt = 0.25, 0.5
    gl = interaction_exponential_circuit(n, c, dt)
    dim = 1 << (n + 2)
    wall = kron_all(*[hadamard_gate()] * (n + 2))
    middle = wall @ gl.to_matrix() @ wall
    off = middle - np.diag(np.diag(middle))
    assert np.max(np.abs(off)) <= 1e-12
    theta = np.sqrt(2.0**n) * c * dt
    for idx in range(dim):
        system_bits = idx & ((1 << n) - 1)
        parity = ((idx >> (n + 1)) ^ (idx >> n)) & 1
        entry = middle[idx, idx]
        if system_bits != 0:
            assert abs(entry - 1.0) <= 1e-12
        else:
            expected = np.exp(-1j * theta) if parity == 0 else np.exp(1j * theta)
            assert abs(entry - expected) <= 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_conjugation_identity_for_interaction_generator(n):
    wall = kron_all(*[hadamard_gate()] * (n + 2))
    core = kron_all(*([pauli("Z"), pauli("Z")] + [np.diag([np.sqrt(2.0), 0.0]).astype(complex)] * n))
    lhs = wall @ core @ wall
    rhs = kron(pauli("X"), build_excitation_operator(n))
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_exact_vs_fine_trotter_state_fidelity():
    model, params = small_model()
    exact_state = run_protocol_step(model, params.tau, Exact())
    trotter_state = run_protocol_step(model, params.tau, Trotter(slices=4096))
    fidelity = abs(np.vdot(exact_state, trotter_state)) ** 2
    assert fidelity >= 1.0 - 1e-4


def test_trotter_and_circuit_states_agree():
    model, params = small_model()
    for L in (8, 64):
        a = run_protocol_step(model, params.tau, Trotter(slices=L))
        b = run_protocol_step(model, params.tau, Circuit(slices=L))
        assert np.max(np.abs(a - b)) <= 1e-9


def test_zero_time_returns_initial_state():
    model, _ = small_model()
    state = run_protocol_step(model, 0.0, Exact())
    assert np.max(np.abs(state - prepare_initial_state(2))) <= 1e-12


def test_evolved_states_stay_normalized():
    model, params = small_model()
    for method in (Exact(), Trotter(slices=16), Circuit(slices=16)):
        state = run_protocol_step(model, params.tau, method)
        assert abs(np.linalg.norm(state) - 1.0) <= 1e-9


def test_trotter_propagator_deterministic():
    model, params = small_model()
    a = trotter_propagator(model, params.tau, 32)
    b = trotter_propagator(model, params.tau, 32)
    assert np.array_equal(a, b)
