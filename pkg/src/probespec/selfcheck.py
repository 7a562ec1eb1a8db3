"""Built-in invariant suite behind the `verify` subcommand.

Each check is self-contained, deterministic, and fast: engineered small
models exercise the product-formula convergence rate, the gate-circuit
rewriting, the two-level lineshape, the transition-strength identity, the
off-resonant error bound, and byte-level reproducibility of sweeps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import analytic, evolution, fileio, model, operators, spectroscopy

__all__ = ["CheckResult", "run_all_checks"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _seeded_orthonormal(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(x)
    # Fix the gauge so the basis is reproducible across BLAS builds.
    return q * np.sign(np.diag(r))


def _isolated_system(seed: int = 11) -> model.SystemHamiltonian:
    # Four well-separated levels; every transition is isolated against the
    # weak couplings used below.
    v = _seeded_orthonormal(4, seed)
    return model.SystemHamiltonian.from_eigensystem([1.0, 5.0, 9.0, 13.0], v)


def _check_trotter_convergence() -> CheckResult:
    sys = model.SystemHamiltonian.from_matrix(
        np.array([[0.3, 0.2], [0.2, -0.4]], dtype=np.complex128)
    )
    params = model.ProbeParameters(omega=1.0, c=0.05, alpha=0.0, tau=1.0)
    m = model.build_total_hamiltonian(sys, params)
    exact = evolution.exact_propagator(m, params.tau)
    errors = []
    for slices in (8, 16, 32, 64, 128):
        approx = evolution.trotter_propagator(m, params.tau, slices)
        errors.append(float(np.linalg.norm(approx - exact, ord=2)))
    ratios = [errors[i + 1] / errors[i] for i in range(len(errors) - 1)]
    monotone = all(errors[i + 1] <= errors[i] for i in range(len(errors) - 1))
    in_window = all(0.4 <= r <= 0.6 for r in ratios)
    return CheckResult(
        "trotter-convergence",
        monotone and in_window,
        f"halving ratios {['%.3f' % r for r in ratios]}",
    )


def _check_circuit_equivalence() -> CheckResult:
    worst = 0.0
    for n in (1, 2, 3):
        gates = evolution.interaction_exponential_circuit(n, c=0.002, tau_over_L=0.1)
        dense = operators.expm_hermitian(
            0.002 * operators.kron(operators.pauli("X"), model.build_excitation_operator(n)), 0.1
        )
        worst = max(worst, float(np.max(np.abs(gates.to_matrix() - dense))))
    return CheckResult(
        "circuit-equivalence", worst <= 1e-10, f"max entry error {worst:.3e} (tol 1e-10)"
    )


def _check_conjugation_identity() -> CheckResult:
    worst = 0.0
    for n in (1, 2, 3):
        wall = operators.hadamard_gate()
        for _ in range(n + 1):
            wall = operators.kron(wall, operators.hadamard_gate())
        diag = operators.kron(operators.pauli("Z"), operators.pauli("Z"))
        core = np.array([[math.sqrt(2.0), 0.0], [0.0, 0.0]], dtype=np.complex128)
        for _ in range(n):
            diag = operators.kron(diag, core)
        lhs = wall @ diag @ wall
        rhs = operators.kron(operators.pauli("X"), model.build_excitation_operator(n))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return CheckResult(
        "conjugation-identity", worst <= 1e-12, f"max entry error {worst:.3e} (tol 1e-12)"
    )


def _check_rabi_lineshape() -> CheckResult:
    sys = _isolated_system()
    c = 1e-4
    alpha = 0.0
    table = analytic.transition_table(sys, c, alpha)
    row = table.rows[0]
    bound = analytic.off_resonant_error_bound(table, c)
    tol = max(5e-3, bound)
    tau = math.pi / row.strength
    worst = 0.0
    for detuning in (0.0, row.strength, 3.0 * row.strength):
        omega = row.transition_frequency + detuning
        config = spectroscopy.SweepConfig(c=c, tau=tau, alpha=alpha)
        p, _ = spectroscopy.decay_probability_at(sys, config, omega)
        predicted = analytic.rabi_decay_probability(
            row.strength, row.energy, alpha, omega, tau
        )
        worst = max(worst, abs(p - predicted))
    return CheckResult(
        "rabi-lineshape", worst <= tol, f"max |simulated - formula| {worst:.3e} (tol {tol:.1e})"
    )


def _check_transition_strength() -> CheckResult:
    worst = 0.0
    c = 0.002
    for n, seed in ((1, 3), (2, 4), (3, 5)):
        sys = model.random_system(n, seed)
        table = analytic.transition_table(sys, c, alpha=-100.0)
        a_op = model.build_excitation_operator(n)
        psi0 = model.reference_state(n)
        a_psi0 = operators.apply(a_op, psi0)
        dec = operators.eigh(sys.matrix)
        for j, row in enumerate(table.rows):
            embedded = model.embedded_eigenstate(n, dec.eigenvectors[:, j])
            overlap = complex(np.vdot(embedded, a_psi0))
            worst = max(worst, abs(2 * c * abs(overlap) - row.strength))
    return CheckResult(
        "transition-strength", worst <= 1e-10, f"max |inner-product Q - sum Q| {worst:.3e}"
    )


def _check_error_bound() -> CheckResult:
    sys = model.random_system(3, seed=21, spectral_window=(15.9, 19.1))
    c = 1e-4
    alpha = -100.0
    table = analytic.transition_table(sys, c, alpha)
    bound = analytic.off_resonant_error_bound(table, c)
    row = table.rows[0]
    tau = math.pi / row.strength if row.strength > 0 else 1000.0
    config = spectroscopy.SweepConfig(c=c, tau=tau, alpha=alpha)
    _, state = spectroscopy.decay_probability_at(sys, config, row.transition_frequency)
    dec = operators.eigh(sys.matrix)
    half = state.shape[0] // 2
    decayed = state[:half]
    target = model.embedded_eigenstate(sys.n, dec.eigenvectors[:, 0])
    spurious = float(np.sum(np.abs(decayed) ** 2) - np.abs(np.vdot(target, decayed)) ** 2)
    return CheckResult(
        "error-bound", spurious <= bound, f"spurious decay {spurious:.3e} <= bound {bound:.3e}"
    )


def _check_determinism() -> CheckResult:
    sys = model.random_system(2, seed=9)
    grid = spectroscopy.make_grid(15.8, 19.2, 7)
    config = spectroscopy.SweepConfig(
        c=0.002,
        tau=1200.0,
        alpha=-100.0,
        measurement=spectroscopy.ShotSampling(count=5000, seed=42),
    )
    first = fileio.sweep_csv(spectroscopy.run_sweep(sys, grid, config))
    second = fileio.sweep_csv(spectroscopy.run_sweep(sys, grid, config))
    return CheckResult(
        "determinism",
        first == second,
        "two seeded sweeps serialize byte-identically" if first == second else "outputs differ",
    )


def _check_gate_count_growth() -> CheckResult:
    counts = [len(evolution.interaction_exponential_circuit(n, 0.002, 0.1)) for n in range(2, 9)]
    ns = np.arange(2, 9, dtype=np.float64)
    coeffs = np.polyfit(ns, counts, 2)
    fitted = np.polyval(coeffs, ns)
    residual = float(np.linalg.norm(counts - fitted) / np.linalg.norm(counts))
    return CheckResult(
        "gate-count-quadratic",
        residual < 0.10,
        f"aggregate relative residual {residual:.4f} over n=2..8 (tol 0.10)",
    )


def run_all_checks() -> list[CheckResult]:
    """Run the whole suite; order is fixed and results are deterministic."""
    return [
        _check_trotter_convergence(),
        _check_circuit_equivalence(),
        _check_conjugation_identity(),
        _check_rabi_lineshape(),
        _check_transition_strength(),
        _check_error_bound(),
        _check_gate_count_growth(),
        _check_determinism(),
    ]
