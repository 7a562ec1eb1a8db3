"""Time evolution three ways: exact, Trotterized, and gate-level.

The Trotter slice follows the fixed factor order

    e^{-i (omega/2) sigma_z x I tau/L} . e^{-i I x H_reg tau/L} . e^{-i c sigma_x x A tau/L}

and the gate-level route replaces the third factor with an exact circuit
rewriting, so Trotter(L) and Circuit(L) agree to rounding while both differ
from the exact propagator by the usual O(1/L) product-formula error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import circuits
from .model import CompositeModel, prepare_initial_state
from .operators import apply, expm_hermitian

__all__ = [
    "Circuit",
    "Exact",
    "EvolutionMethod",
    "Trotter",
    "TrotterPlan",
    "exact_propagator",
    "interaction_exponential_circuit",
    "method_from_name",
    "run_protocol_step",
    "trotter_plan",
    "trotter_propagator",
]


@dataclass(frozen=True)
class Exact:
    """Dense exponential of the full Hamiltonian."""


@dataclass(frozen=True)
class Trotter:
    """First-order product formula with ``slices`` slices."""

    slices: int = 128

    def __post_init__(self) -> None:
        if self.slices < 1:
            raise ValueError(f"slice count must be >= 1, got {self.slices}")


@dataclass(frozen=True)
class Circuit:
    """Product formula with the interaction factor built from gates."""

    slices: int = 128

    def __post_init__(self) -> None:
        if self.slices < 1:
            raise ValueError(f"slice count must be >= 1, got {self.slices}")


EvolutionMethod = Exact | Trotter | Circuit


def method_from_name(name: str, slices: int = 128) -> EvolutionMethod:
    """Map a CLI method name to an evolution method value."""
    key = name.strip().lower()
    if key == "exact":
        return Exact()
    if key == "trotter":
        return Trotter(slices)
    if key == "circuit":
        return Circuit(slices)
    raise ValueError(f"unknown evolution method {name!r}; expected exact, trotter, or circuit")


@dataclass(frozen=True)
class TrotterPlan:
    """One slice of the product formula, kept as its three unitary factors."""

    L: int
    tau: float
    per_slice_factors: tuple[np.ndarray, np.ndarray, np.ndarray]

    def slice_unitary(self) -> np.ndarray:
        probe, register, interaction = self.per_slice_factors
        return probe @ register @ interaction


def _probe_factor(model: CompositeModel, dt: float) -> np.ndarray:
    # Diagonal phases e^{-i (omega/2) (+/-1) dt}, +1 on the excited probe |1>.
    dim = model.dim
    half = dim // 2
    phases = np.empty(dim, dtype=np.complex128)
    phases[:half] = np.exp(+1j * (model.params.omega / 2.0) * dt)
    phases[half:] = np.exp(-1j * (model.params.omega / 2.0) * dt)
    return np.diag(phases)

def _register_factor(model: CompositeModel, dt: float) -> np.ndarray:
    # Direct sum: a pure phase on the ancilla-0 block (the alpha level) and
    # the system propagator on the ancilla-1 block, duplicated per probe value.
    big_n = model.system.dim
    block = np.zeros((2 * big_n, 2 * big_n), dtype=np.complex128)
    block[:big_n, :big_n] = np.exp(-1j * model.params.alpha * dt) * np.eye(big_n)
    block[big_n:, big_n:] = expm_hermitian(model.system.matrix, dt)
    out = np.zeros((model.dim, model.dim), dtype=np.complex128)
    out[: 2 * big_n, : 2 * big_n] = block
    out[2 * big_n :, 2 * big_n :] = block
    return out


def _interaction_factor(model: CompositeModel, dt: float) -> np.ndarray:
    return expm_hermitian(model.term_interaction, dt)


def trotter_plan(model: CompositeModel, tau: float, L: int) -> TrotterPlan:
    """Build the three per-slice factors for time ``tau`` cut into ``L`` slices."""
    if L < 1:
        raise ValueError(f"slice count must be >= 1, got {L}")
    dt = tau / L
    return TrotterPlan(
        L=L,
        tau=tau,
        per_slice_factors=(
            _probe_factor(model, dt),
            _register_factor(model, dt),
            _interaction_factor(model, dt),
        ),
    )


def exact_propagator(model: CompositeModel, tau: float) -> np.ndarray:
    """exp(-i H tau) of the full composite Hamiltonian."""
    return expm_hermitian(model.total, tau)


def trotter_propagator(model: CompositeModel, tau: float, L: int) -> np.ndarray:
    """L-fold power of the first-order slice product."""
    plan = trotter_plan(model, tau, L)
    return np.linalg.matrix_power(plan.slice_unitary(), L)


def interaction_exponential_circuit(n: int, c: float, tau_over_L: float) -> circuits.GateList:
    """Elementary-gate circuit equal to exp(-i c sigma_x (x) A tau/L).

    The accumulated phase on the sole surviving diagonal entry is
    sqrt(N) * c * tau/L with N = 2**n; the returned list contains only
    Hadamard, phase, and controlled-phase gates.
    """
    theta = float(np.sqrt(1 << n) * c * tau_over_L)
    return circuits.interaction_circuit(n, theta).decompose()


def _circuit_interaction_factor(model: CompositeModel, dt: float) -> np.ndarray:
    gate_list = interaction_exponential_circuit(model.n, model.params.c, dt)
    return gate_list.to_matrix()


def run_protocol_step(model: CompositeModel, tau: float, method: EvolutionMethod) -> np.ndarray:
    """Evolve the freshly prepared initial state for time ``tau``.

    The initial state is the probe excited over the register reference
    state; the return value is the final state vector under the chosen
    propagation route.
    """
    psi0 = prepare_initial_state(model.n)
    if isinstance(method, Exact):
        return apply(exact_propagator(model, tau), psi0)
    if isinstance(method, Trotter):
        return apply(trotter_propagator(model, tau, method.slices), psi0)
    if isinstance(method, Circuit):
        L = method.slices
        dt = tau / L
        plan = trotter_plan(model, tau, L)
        probe, register, _ = plan.per_slice_factors
        slice_u = probe @ register @ _circuit_interaction_factor(model, dt)
        return apply(np.linalg.matrix_power(slice_u, L), psi0)
    raise TypeError(f"unknown evolution method {method!r}")
