"""Probe-qubit energy spectroscopy: simulation and analysis toolkit.

A probe qubit weakly coupled to an ancilla-plus-system register decays
exactly when its frequency matches a transition out of the register's
reference state; sweeping the frequency therefore maps the system's energy
spectrum. This package builds the composite Hamiltonian, evolves it via a
dense exponential, a first-order product formula, or an elementary-gate
circuit, and extracts and validates the spectrum against direct
diagonalization and closed-form lineshapes.
"""

from .analytic import (
    DegenerateGapError,
    DegenerateInputWarning,
    PredictedSweep,
    TransitionRow,
    TransitionTable,
    off_resonant_error_bound,
    predicted_sweep,
    rabi_decay_probability,
    transition_table,
)
from .circuits import Gate, GateKind, GateList, interaction_circuit
from .evolution import (
    Circuit,
    Exact,
    Trotter,
    TrotterPlan,
    exact_propagator,
    interaction_exponential_circuit,
    run_protocol_step,
    trotter_plan,
    trotter_propagator,
)
from .model import (
    CompositeModel,
    ProbeParameters,
    SystemHamiltonian,
    build_excitation_operator,
    build_register_hamiltonian,
    build_total_hamiltonian,
    prepare_initial_state,
    random_system,
    reference_state,
)
from .operators import (
    ConvergenceFailureError,
    DimensionMismatchError,
    EigenDecomposition,
    NotHermitianError,
    NotSquareError,
    apply,
    eigh,
    expm_hermitian,
    hadamard_gate,
    identity,
    kron,
    pauli,
)
from .oracle import (
    ComparisonReport,
    OracleSpectrum,
    UnexplainedMissError,
    compare_spectrum,
    diagonalize_system,
    explain_misses,
)
from .spectroscopy import (
    AncillaLeakageError,
    EmptyRangeError,
    ExactMarginal,
    FrequencyGrid,
    NoDecaySupportError,
    Peak,
    RefinementJob,
    ShotSampling,
    SweepConfig,
    SweepResult,
    decay_probability_at,
    detect_peaks,
    execute_refinement,
    extract_collapsed_eigenstate,
    make_grid,
    plan_refinement,
    run_sweep,
)

__version__ = "0.1.0"
