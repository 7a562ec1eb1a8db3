"""Hamiltonians and states for the probe-coupled register.

The composite device is a probe qubit, one ancilla qubit, and an n-qubit
system register. Qubit order is fixed throughout the package: the probe is
the most significant tensor factor, the ancilla next, then the n system
qubits, so a basis index decomposes as

    index = probe * 2**(n+1) + ancilla * 2**n + system_index.

The three pieces of the composite Hamiltonian are

    H = (omega/2) sigma_z (x) I  +  I_2 (x) H_reg  +  c sigma_x (x) A

where H_reg holds the reference level alpha on the ancilla-0 block and the
system Hamiltonian on the ancilla-1 block, and A is the excitation operator
that couples the uniform-superposition reference state to every system
eigenstate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import operators
from .operators import check_hermitian, identity, kron, pauli

__all__ = [
    "CompositeModel",
    "ProbeParameters",
    "SystemHamiltonian",
    "WEAK_COUPLING_FRACTION",
    "build_excitation_operator",
    "build_register_hamiltonian",
    "build_total_hamiltonian",
    "embedded_eigenstate",
    "prepare_initial_state",
    "random_system",
    "reference_state",
]

# Advisory threshold: coupling should stay well below the probe frequency.
WEAK_COUPLING_FRACTION = 0.01


def _infer_qubit_count(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 2 or dim != 1 << n:
        raise ValueError(f"system dimension {dim} is not a power of two >= 2")
    return n


@dataclass(frozen=True)
class SystemHamiltonian:
    """Dense Hermitian Hamiltonian of the n-qubit system register."""

    n: int
    matrix: np.ndarray

    @classmethod
    def from_matrix(cls, matrix, rtol: float = operators.HERMITICITY_RTOL) -> "SystemHamiltonian":
        """Validate and wrap a dense Hermitian matrix of dimension 2**n.

        The stored matrix is symmetrized as (M + M^dagger)/2, which is exact
        for input that is already Hermitian and otherwise folds a defect
        within tolerance into the nearest Hermitian matrix.
        """
        m = check_hermitian(matrix, rtol=rtol)
        n = _infer_qubit_count(m.shape[0])
        m = (m + m.conj().T) / 2
        return cls(n=n, matrix=m)

    @classmethod
    def from_eigensystem(cls, eigenvalues, eigenvectors) -> "SystemHamiltonian":
        """Build V diag(E) V^dagger from a prescribed eigenbasis.

        Handy for engineered test systems: pick the eigenvectors (orthonormal
        columns) and the spectrum, get the dense Hamiltonian back.
        """
        w = np.asarray(eigenvalues, dtype=np.float64)
        v = np.asarray(eigenvectors, dtype=np.complex128)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or w.shape != (v.shape[0],):
            raise ValueError("need a square eigenvector matrix and a matching eigenvalue vector")
        gram_defect = float(np.max(np.abs(v.conj().T @ v - np.eye(v.shape[0]))))
        if gram_defect > 1e-9:
            raise ValueError(f"eigenvector columns are not orthonormal (defect {gram_defect:.3e})")
        m = (v * w) @ v.conj().T
        return cls.from_matrix((m + m.conj().T) / 2)

    @property
    def dim(self) -> int:
        return 1 << self.n


@dataclass(frozen=True)
class ProbeParameters:
    """Probe frequency, coupling, reference energy, and evolution time.

    Energies are in whatever unit the Hamiltonian uses (the worked examples
    use Hartree); times are in the inverse unit. ``c`` and ``tau`` may be
    zero, which switches the dynamics off in the obvious ways.
    """

    omega: float
    c: float
    alpha: float
    tau: float

    def __post_init__(self) -> None:
        for name in ("omega", "c", "alpha", "tau"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.c < 0:
            raise ValueError(f"coupling c must be non-negative, got {self.c}")
        if self.tau < 0:
            raise ValueError(f"evolution time tau must be non-negative, got {self.tau}")

    @property
    def weak_coupling_advisory(self) -> bool:
        """True when c is not small against omega (c >= 0.01 * omega)."""
        return self.omega <= 0 or self.c >= WEAK_COUPLING_FRACTION * self.omega


@dataclass(frozen=True)
class CompositeModel:
    """The full probe + ancilla + system model and its Hamiltonian terms.

    ``total`` is the entrywise sum of the three term matrices; all four are
    dense of dimension 2**(n+2).
    """

    system: SystemHamiltonian
    params: ProbeParameters
    term_probe: np.ndarray
    term_register: np.ndarray
    term_interaction: np.ndarray
    total: np.ndarray

    @property
    def n(self) -> int:
        return self.system.n

    @property
    def dim(self) -> int:
        return 1 << (self.system.n + 2)


def build_register_hamiltonian(sys: SystemHamiltonian, alpha: float) -> np.ndarray:
    """Ancilla-system Hamiltonian: alpha on the ancilla-0 block, H_S on ancilla-1.

    Block diagonal of dimension 2N: top-left block alpha*I_N, bottom-right
    block the system matrix. Its spectrum is {alpha with multiplicity N}
    joined with the system spectrum.
    """
    big_n = sys.dim
    out = np.zeros((2 * big_n, 2 * big_n), dtype=np.complex128)
    out[:big_n, :big_n] = alpha * np.eye(big_n)
    out[big_n:, big_n:] = sys.matrix
    return out


def build_excitation_operator(n: int) -> np.ndarray:
    """Excitation operator A = sigma_x (x) [(I + sigma_x)/sqrt(2)]^(x)n.

    Dimension 2**(n+1). Flips the ancilla while projecting the system onto
    the uniform superposition, so it couples the reference state to every
    system basis state with equal weight sqrt(N) overall.
    """
    if n < 1:
        raise ValueError(f"need at least one system qubit, got n={n}")
    plus_block = (identity(2) + pauli("X")) / np.sqrt(2.0)
    out = pauli("X")
    for _ in range(n):
        out = kron(out, plus_block)
    return out


def build_total_hamiltonian(sys: SystemHamiltonian, params: ProbeParameters) -> CompositeModel:
    """Assemble the composite Hamiltonian from its three terms.

    term_probe splits the probe levels by omega (excited |1> at +omega/2),
    term_register embeds the ancilla-system Hamiltonian, and
    term_interaction = c sigma_x (x) A. The
    total is their entrywise sum; the probe term and register term live on
    probe-diagonal blocks while the interaction is strictly probe-flipping,
    so the sum involves no cancellation.
    """
    reg_dim = 1 << (sys.n + 1)
    # The prepared excited probe level is |1> (second index half), so the
    # splitting must put +omega/2 there and -omega/2 on |0>; a decay
    # |1>|ref> -> |0>|eigenstate> then conserves energy at omega = E_j - alpha.
    probe_splitting = np.diag([-1.0, 1.0]).astype(np.complex128)
    term_probe = (params.omega / 2.0) * kron(probe_splitting, identity(reg_dim))
    term_register = kron(identity(2), build_register_hamiltonian(sys, params.alpha))
    term_interaction = params.c * kron(pauli("X"), build_excitation_operator(sys.n))
    total = term_probe + term_register + term_interaction
    return CompositeModel(
        system=sys,
        params=params,
        term_probe=term_probe,
        term_register=term_register,
        term_interaction=term_interaction,
        total=total,
    )


def reference_state(n: int) -> np.ndarray:
    """Register reference state: ancilla |0>, system in uniform superposition.

    Dimension 2**(n+1); equals (I (x) H^n) |0...0> and is an N-fold
    degenerate eigenstate of the register Hamiltonian with eigenvalue alpha.
    """
    if n < 1:
        raise ValueError(f"need at least one system qubit, got n={n}")
    big_n = 1 << n
    out = np.zeros(2 * big_n, dtype=np.complex128)
    out[:big_n] = 1.0 / np.sqrt(big_n)
    return out


def prepare_initial_state(n: int) -> np.ndarray:
    """Probe excited, register in the reference state.

    |1>_probe (x) |0>_ancilla (x) uniform system superposition, of dimension
    2**(n+2). With the probe as most significant qubit the support sits at
    indices [2**(n+1), 2**(n+1) + 2**n).
    """
    if n < 1:
        raise ValueError(f"need at least one system qubit, got n={n}")
    big_n = 1 << n
    dim = 1 << (n + 2)
    out = np.zeros(dim, dtype=np.complex128)
    out[dim // 2 : dim // 2 + big_n] = 1.0 / np.sqrt(big_n)
    return out


def random_system(
    n: int,
    seed: int,
    spectral_window: tuple[float, float] = (15.9, 19.1),
    alpha: float = -100.0,
) -> SystemHamiltonian:
    """Seeded random Hermitian system with transitions in a fixed window.

    Draws a complex Gaussian Hermitian matrix, then linearly remaps its
    spectrum so the transition frequencies E_j - alpha exactly span
    ``spectral_window``. Deterministic for identical (n, seed, window,
    alpha). The default window sits just inside the sweep range used by the
    bundled configuration, leaving one grid spacing of margin at each edge.
    """
    if n < 1:
        raise ValueError(f"need at least one system qubit, got n={n}")
    lo, hi = float(spectral_window[0]), float(spectral_window[1])
    if not hi > lo:
        raise ValueError(f"empty spectral window {spectral_window!r}")
    big_n = 1 << n
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((big_n, big_n)) + 1j * rng.standard_normal((big_n, big_n))
    dec = operators.eigh((x + x.conj().T) / 2)
    w = dec.eigenvalues
    spread = w[-1] - w[0]
    if spread <= 0:  # pragma: no cover - zero-spread draw is measure zero
        raise ValueError("degenerate random draw, pick another seed")
    energies = (alpha + lo) + (w - w[0]) * ((hi - lo) / spread)
    v = dec.eigenvectors
    m = (v * energies) @ v.conj().T
    return SystemHamiltonian.from_matrix((m + m.conj().T) / 2)


def embedded_eigenstate(n: int, eigenvector) -> np.ndarray:
    """Embed a system eigenvector as the register state |1>_ancilla (x) |v>.

    These are the decay targets: the reference state couples to each of them
    through the excitation operator with amplitude equal to the component
    sum of ``eigenvector``.
    """
    v = np.asarray(eigenvector, dtype=np.complex128)
    big_n = 1 << n
    if v.shape != (big_n,):
        raise ValueError(f"eigenvector has dimension {v.shape}, expected ({big_n},)")
    out = np.zeros(2 * big_n, dtype=np.complex128)
    out[big_n:] = v
    return out
