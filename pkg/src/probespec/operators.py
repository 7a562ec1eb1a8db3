"""Dense complex linear algebra substrate.

Everything downstream works with plain ``numpy.ndarray`` objects of dtype
complex128: matrices are 2-d, state vectors 1-d. This module supplies the
Kronecker product, the Pauli/Hadamard constants, a validated Hermitian
eigendecomposition, and the Hermitian matrix exponential built on top of it.

All tolerances are fixed constants. Dimensions in this project stay small
(at most a few thousand), so robustness and determinism win over speed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "HERMITICITY_RTOL",
    "ConvergenceFailureError",
    "DimensionMismatchError",
    "EigenDecomposition",
    "NotHermitianError",
    "NotSquareError",
    "apply",
    "eigh",
    "expm_hermitian",
    "hadamard_gate",
    "identity",
    "kron",
    "pauli",
]

# A matrix counts as Hermitian when max|M - M^dagger| <= RTOL * max|M|.
HERMITICITY_RTOL = 1e-12


class NotSquareError(ValueError):
    """Raised when an operation needs a square matrix and got a rectangle."""


class NotHermitianError(ValueError):
    """Raised when a matrix fails the Hermiticity tolerance check."""


class ConvergenceFailureError(RuntimeError):
    """Raised when the eigensolver does not converge."""


class DimensionMismatchError(ValueError):
    """Raised when operator and operand dimensions are incompatible."""


def _as_complex_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise NotSquareError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def kron(a, b) -> np.ndarray:
    """Kronecker product of two dense matrices.

    Entry ``(i*b.rows + k, j*b.cols + l)`` of the result equals
    ``a[i, j] * b[k, l]``; no reordering, no sparsity tricks.
    """
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def kron_all(*ops) -> np.ndarray:
    """Left-folded Kronecker product of any number of factors."""
    if not ops:
        raise ValueError("kron_all needs at least one factor")
    out = np.asarray(ops[0], dtype=np.complex128)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=np.complex128))
    return out


def identity(dim: int) -> np.ndarray:
    """Dense complex identity matrix."""
    return np.eye(dim, dtype=np.complex128)


def pauli(which: str) -> np.ndarray:
    """Return a Pauli matrix by axis label, ``"X"`` or ``"Z"``."""
    w = which.upper() if isinstance(which, str) else which
    if w == "X":
        return np.array([[0, 1], [1, 0]], dtype=np.complex128)
    if w == "Z":
        return np.array([[1, 0], [0, -1]], dtype=np.complex128)
    raise ValueError(f"unsupported Pauli axis {which!r}; expected 'X' or 'Z'")


def hadamard_gate() -> np.ndarray:
    """The 2x2 Hadamard matrix (1/sqrt(2)) [[1, 1], [1, -1]]."""
    s = 1.0 / np.sqrt(2.0)
    return np.array([[s, s], [s, -s]], dtype=np.complex128)


def hermiticity_defect(m: np.ndarray) -> float:
    """max|M - M^dagger|, the absolute deviation from Hermiticity."""
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def check_hermitian(m, rtol: float = HERMITICITY_RTOL) -> np.ndarray:
    """Validate Hermiticity of ``m`` within ``rtol * max|m|``.

    Returns the validated array. Raises :class:`NotSquareError` or
    :class:`NotHermitianError`.
    """
    a = _as_complex_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise NotSquareError(f"matrix is {a.shape[0]}x{a.shape[1]}, not square")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    defect = hermiticity_defect(a)
    if defect > rtol * max(scale, 1e-300):
        raise NotHermitianError(
            f"Hermiticity defect {defect:.3e} exceeds {rtol:.1e} * max|M| = {rtol * scale:.3e}"
        )
    return a


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenpairs of a Hermitian matrix.

    Attributes:
        eigenvalues: real eigenvalues in ascending order.
        eigenvectors: unitary matrix whose column j is the eigenvector
            paired with ``eigenvalues[j]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        """V diag(w) V^dagger, for reconstruction checks."""
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def eigh(m, rtol: float = HERMITICITY_RTOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix with validation.

    The input must be square and Hermitian within ``rtol * max|m|``.
    Eigenvalues come back ascending, eigenvectors as orthonormal columns;
    output is deterministic for identical input.

    Raises:
        NotSquareError: non-square input.
        NotHermitianError: Hermiticity defect above tolerance.
        ConvergenceFailureError: the underlying solver failed to converge.
    """
    a = check_hermitian(m, rtol=rtol)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - hard to trigger
        raise ConvergenceFailureError(f"eigensolver did not converge: {exc}") from exc
    return EigenDecomposition(eigenvalues=w, eigenvectors=v.astype(np.complex128, copy=False))


def expm_hermitian(h, t: float, rtol: float = HERMITICITY_RTOL) -> np.ndarray:
    """Unitary exp(-i h t) for Hermitian ``h`` via eigendecomposition.

    Computed as V diag(e^{-i w_j t}) V^dagger so the result is unitary to
    machine precision regardless of ``t``. Propagates eigh errors.
    """
    dec = eigh(h, rtol=rtol)
    if t == 0.0:
        # V V^dagger would reintroduce rounding noise; zero time is identity.
        return np.eye(dec.dim, dtype=np.complex128)
    phases = np.exp(-1j * dec.eigenvalues * t)
    v = dec.eigenvectors
    return (v * phases) @ v.conj().T


def apply(u, v) -> np.ndarray:
    """Matrix-vector product u @ v with an explicit dimension check."""
    um = np.asarray(u, dtype=np.complex128)
    vv = np.asarray(v, dtype=np.complex128)
    if um.ndim != 2 or vv.ndim != 1:
        raise DimensionMismatchError(
            f"apply expects a matrix and a vector, got shapes {um.shape} and {vv.shape}"
        )
    if um.shape[1] != vv.shape[0]:
        raise DimensionMismatchError(
            f"operator has {um.shape[1]} columns but vector has dimension {vv.shape[0]}"
        )
    return um @ vv
