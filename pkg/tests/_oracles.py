"""Independent reference constructions shared across the test suite.

Everything here is built from plain numpy primitives, deliberately avoiding
the package's own eigendecomposition-based code paths, so that a test
comparing against these helpers exercises two genuinely different routes to
the same quantity.
"""

from __future__ import annotations

import numpy as np

from probespec.model import SystemHamiltonian


def taylor_expm(h: np.ndarray, t: float, terms: int = 60) -> np.ndarray:
    """exp(-i h t) by scaled-and-squared truncated power series."""
    h = np.asarray(h, dtype=np.complex128)
    dim = h.shape[0]
    scale = max(1.0, float(np.max(np.abs(h))) * abs(t) * dim)
    squarings = max(0, int(np.ceil(np.log2(scale))))
    a = (-1j * t / (2**squarings)) * h
    result = np.eye(dim, dtype=np.complex128)
    term = np.eye(dim, dtype=np.complex128)
    for k in range(1, terms + 1):
        term = term @ a / k
        result = result + term
    for _ in range(squarings):
        result = result @ result
    return result


def random_hermitian(dim: int, seed: int, scale: float = 1.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (a + a.conj().T) / 2.0


def seeded_orthonormal(dim: int, seed: int) -> np.ndarray:
    """Deterministic unitary: QR of a seeded complex Gaussian, gauge-fixed."""
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    return q * np.sign(np.diag(r).real)


def dyadic_matrix(rows: int, cols: int, seed: int) -> np.ndarray:
    """Matrix of small dyadic rationals: products of these are exact floats."""
    rng = np.random.default_rng(seed)
    return rng.integers(-8, 9, size=(rows, cols)).astype(np.complex128) / 16.0


def isolated_system() -> SystemHamiltonian:
    """4-level system with widely separated eigenvalues {1, 5, 9, 13}.

    Any single transition is isolated: its detuning to every other level is
    thousands of times larger than the matrix elements produced by couplings
    around 1e-4.
    """
    return SystemHamiltonian.from_eigensystem(
        np.array([1.0, 5.0, 9.0, 13.0]), seeded_orthonormal(4, 11)
    )


def sum_engineered_system(
    target_sums: np.ndarray, energies: np.ndarray, alpha: float
) -> SystemHamiltonian:
    """System whose eigenvector component sums are exactly prescribed.

    The component sums of an orthonormal eigenbasis always satisfy
    sum_j |s_j|^2 = N, so the targets must respect that. A Householder
    reflection mapping the uniform vector onto targets/sqrt(N) yields an
    orthogonal eigenvector matrix whose column sums are the targets.
    """
    t = np.asarray(target_sums, dtype=float)
    en = np.asarray(energies, dtype=float)
    dim = t.size
    if abs(float(np.sum(t**2)) - dim) > 1e-9:
        raise ValueError("target sums must satisfy sum of squares = dimension")
    u = np.full(dim, 1.0 / np.sqrt(dim))
    w = t / np.sqrt(dim)
    h = u - w
    norm = np.linalg.norm(h)
    if norm < 1e-15:
        basis = np.eye(dim)
    else:
        h = h / norm
        basis = np.eye(dim) - 2.0 * np.outer(h, h)
    return SystemHamiltonian.from_eigensystem(en + alpha, basis.astype(np.complex128))


def blind_transition_system(alpha: float) -> SystemHamiltonian:
    """4-level system whose second eigenvector has exactly zero component sum.

    Transitions sit at 16.31, 17.11, 17.91, 18.71 above alpha; the 17.11 one
    is carried by (1, -1, 0, 0)/sqrt(2) and is invisible to a probe sweep,
    while the other three couple strongly.
    """
    r = np.sqrt(0.5)
    vectors = np.array(
        [
            [r, r, 0.0, 0.0],
            [r, -r, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    ).T
    energies = np.array([16.31, 17.11, 17.91, 18.71]) + alpha
    return SystemHamiltonian.from_eigensystem(energies, vectors.astype(np.complex128))
