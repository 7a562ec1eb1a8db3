"""Closed-form transition strengths, Rabi lineshapes, and error bounds.

For a transition to system eigenstate j the probe decay follows the two
level formula

    P(tau) = sin^2(Omega tau / 2) * Q^2 / (Q^2 + Delta^2),
    Omega  = sqrt(Q^2 + Delta^2),   Delta = E_j - E_0 - omega_k,

where the strength Q = 2c |sum_k d_jk| is set by the component sum of the
eigenvector. These are first-order predictions that ignore all other
levels; the off-resonant error bound quantifies what that neglect costs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .operators import eigh
from .model import SystemHamiltonian

__all__ = [
    "DegenerateGapError",
    "DegenerateInputWarning",
    "PredictedSweep",
    "TransitionRow",
    "TransitionTable",
    "lineshape_fwhm",
    "off_resonant_error_bound",
    "predicted_sweep",
    "rabi_decay_probability",
    "resonance_height",
    "transition_table",
]

# sin^2(x)/x^2 = 1/2 at x ~ 1.3916; sets the finite-time main-lobe width.
_HALF_POWER_ARG = 1.3915573782515179


class DegenerateInputWarning(UserWarning):
    """Zero strength at zero detuning: the lineshape is undefined, using 0."""


class DegenerateGapError(ValueError):
    """Raised when an energy gap underlying a bound vanishes."""


@dataclass(frozen=True)
class TransitionRow:
    """One excited level: energy, component sum, strength, frequency."""

    index: int
    energy: float
    sum_d: complex
    strength: float
    transition_frequency: float


@dataclass(frozen=True)
class TransitionTable:
    """Transition data for all system levels, ordered by ascending energy."""

    alpha: float
    c: float
    rows: tuple[TransitionRow, ...]

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)


def transition_table(sys: SystemHamiltonian, c: float, alpha: float) -> TransitionTable:
    """Diagonalize the system and tabulate every transition.

    Row j carries the eigenvalue E_j, the component sum of eigenvector j,
    the strength Q_j = 2c|sum|, and the transition frequency E_j - alpha.
    """
    if c < 0:
        raise ValueError(f"coupling c must be non-negative, got {c}")
    dec = eigh(sys.matrix)
    sums = dec.eigenvectors.sum(axis=0)
    rows = tuple(
        TransitionRow(
            index=j,
            energy=float(dec.eigenvalues[j]),
            sum_d=complex(sums[j]),
            strength=2.0 * c * float(abs(sums[j])),
            transition_frequency=float(dec.eigenvalues[j]) - alpha,
        )
        for j in range(dec.dim)
    )
    return TransitionTable(alpha=alpha, c=c, rows=rows)


def rabi_decay_probability(
    strength: float, e_j: float, e_0: float, omega_k: float, tau: float
) -> float:
    """Two-level decay probability at detuning e_j - e_0 - omega_k.

    Returns sin^2(Omega tau/2) * Q^2/(Q^2 + Delta^2). When both the strength
    and the detuning vanish the formula is 0/0; that case returns 0 and
    raises :class:`DegenerateInputWarning`.
    """
    if tau < 0:
        raise ValueError(f"tau must be non-negative, got {tau}")
    detuning = e_j - e_0 - omega_k
    denom = strength * strength + detuning * detuning
    if denom == 0.0:
        warnings.warn(
            "zero strength at zero detuning: decay probability undefined, returning 0",
            DegenerateInputWarning,
            stacklevel=2,
        )
        return 0.0
    omega_rabi = math.sqrt(denom)
    return math.sin(omega_rabi * tau / 2.0) ** 2 * (strength * strength) / denom


def resonance_height(strength: float, tau: float) -> float:
    """Peak decay probability at exact resonance, sin^2(Q tau / 2)."""
    return math.sin(strength * tau / 2.0) ** 2


def lineshape_fwhm(strength: float, tau: float) -> float:
    """Approximate full width at half maximum of the decay lineshape.

    The Lorentzian envelope contributes 2Q; for short times the finite-time
    main lobe dominates with width 4 * 1.3916 / tau. The wider of the two is
    a serviceable estimate for grid-resolution decisions.
    """
    if tau <= 0:
        return math.inf
    return max(2.0 * strength, 4.0 * _HALF_POWER_ARG / tau)


@dataclass(frozen=True)
class PredictedSweep:
    """Per-frequency first-order prediction with overflow bookkeeping.

    ``clipped`` marks frequencies where the superposed single-transition
    lineshapes summed above 1 and were clipped; there the two-level
    approximation has broken down.
    """

    values: np.ndarray
    clipped: np.ndarray


def predicted_sweep(table: TransitionTable, grid, tau: float) -> PredictedSweep:
    """Sum the two-level lineshape over all transitions at each frequency.

    ``grid`` is any object with a ``centers`` array of probe frequencies
    (see spectroscopy.FrequencyGrid). Degenerate 0/0 terms contribute 0.
    """
    centers = np.asarray(grid.centers, dtype=np.float64)
    total = np.zeros_like(centers)
    for row in table.rows:
        detuning = row.transition_frequency - centers
        denom = row.strength * row.strength + detuning * detuning
        with np.errstate(invalid="ignore", divide="ignore"):
            term = np.where(
                denom == 0.0,
                0.0,
                np.sin(np.sqrt(denom) * tau / 2.0) ** 2 * (row.strength**2) / denom,
            )
        total += term
    clipped = total > 1.0
    return PredictedSweep(values=np.minimum(total, 1.0), clipped=clipped)


def off_resonant_error_bound(table: TransitionTable, c: float) -> float:
    """Upper bound on spurious decay when resonant with the lowest level.

    4 c^2 sum_{j>=2} |sum_d_j|^2 / (E_j - E_1)^2, using the component sums
    already stored in the table (strengths are recomputed from ``c``, so the
    bound can be evaluated at a coupling other than the table's own).

    Raises:
        DegenerateGapError: some E_j coincides with E_1 within 1e-12.
    """
    rows = table.rows
    if len(rows) < 2:
        return 0.0
    e_1 = rows[0].energy
    total = 0.0
    for row in rows[1:]:
        gap = row.energy - e_1
        if abs(gap) <= 1e-12:
            raise DegenerateGapError(
                f"level {row.index} is degenerate with the lowest level (gap {gap:.3e})"
            )
        total += abs(row.sum_d) ** 2 / (gap * gap)
    return 4.0 * c * c * total
