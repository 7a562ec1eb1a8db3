"""Frequency sweeps: grids, measurement models, peaks, and refinement.

One sweep runs the probe protocol once per grid frequency: build the
composite Hamiltonian at probe frequency omega_k, evolve the prepared
state for tau, and read out the probability that the probe has decayed.
Peaks of that curve against frequency locate the system's transition
energies as estimated_energy = alpha + omega_peak.

Grid points are independent, so the sweep engine can evaluate them in a
thread pool; results are always assembled in grid order and each sampled
point draws from its own seeded substream, making output byte-identical
no matter the parallelism. The pool size is capped by the
PROBE_SPEC_THREADS environment variable (default 1, serial).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .analytic import lineshape_fwhm
from .evolution import EvolutionMethod, Exact, run_protocol_step
from .model import ProbeParameters, SystemHamiltonian, build_total_hamiltonian

__all__ = [
    "AncillaLeakageError",
    "EmptyRangeError",
    "ExactMarginal",
    "FrequencyGrid",
    "Measurement",
    "NoDecaySupportError",
    "Peak",
    "RefinementJob",
    "ShotSampling",
    "SweepConfig",
    "SweepResult",
    "decay_probability_at",
    "detect_peaks",
    "execute_refinement",
    "extract_collapsed_eigenstate",
    "make_grid",
    "plan_refinement",
    "run_sweep",
]

THREADS_ENV_VAR = "PROBE_SPEC_THREADS"


class EmptyRangeError(ValueError):
    """Raised when a frequency range has no interior."""


class NoDecaySupportError(ValueError):
    """Raised when a state has no weight on the decayed-probe block."""


class AncillaLeakageError(ValueError):
    """Raised when the decayed block is not concentrated on ancilla |1>."""


@dataclass(frozen=True)
class FrequencyGrid:
    """Equal subdivision of [omega_min, omega_max] into m intervals.

    Probe frequencies sit at the interval centers
    omega_k = omega_min + (k + 1/2) * delta, k = 0..m-1.
    """

    omega_min: float
    omega_max: float
    m: int

    def __post_init__(self) -> None:
        if not self.omega_max > self.omega_min:
            raise EmptyRangeError(
                f"need omega_max > omega_min, got [{self.omega_min}, {self.omega_max}]"
            )
        if self.m < 1:
            raise EmptyRangeError(f"need at least one interval, got m={self.m}")

    @property
    def delta(self) -> float:
        return (self.omega_max - self.omega_min) / self.m

    @property
    def centers(self) -> np.ndarray:
        k = np.arange(self.m, dtype=np.float64)
        return self.omega_min + (k + 0.5) * self.delta


def make_grid(omega_min: float, omega_max: float, m: int) -> FrequencyGrid:
    """Validated frequency grid; raises EmptyRangeError on a bad range."""
    return FrequencyGrid(omega_min=float(omega_min), omega_max=float(omega_max), m=int(m))


@dataclass(frozen=True)
class ExactMarginal:
    """Read the decay probability directly from the statevector."""


@dataclass(frozen=True)
class ShotSampling:
    """Binomial sampling of the decay marginal with a fixed base seed."""

    count: int
    seed: int

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError(f"shot count must be >= 1, got {self.count}")


Measurement = ExactMarginal | ShotSampling


@dataclass(frozen=True)
class SweepConfig:
    """Everything about a sweep except the system and the grid."""

    c: float
    tau: float
    alpha: float
    method: EvolutionMethod = Exact()
    measurement: Measurement = ExactMarginal()

    def probe_parameters(self, omega: float) -> ProbeParameters:
        return ProbeParameters(omega=omega, c=self.c, alpha=self.alpha, tau=self.tau)


@dataclass(frozen=True)
class SweepResult:
    """Per-frequency decay probabilities plus the configuration echo."""

    grid: FrequencyGrid
    config: SweepConfig
    decay: np.ndarray
    shots: np.ndarray | None = None
    successes: np.ndarray | None = None

    @property
    def sampled(self) -> bool:
        return self.shots is not None


@dataclass(frozen=True)
class Peak:
    """A detected local maximum of the decay curve."""

    k_max: int
    omega_peak: float
    height: float
    estimated_energy: float
    half_width: float


def decay_probability_at(
    sys: SystemHamiltonian,
    config: SweepConfig,
    omega_k: float,
    shot_stream_index: int = 0,
) -> tuple[float, np.ndarray]:
    """Run one protocol step at a single probe frequency.

    Returns (decay probability, final state). The probability is the summed
    weight of all basis states with the probe in |0>; under shot sampling it
    is the success fraction of seeded Bernoulli draws from that marginal,
    with the substream keyed by (seed, shot_stream_index) so concurrent
    evaluation order cannot change anything.
    """
    params = config.probe_parameters(omega_k)
    model = build_total_hamiltonian(sys, params)
    state = run_protocol_step(model, config.tau, config.method)
    marginal = float(np.sum(np.abs(state[: state.shape[0] // 2]) ** 2))
    marginal = min(max(marginal, 0.0), 1.0)
    if isinstance(config.measurement, ShotSampling):
        rng = np.random.default_rng([config.measurement.seed, shot_stream_index])
        successes = int(rng.binomial(config.measurement.count, marginal))
        return successes / config.measurement.count, state
    return marginal, state


def _thread_count() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_sweep(sys: SystemHamiltonian, grid: FrequencyGrid, config: SweepConfig) -> SweepResult:
    """Evaluate the decay probability at every grid frequency.

    Deterministic for fixed inputs and seed; results are ordered by grid
    index regardless of evaluation order.
    """
    centers = grid.centers

    def one(k: int) -> float:
        p, _ = decay_probability_at(sys, config, float(centers[k]), shot_stream_index=k)
        return p

    workers = min(_thread_count(), grid.m)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            decay = np.array(list(pool.map(one, range(grid.m))), dtype=np.float64)
    else:
        decay = np.array([one(k) for k in range(grid.m)], dtype=np.float64)

    shots = successes = None
    if isinstance(config.measurement, ShotSampling):
        shots = np.full(grid.m, config.measurement.count, dtype=np.int64)
        successes = np.rint(decay * config.measurement.count).astype(np.int64)
    return SweepResult(grid=grid, config=config, decay=decay, shots=shots, successes=successes)


def _half_width(decay: np.ndarray, centers: np.ndarray, k: int, delta: float) -> float:
    """Half the FWHM estimated from half-height crossings, floored at delta/2."""
    height = decay[k]
    half = height / 2.0
    left = None
    for i in range(k - 1, -1, -1):
        if decay[i] < half:
            # Linear interpolation of the crossing between i and i+1.
            frac = (half - decay[i]) / (decay[i + 1] - decay[i])
            left = centers[i] + frac * (centers[i + 1] - centers[i])
            break
    right = None
    for i in range(k + 1, decay.shape[0]):
        if decay[i] < half:
            frac = (half - decay[i]) / (decay[i - 1] - decay[i])
            right = centers[i] - frac * (centers[i] - centers[i - 1])
            break
    if left is None or right is None:
        return delta / 2.0
    return max(right - left, delta) / 2.0


def detect_peaks(result: SweepResult, threshold: float) -> list[Peak]:
    """Strict interior local maxima with height at or above ``threshold``.

    ``threshold`` is an absolute probability in (0, 1). Adjacent equal
    samples merge into one peak reported at the leftmost index. Plateaus
    touching the window edge are not peaks.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    decay = result.decay
    centers = result.grid.centers
    m = decay.shape[0]
    peaks: list[Peak] = []
    i = 0
    while i < m:
        j = i
        while j + 1 < m and decay[j + 1] == decay[i]:
            j += 1
        is_interior = i > 0 and j < m - 1
        if is_interior and decay[i] >= threshold and decay[i - 1] < decay[i] and decay[j + 1] < decay[i]:
            peaks.append(
                Peak(
                    k_max=i,
                    omega_peak=float(centers[i]),
                    height=float(decay[i]),
                    estimated_energy=result.config.alpha + float(centers[i]),
                    half_width=float(_half_width(decay, centers, i, result.grid.delta)),
                )
            )
        i = j + 1
    return peaks


@dataclass(frozen=True)
class RefinementJob:
    """One zoom job: a sub-range to re-sweep with adjusted parameters."""

    omega_min: float
    omega_max: float
    m: int
    c: float
    tau: float
    rung: str


def plan_refinement(
    result: SweepResult,
    expected_count: int,
    peaks: list[Peak] | None = None,
    threshold: float | None = None,
) -> list[RefinementJob]:
    """Escalating zoom jobs for the widest peak-free frequency gaps.

    When fewer peaks were found than expected, each of the (deficit) widest
    gaps between detected peaks (window edges included) gets a three-rung
    ladder: (a) double the grid density at unchanged parameters, (b) halve
    the coupling and double the time, (c) keep the halved coupling and
    multiply the rung-(b) time by 10, with the sub-grid sized to resolve the
    narrower long-time lineshape. Empty list when nothing is missing.
    """
    if peaks is None:
        if threshold is None:
            top = float(np.max(result.decay)) if result.decay.size else 0.0
            threshold = 0.05 * top if top > 0 else 0.5
        peaks = detect_peaks(result, threshold)
    deficit = expected_count - len(peaks)
    if deficit <= 0:
        return []

    grid = result.grid
    edges = [grid.omega_min] + [p.omega_peak for p in peaks] + [grid.omega_max]
    gaps = [(edges[i + 1] - edges[i], edges[i], edges[i + 1]) for i in range(len(edges) - 1)]
    gaps = [g for g in gaps if g[0] > 2 * grid.delta]
    gaps.sort(key=lambda g: (-g[0], g[1]))

    base_c, base_tau = result.config.c, result.config.tau
    jobs: list[RefinementJob] = []
    for width, lo, hi in gaps[:deficit]:
        m_doubled = max(2, math.ceil(2.0 * width / grid.delta))
        deep_tau = 20.0 * base_tau
        # The deep rung hunts lines whose width is set by the evolution time
        # alone; its sub-interval must not exceed half that width or the line
        # can fall between grid points.
        deep_step = lineshape_fwhm(0.0, deep_tau) / 2.0
        m_deep = max(m_doubled, math.ceil(width / deep_step))
        jobs.append(RefinementJob(lo, hi, m_doubled, base_c, base_tau, "densify"))
        jobs.append(RefinementJob(lo, hi, m_doubled, base_c / 2.0, 2.0 * base_tau, "halve-coupling"))
        jobs.append(RefinementJob(lo, hi, m_deep, base_c / 2.0, deep_tau, "extend-time"))
    return jobs


def execute_refinement(
    sys: SystemHamiltonian,
    config: SweepConfig,
    jobs: list[RefinementJob],
    threshold_fraction: float = 0.05,
) -> list[tuple[RefinementJob, SweepResult, list[Peak]]]:
    """Run each refinement job and detect peaks on its sub-sweep.

    The detection threshold is ``threshold_fraction`` of each sub-sweep's own
    maximum (falling back to 0.5 on an all-zero sweep, which then reports no
    peaks).
    """
    out = []
    for job in jobs:
        grid = make_grid(job.omega_min, job.omega_max, job.m)
        job_config = replace(config, c=job.c, tau=job.tau)
        result = run_sweep(sys, grid, job_config)
        top = float(np.max(result.decay)) if result.decay.size else 0.0
        threshold = threshold_fraction * top if top > 0 else 0.5
        peaks = detect_peaks(result, min(max(threshold, 1e-12), 1 - 1e-12))
        out.append((job, result, peaks))
    return out


def extract_collapsed_eigenstate(final_state: np.ndarray) -> tuple[float, np.ndarray]:
    """Conditional system state given the probe decayed.

    Projects onto probe |0>, checks the surviving weight sits on ancilla
    |1> (at least 99% of the projected norm), and returns the renormalized
    n-qubit system amplitudes with the projection probability.

    Raises:
        NoDecaySupportError: projection probability below 1e-12.
        AncillaLeakageError: too much projected weight on ancilla |0>.
    """
    state = np.asarray(final_state, dtype=np.complex128)
    dim = state.shape[0]
    half = dim // 2
    decayed = state[:half]
    probability = float(np.sum(np.abs(decayed) ** 2))
    if probability < 1e-12:
        raise NoDecaySupportError(
            f"decayed-probe weight {probability:.3e} is below 1e-12; nothing collapsed"
        )
    ancilla_one = decayed[half // 2 :]
    ancilla_weight = float(np.sum(np.abs(ancilla_one) ** 2))
    if ancilla_weight < 0.99 * probability:
        raise AncillaLeakageError(
            f"only {ancilla_weight / probability:.4f} of the decayed weight is on ancilla |1>"
        )
    return probability, ancilla_one / math.sqrt(ancilla_weight)
