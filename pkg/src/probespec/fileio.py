"""File formats: Hamiltonian files, config files, CSV and JSON outputs.

Formats are deliberately plain. A dense Hamiltonian file starts with the
dimension N on its own line followed by N rows of N complex entries written
as `re im` pairs. A Pauli-sum file holds `coefficient string` lines over
the alphabet IXYZ. Configs are flat `key = value` text with # comments.

All writers go through an atomic temp-file-and-rename so a failed run never
leaves a partial output, and all floats are serialized with repr, which
round-trips doubles exactly and keeps reruns byte-identical.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analytic import TransitionTable
from .model import SystemHamiltonian
from .oracle import ComparisonReport, MissExplanation, OracleSpectrum
from .operators import kron
from .spectroscopy import FrequencyGrid, Peak, RefinementJob, SweepResult

__all__ = [
    "BadDimensionError",
    "InconsistentLengthError",
    "ParseError",
    "RunConfig",
    "comparison_json",
    "parse_config",
    "parse_dense_hamiltonian",
    "parse_pauli_sum",
    "parse_sweep_csv",
    "peaks_json",
    "refinement_json",
    "serialize_dense_hamiltonian",
    "sweep_csv",
    "transitions_csv",
    "write_text_atomic",
]

# Parsed files get a looser Hermiticity gate than freshly built matrices:
# text round-trips may carry defects up to this relative size.
PARSE_HERMITICITY_RTOL = 1e-10


class ParseError(ValueError):
    """Malformed input file; the message carries the line number."""


class BadDimensionError(ParseError):
    """Matrix dimension is not a power of two >= 2."""


class InconsistentLengthError(ParseError):
    """Pauli strings in one file have different lengths."""


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_dense_hamiltonian(text: str) -> SystemHamiltonian:
    """Parse the dense `N + rows of re im pairs` Hamiltonian format.

    Hermiticity is enforced at 1e-10 * max|entry|; the dimension must be a
    power of two with at least one qubit.
    """
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("line 1: empty Hamiltonian file")
    lineno, header = lines[0]
    try:
        dim = int(header)
    except ValueError as exc:
        raise ParseError(f"line {lineno}: expected the dimension, got {header!r}") from exc
    if dim < 2 or dim & (dim - 1):
        raise BadDimensionError(f"line {lineno}: dimension {dim} is not a power of two >= 2")
    rows = lines[1:]
    if len(rows) != dim:
        raise ParseError(f"line {lineno}: expected {dim} matrix rows, found {len(rows)}")
    matrix = np.zeros((dim, dim), dtype=np.complex128)
    for i, (row_lineno, row) in enumerate(rows):
        parts = row.split()
        if len(parts) != 2 * dim:
            raise ParseError(
                f"line {row_lineno}: expected {2 * dim} numbers (re im pairs), got {len(parts)}"
            )
        try:
            values = [float(p) for p in parts]
        except ValueError as exc:
            raise ParseError(f"line {row_lineno}: {exc}") from exc
        matrix[i] = np.array(values[0::2]) + 1j * np.array(values[1::2])
    return SystemHamiltonian.from_matrix(matrix, rtol=PARSE_HERMITICITY_RTOL)


def serialize_dense_hamiltonian(sys: SystemHamiltonian) -> str:
    """Inverse of :func:`parse_dense_hamiltonian`, exact float round-trip."""
    lines = [str(sys.dim)]
    for i in range(sys.dim):
        parts = []
        for j in range(sys.dim):
            z = sys.matrix[i, j]
            parts.append(repr(float(z.real)))
            parts.append(repr(float(z.imag)))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


_PAULI_1Q = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def parse_pauli_sum(text: str) -> SystemHamiltonian:
    """Parse `coefficient pauli_string` lines into a dense Hamiltonian.

    Coefficients are real; strings share one length n over {I, X, Y, Z}.
    The sum of real multiples of Pauli strings is Hermitian by construction.
    """
    terms = []
    length = None
    for lineno, line in _content_lines(text):
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'coefficient pauli_string', got {line!r}")
        try:
            coeff = float(parts[0])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: bad coefficient {parts[0]!r}") from exc
        string = parts[1].upper()
        bad = [ch for ch in string if ch not in _PAULI_1Q]
        if bad:
            raise ParseError(f"line {lineno}: unknown Pauli letter(s) {bad} in {parts[1]!r}")
        if length is None:
            length = len(string)
        elif len(string) != length:
            raise InconsistentLengthError(
                f"line {lineno}: string length {len(string)} differs from earlier length {length}"
            )
        terms.append((coeff, string))
    if not terms:
        raise ParseError("line 1: empty Pauli-sum file")
    dim = 1 << length
    matrix = np.zeros((dim, dim), dtype=np.complex128)
    for coeff, string in terms:
        op = np.array([[coeff]], dtype=np.complex128)
        for ch in string:
            op = kron(op, _PAULI_1Q[ch])
        matrix += op
    return SystemHamiltonian.from_matrix(matrix)


@dataclass
class RunConfig:
    """Flat run configuration with the bundled defaults.

    The default system is the builtin seeded random 16-dimensional model
    whose transitions sit inside the default sweep window.
    """

    system: str = "random"
    system_file: str = ""
    random_n: int = 4
    random_seed: int = 7
    window_min: float = 15.9
    window_max: float = 19.1
    alpha: float = -100.0
    c: float = 0.002
    tau: float = 1200.0
    omega_min: float = 15.8
    omega_max: float = 19.2
    intervals: int = 170
    method: str = "exact"
    trotter_slices: int = 128
    measurement: str = "exact"
    shots: int = 100000
    seed: int = 1
    threshold: float = 0.05
    out_dir: str = "out"
    plot: bool = True

    def validate(self) -> None:
        if self.system not in ("random", "dense", "pauli"):
            raise ValueError(f"system must be random, dense, or pauli, got {self.system!r}")
        if self.system in ("dense", "pauli") and not self.system_file:
            raise ValueError(f"system = {self.system} needs system_file = <path>")
        if self.system == "random" and self.random_n < 1:
            raise ValueError(f"random_n must be >= 1, got {self.random_n}")
        if self.method not in ("exact", "trotter", "circuit"):
            raise ValueError(f"method must be exact, trotter, or circuit, got {self.method!r}")
        if self.measurement not in ("exact", "shots"):
            raise ValueError(f"measurement must be exact or shots, got {self.measurement!r}")
        if not self.omega_max > self.omega_min:
            raise ValueError(f"empty sweep range [{self.omega_min}, {self.omega_max}]")
        if self.intervals < 1:
            raise ValueError(f"intervals must be >= 1, got {self.intervals}")
        if self.trotter_slices < 1:
            raise ValueError(f"trotter_slices must be >= 1, got {self.trotter_slices}")
        if self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must be in (0, 1), got {self.threshold}")
        if self.c < 0 or self.tau < 0:
            raise ValueError("c and tau must be non-negative")
        for name in ("alpha", "c", "tau", "omega_min", "omega_max", "threshold",
                     "window_min", "window_max"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def load_system(self) -> SystemHamiltonian:
        from .model import random_system

        if self.system == "random":
            return random_system(
                self.random_n,
                self.random_seed,
                spectral_window=(self.window_min, self.window_max),
                alpha=self.alpha,
            )
        text = Path(self.system_file).read_text(encoding="utf-8")
        if self.system == "dense":
            return parse_dense_hamiltonian(text)
        return parse_pauli_sum(text)


_CONFIG_CASTS = {
    "system": str,
    "system_file": str,
    "random_n": int,
    "random_seed": int,
    "window_min": float,
    "window_max": float,
    "alpha": float,
    "c": float,
    "tau": float,
    "omega_min": float,
    "omega_max": float,
    "intervals": int,
    "method": str,
    "trotter_slices": int,
    "measurement": str,
    "shots": int,
    "seed": int,
    "threshold": float,
    "out_dir": str,
    "plot": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
}


def parse_config(text: str) -> RunConfig:
    """Parse a flat `key = value` config file with # comments."""
    config = RunConfig()
    for lineno, line in _content_lines(text):
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_CASTS:
            raise ParseError(f"line {lineno}: unknown config key {key!r}")
        try:
            setattr(config, key, _CONFIG_CASTS[key](value))
        except ValueError as exc:
            raise ParseError(f"line {lineno}: bad value for {key}: {exc}") from exc
    return config


def write_text_atomic(path: str | Path, text: str) -> None:
    """Write via a temp file in the target directory plus an atomic rename."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=target.parent, prefix=target.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp_name, target)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def sweep_csv(result: SweepResult) -> str:
    """CSV serialization: omega,p_decay plus shot columns when sampled."""
    lines = []
    if result.sampled:
        lines.append("omega,p_decay,shots,successes")
        for k, omega in enumerate(result.grid.centers):
            lines.append(
                f"{float(omega)!r},{float(result.decay[k])!r},"
                f"{int(result.shots[k])},{int(result.successes[k])}"
            )
    else:
        lines.append("omega,p_decay")
        for k, omega in enumerate(result.grid.centers):
            lines.append(f"{float(omega)!r},{float(result.decay[k])!r}")
    return "\n".join(lines) + "\n"


def parse_sweep_csv(text: str) -> tuple[FrequencyGrid, np.ndarray]:
    """Recover the grid and decay column from a sweep CSV.

    The grid is reconstructed from the uniform centers: spacing from the
    first difference, bounds half a spacing outside the end centers. A one
    row file is rejected since its spacing is unknowable.
    """
    lines = [line for _, line in _content_lines(text)]
    if not lines or not lines[0].startswith("omega,p_decay"):
        raise ParseError("line 1: missing 'omega,p_decay' header")
    omegas = []
    decay = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) not in (2, 4):
            raise ParseError(f"line {lineno}: expected 2 or 4 columns, got {len(parts)}")
        try:
            omegas.append(float(parts[0]))
            decay.append(float(parts[1]))
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    if len(omegas) < 2:
        raise ParseError("line 2: need at least two rows to recover the grid")
    centers = np.array(omegas)
    delta = centers[1] - centers[0]
    if delta <= 0 or np.max(np.abs(np.diff(centers) - delta)) > 1e-9 * abs(delta):
        raise ParseError("line 2: omega column is not a uniform ascending grid")
    grid = FrequencyGrid(
        omega_min=float(centers[0] - delta / 2),
        omega_max=float(centers[-1] + delta / 2),
        m=len(omegas),
    )
    return grid, np.array(decay, dtype=np.float64)


def _json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _peak_dict(peak: Peak) -> dict:
    return {
        "k_max": peak.k_max,
        "omega_peak": peak.omega_peak,
        "height": peak.height,
        "estimated_energy": peak.estimated_energy,
        "half_width": peak.half_width,
    }


def peaks_json(peaks: list[Peak]) -> str:
    return _json({"peaks": [_peak_dict(p) for p in peaks]})


def comparison_json(
    report: ComparisonReport,
    oracle: OracleSpectrum,
    explanations: tuple[MissExplanation, ...] = (),
) -> str:
    by_index = {e.oracle_index: e for e in explanations}
    missing = []
    for j in report.missing:
        entry = {
            "oracle_index": j,
            "transition_frequency": float(oracle.transition_frequencies[j]),
            "component_sum_abs": float(abs(oracle.component_sums[j])),
        }
        if j in by_index:
            entry["causes"] = list(by_index[j].causes)
        missing.append(entry)
    payload = {
        "tol": report.tol,
        "max_abs_error": report.max_abs_error,
        "matched": [
            {
                "oracle_index": m.oracle_index,
                "transition_frequency": float(oracle.transition_frequencies[m.oracle_index]),
                "abs_error": m.abs_error,
                "peak": _peak_dict(m.peak),
            }
            for m in report.matched
        ],
        "missing": missing,
        "spurious": [_peak_dict(p) for p in report.spurious],
    }
    return _json(payload)


def refinement_json(jobs: list[RefinementJob]) -> str:
    return _json(
        {
            "jobs": [
                {
                    "omega_min": j.omega_min,
                    "omega_max": j.omega_max,
                    "m": j.m,
                    "c": j.c,
                    "tau": j.tau,
                    "rung": j.rung,
                }
                for j in jobs
            ]
        }
    )


def transitions_csv(table: TransitionTable) -> str:
    lines = ["j,energy,re_sum_d,im_sum_d,strength,transition_frequency"]
    for row in table.rows:
        lines.append(
            f"{row.index},{row.energy!r},{row.sum_d.real!r},{row.sum_d.imag!r},"
            f"{row.strength!r},{row.transition_frequency!r}"
        )
    return "\n".join(lines) + "\n"
