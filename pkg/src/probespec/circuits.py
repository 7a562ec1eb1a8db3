"""Gate records, gate-list simulation, and elementary decompositions.

The elementary gate set is {Hadamard, single-qubit phase, controlled phase}.
A fourth kind, the multi-controlled phase, exists as a logical record and is
lowered to the elementary set by :meth:`GateList.decompose` using borrowed
(dirty) work qubits only, so no clean ancilla is ever required.

Qubit 0 is the most significant bit of the basis index, matching the tensor
order used by the model module.

The lowering strategy, verified dense against reference unitaries:

* A k-controlled phase is peeled one control at a time with the half-angle
  identity  C^k P(t) = CP(t/2) . M . CP(-t/2) . M . C^(k-1) P(t/2)  where M
  is a multi-controlled NOT on the peeled control. M appears twice with only
  diagonal gates in between, so M only has to flip its target exactly and be
  an involution; transient garbage it leaves on borrowed qubits cancels
  between the two copies.
* M itself is a Toffoli ladder: a half v-chain (2k-3 Toffolis) when enough
  borrowable qubits exist, a self-restoring full v-chain (4(k-2) Toffolis)
  when exactly one short, and a two-part split of full v-chains when only a
  single borrowable qubit is left. The split parts borrow each other's
  controls, which is sound because full v-chains restore everything except
  their own target.

Total elementary count for the k-controlled phase grows as O(k^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .operators import DimensionMismatchError

__all__ = [
    "Gate",
    "GateKind",
    "GateList",
    "cphase",
    "hadamard",
    "interaction_circuit",
    "multi_controlled_phase",
    "phase",
]

_SQRT_HALF = 1.0 / math.sqrt(2.0)


class GateKind(Enum):
    """Gate vocabulary; the value doubles as the serialization token."""

    HADAMARD = "HADAMARD"
    SINGLE_QUBIT_PHASE = "PHASE"
    CONTROLLED_PHASE = "CPHASE"
    MULTI_CONTROLLED = "MCPHASE"


@dataclass(frozen=True)
class Gate:
    """One gate: kind, target(s), optional controls with polarity, angle.

    A polarity of 1 means the control fires on |1>, 0 means it fires on |0>.
    Phase-kind gates are diagonal; the Hadamard is the only amplitude-mixing
    gate in the set.
    """

    kind: GateKind
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    control_polarity: tuple[int, ...] = ()
    angle: float = 0.0

    def __post_init__(self) -> None:
        qubits = self.targets + self.controls
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"repeated qubit in gate: targets={self.targets} controls={self.controls}")
        if any(q < 0 for q in qubits):
            raise ValueError(f"negative qubit index in gate: targets={self.targets} controls={self.controls}")
        if len(self.targets) != 1:
            raise ValueError("every gate in this set has exactly one target")
        if len(self.control_polarity) != len(self.controls):
            raise ValueError("control_polarity length must match controls")
        if any(p not in (0, 1) for p in self.control_polarity):
            raise ValueError("control polarity entries must be 0 or 1")
        if not math.isfinite(self.angle):
            raise ValueError(f"gate angle must be finite, got {self.angle!r}")

    @property
    def target(self) -> int:
        return self.targets[0]


def hadamard(q: int) -> Gate:
    return Gate(GateKind.HADAMARD, (q,))


def phase(q: int, angle: float) -> Gate:
    return Gate(GateKind.SINGLE_QUBIT_PHASE, (q,), angle=angle)


def cphase(control: int, target: int, angle: float) -> Gate:
    return Gate(GateKind.CONTROLLED_PHASE, (target,), (control,), (1,), angle)


def multi_controlled_phase(
    controls: tuple[int, ...],
    target: int,
    angle: float,
    polarity: tuple[int, ...] | None = None,
) -> Gate:
    controls = tuple(controls)
    if polarity is None:
        polarity = (1,) * len(controls)
    return Gate(GateKind.MULTI_CONTROLLED, (target,), controls, tuple(polarity), angle)


@dataclass(frozen=True)
class GateList:
    """An ordered gate sequence acting on a fixed qubit count."""

    n_qubits: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValueError("need at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            bad = [q for q in g.targets + g.controls if not 0 <= q < self.n_qubits]
            if bad:
                raise ValueError(f"gate uses qubit(s) {bad} outside range 0..{self.n_qubits - 1}")

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def apply(self, state: np.ndarray) -> np.ndarray:
        """Apply the whole sequence to a state vector (or matrix of columns)."""
        psi = np.array(state, dtype=np.complex128, copy=True)
        if psi.shape[0] != self.dim:
            raise DimensionMismatchError(
                f"state has dimension {psi.shape[0]}, circuit expects {self.dim}"
            )
        index_bits = np.arange(self.dim, dtype=np.int64)
        for g in self.gates:
            psi = _apply_gate(psi, g, self.n_qubits, index_bits)
        return psi

    def to_matrix(self) -> np.ndarray:
        """Dense unitary of the sequence (apply to the identity's columns)."""
        return self.apply(np.eye(self.dim, dtype=np.complex128))

    def decompose(self) -> "GateList":
        """Lower every multi-controlled phase to {Hadamard, phase, CPhase}.

        Borrowable qubits for each lowering are all qubits the gate does not
        touch, in ascending index order, so the output is deterministic.
        """
        out: list[Gate] = []
        for g in self.gates:
            if g.kind is GateKind.MULTI_CONTROLLED:
                out.extend(_lower_multi_controlled(g, self.n_qubits))
            else:
                out.append(g)
        return GateList(self.n_qubits, tuple(out))

    def to_text(self) -> str:
        """Serialize as a plain-text gate file, one gate per line."""
        lines = [f"qubits {self.n_qubits}"]
        for g in self.gates:
            parts = [g.kind.value, str(g.target)]
            parts.extend(str(c) for c in g.controls)
            if g.kind is GateKind.MULTI_CONTROLLED:
                parts.append("".join(str(p) for p in g.control_polarity))
            if g.kind is not GateKind.HADAMARD:
                parts.append(repr(g.angle))
            lines.append(" ".join(parts))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GateList":
        """Parse the gate-file format written by :meth:`to_text`."""
        n_qubits = None
        gates: list[Gate] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            try:
                if n_qubits is None:
                    if tokens[0] != "qubits" or len(tokens) != 2:
                        raise ValueError("expected header 'qubits <count>'")
                    n_qubits = int(tokens[1])
                    continue
                gates.append(_parse_gate_line(tokens))
            except ValueError as exc:
                raise ValueError(f"gate file line {lineno}: {exc}") from exc
        if n_qubits is None:
            raise ValueError("gate file has no 'qubits' header")
        return cls(n_qubits, tuple(gates))


def _parse_gate_line(tokens: list[str]) -> Gate:
    kind = tokens[0]
    if kind == "HADAMARD":
        if len(tokens) != 2:
            raise ValueError("HADAMARD takes exactly one qubit")
        return hadamard(int(tokens[1]))
    if kind == "PHASE":
        if len(tokens) != 3:
            raise ValueError("PHASE takes a target and an angle")
        return phase(int(tokens[1]), float(tokens[2]))
    if kind == "CPHASE":
        if len(tokens) != 4:
            raise ValueError("CPHASE takes a target, a control, and an angle")
        return cphase(int(tokens[2]), int(tokens[1]), float(tokens[3]))
    if kind == "MCPHASE":
        if len(tokens) < 5:
            raise ValueError("MCPHASE takes a target, controls, a polarity mask, and an angle")
        target = int(tokens[1])
        controls = tuple(int(t) for t in tokens[2:-2])
        mask = tokens[-2]
        if len(mask) != len(controls) or any(ch not in "01" for ch in mask):
            raise ValueError(f"polarity mask {mask!r} does not match {len(controls)} controls")
        return multi_controlled_phase(controls, target, float(tokens[-1]), tuple(int(ch) for ch in mask))
    raise ValueError(f"unknown gate kind {kind!r}")


def _apply_gate(psi: np.ndarray, g: Gate, n_qubits: int, index_bits: np.ndarray) -> np.ndarray:
    if g.kind is GateKind.HADAMARD:
        q = g.target
        shape = psi.shape
        r = psi.reshape(1 << q, 2, -1)
        a = r[:, 0, :].copy()
        b = r[:, 1, :]
        r[:, 0, :] = (a + b) * _SQRT_HALF
        r[:, 1, :] = (a - b) * _SQRT_HALF
        return psi.reshape(shape)
    # Remaining kinds are diagonal: build the firing mask over basis indices.
    mask = (index_bits >> (n_qubits - 1 - g.target)) & 1 == 1
    for c, p in zip(g.controls, g.control_polarity):
        mask &= ((index_bits >> (n_qubits - 1 - c)) & 1) == p
    psi[mask] = psi[mask] * np.exp(1j * g.angle)
    return psi


# --- lowering machinery ----------------------------------------------------


def _x(q: int) -> list[Gate]:
    # X = H P(pi) H in this gate set.
    return [hadamard(q), phase(q, math.pi), hadamard(q)]


def _cx(c: int, t: int) -> list[Gate]:
    return [hadamard(t), cphase(c, t, math.pi), hadamard(t)]


def _toffoli(a: int, b: int, t: int) -> list[Gate]:
    # H . CCZ . H with CCZ built from controlled phases; 11 elementary gates.
    return [
        hadamard(t),
        cphase(b, t, math.pi / 2),
        *_cx(a, b),
        cphase(b, t, -math.pi / 2),
        *_cx(a, b),
        cphase(a, t, math.pi / 2),
        hadamard(t),
    ]


def _half_vchain(controls: list[int], target: int, dirt: list[int]) -> list[Gate]:
    """Multi-controlled NOT valid inside a diagonal sandwich.

    Flips ``target`` exactly on the all-ones control pattern and is an
    involution, but leaves the borrowed ``dirt`` qubits garbaged; only safe
    when the same sequence runs again before anything reads them. Uses
    2k-3 Toffolis for k controls.
    """
    k = len(controls)
    m = k - 2
    d = dirt[:m]
    c = controls
    seq: list[Gate] = []
    apex = _toffoli(c[k - 1], d[m - 1], target)
    desc: list[Gate] = []
    for i in range(m - 1, 0, -1):
        desc += _toffoli(c[i + 1], d[i - 1], d[i])
    root = _toffoli(c[0], c[1], d[0])
    asc: list[Gate] = []
    for i in range(1, m):
        asc += _toffoli(c[i + 1], d[i - 1], d[i])
    seq += apex + desc + root + asc + apex
    return seq


def _full_vchain(controls: list[int], target: int, dirt: list[int]) -> list[Gate]:
    """Self-restoring multi-controlled NOT on borrowed qubits.

    Runs the half-chain body twice so every borrowed qubit comes back to its
    input value no matter what state it started in. 4(k-2) Toffolis.
    """
    k = len(controls)
    m = k - 2
    d = dirt[:m]
    c = controls
    apex = _toffoli(c[k - 1], d[m - 1], target)
    desc: list[Gate] = []
    for i in range(m - 1, 0, -1):
        desc += _toffoli(c[i + 1], d[i - 1], d[i])
    root = _toffoli(c[0], c[1], d[0])
    asc: list[Gate] = []
    for i in range(1, m):
        asc += _toffoli(c[i + 1], d[i - 1], d[i])
    body = apex + desc + root + asc
    return body + body


def _mcx_self_restoring(controls: list[int], target: int, dirt: list[int]) -> list[Gate]:
    m = len(controls)
    if m == 0:
        return _x(target)
    if m == 1:
        return _cx(controls[0], target)
    if m == 2:
        return _toffoli(controls[0], controls[1], target)
    if m - 2 > len(dirt):
        raise ValueError(f"full v-chain on {m} controls needs {m - 2} borrowable qubits")
    return _full_vchain(controls, target, dirt)


def _sandwich_mcx(controls: list[int], target: int, free: list[int], borrowable_target: int) -> list[Gate]:
    """Multi-controlled NOT for use as the M slot of the half-angle identity.

    ``free`` lists borrowable qubits excluding the phase target;
    ``borrowable_target`` is the phase target itself, which self-restoring
    forms may also borrow.
    """
    m = len(controls)
    if m == 0:
        return _x(target)
    if m == 1:
        return _cx(controls[0], target)
    if m == 2:
        return _toffoli(controls[0], controls[1], target)
    if m - 2 <= len(free):
        return _half_vchain(controls, target, free)
    pool = list(free) + [borrowable_target]
    if m - 2 <= len(pool):
        return _full_vchain(controls, target, pool)
    # Only one borrowable qubit: split into two overlapping full v-chains.
    # Each part borrows the other part's controls as dirt, which is sound
    # because full v-chains restore every borrowed qubit.
    anchor = pool[0]
    p = (m + 1) // 2
    first, second = list(controls[:p]), list(controls[p:])
    inner = second + [anchor]
    rest = pool[1:]
    seq: list[Gate] = []
    seq += _mcx_self_restoring(inner, target, first + rest)
    seq += _mcx_self_restoring(first, anchor, second + [target] + rest)
    seq += _mcx_self_restoring(inner, target, first + rest)
    seq += _mcx_self_restoring(first, anchor, second + [target] + rest)
    return seq


def _mcphase(controls: list[int], target: int, angle: float, free: list[int]) -> list[Gate]:
    """k-controlled phase via half-angle peeling; free excludes target."""
    k = len(controls)
    if k == 0:
        return [phase(target, angle)]
    if k == 1:
        return [cphase(controls[0], target, angle)]
    peeled = controls[-1]
    rest = list(controls[:-1])
    flip = _sandwich_mcx(rest, peeled, free, target)
    seq = [cphase(peeled, target, angle / 2)]
    seq += flip
    seq.append(cphase(peeled, target, -angle / 2))
    seq += flip
    seq += _mcphase(rest, target, angle / 2, free + [peeled])
    return seq


def _lower_multi_controlled(g: Gate, n_qubits: int) -> list[Gate]:
    touched = set(g.targets) | set(g.controls)
    free = [q for q in range(n_qubits) if q not in touched]
    inverted = [c for c, p in zip(g.controls, g.control_polarity) if p == 0]
    pre: list[Gate] = []
    for c in inverted:
        pre += _x(c)
    core = _mcphase(list(g.controls), g.target, g.angle, free)
    post: list[Gate] = []
    for c in reversed(inverted):
        post += _x(c)
    return pre + core + post


def interaction_circuit(n: int, theta: float) -> GateList:
    """Logical circuit for exp(-i theta' sigma_x (x) A) on n + 2 qubits.

    ``theta`` is the accumulated phase sqrt(N) * c * (tau/L). Structure:
    Hadamards everywhere map the generator to a diagonal; a CNOT folds the
    probe-ancilla parity onto the ancilla; X gates move the all-zeros system
    pattern to all-ones; then two multi-controlled phases apply +/- theta,
    the ancilla polarity choosing the sign. The walls then undo themselves.

    Qubit 0 is the probe, 1 the ancilla, 2..n+1 the system register.
    """
    if n < 1:
        raise ValueError(f"need at least one system qubit, got n={n}")
    nq = n + 2
    sysq = list(range(2, nq))
    seq: list[Gate] = [hadamard(q) for q in range(nq)]
    seq += _cx(0, 1)
    for q in sysq:
        seq += _x(q)
    head = tuple(sysq[:-1])
    last = sysq[-1]
    seq.append(multi_controlled_phase((1,) + head, last, theta, (1,) + (1,) * len(head)))
    seq.append(multi_controlled_phase((1,) + head, last, -theta, (0,) + (1,) * len(head)))
    for q in sysq:
        seq += _x(q)
    seq += _cx(0, 1)
    seq += [hadamard(q) for q in range(nq)]
    return GateList(nq, tuple(seq))
