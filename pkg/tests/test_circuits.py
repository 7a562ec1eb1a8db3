import numpy as np
import pytest

from probespec.circuits import (
    Gate,
    GateKind,
    GateList,
    cphase,
    hadamard,
    interaction_circuit,
    multi_controlled_phase,
    phase,
)
from probespec.operators import hadamard_gate, identity, kron_all


def dense_reference(gatelist: GateList) -> np.ndarray:
    """Gate-by-gate dense product from first principles, kron per gate."""
    n = gatelist.n_qubits
    dim = 1 << n
    total = np.eye(dim, dtype=complex)
    for g in gatelist:
        if g.kind is GateKind.HADAMARD:
            factors = [identity(2)] * n
            factors[g.target] = hadamard_gate()
            u = kron_all(*factors)
        else:
            u = np.eye(dim, dtype=complex)
            for idx in range(dim):
                bits = [(idx >> (n - 1 - q)) & 1 for q in range(n)]
                if bits[g.target] != 1:
                    continue
                if all(bits[c] == p for c, p in zip(g.controls, g.control_polarity)):
                    u[idx, idx] = np.exp(1j * g.angle)
        total = u @ total
    return total


def test_gate_constructors_validate_inputs():
    with pytest.raises(ValueError):
        cphase(1, 1, 0.3)  # control equals target
    with pytest.raises(ValueError):
        multi_controlled_phase((0, 0), 2, 0.3)  # duplicate controls
    with pytest.raises(ValueError):
        multi_controlled_phase((0, 1), 2, 0.3, polarity=(1,))  # mask length
    with pytest.raises(ValueError):
        multi_controlled_phase((0, 1), 2, 0.3, polarity=(1, 2))  # mask values
    with pytest.raises(ValueError):
        phase(0, float("nan"))
    with pytest.raises(ValueError):
        hadamard(-1)


def test_gatelist_rejects_out_of_range_qubits():
    with pytest.raises(ValueError):
        GateList(2, (hadamard(2),))


def test_apply_matches_dense_reference_on_mixed_circuit():
    gates = (
        hadamard(0),
        hadamard(2),
        phase(1, 0.4),
        cphase(0, 2, -1.1),
        multi_controlled_phase((0, 1), 2, 0.9),
        multi_controlled_phase((0, 2), 1, 0.35, polarity=(0, 1)),
        hadamard(1),
    )
    gl = GateList(3, gates)
    assert np.max(np.abs(gl.to_matrix() - dense_reference(gl))) <= 1e-13


def test_apply_acts_on_vectors_like_matrix_product():
    gl = GateList(3, (hadamard(1), cphase(1, 2, 0.7), hadamard(1)))
    rng = np.random.default_rng(2)
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    v /= np.linalg.norm(v)
    assert np.max(np.abs(gl.apply(v) - gl.to_matrix() @ v)) <= 1e-13


def test_zero_polarity_controls_fire_on_zero_bits():
    gl = GateList(2, (multi_controlled_phase((0,), 1, 0.5, polarity=(0,)),))
    u = gl.to_matrix()
    expected = np.diag([1.0, np.exp(0.5j), 1.0, 1.0])
    assert np.max(np.abs(u - expected)) <= 1e-15


@pytest.mark.parametrize("k", range(1, 8))
def test_multi_controlled_phase_lowering_is_exact(k):
    # one spare qubit beyond controls+target, as the builder's layouts have
    n = k + 2
    gl = GateList(n, (multi_controlled_phase(tuple(range(1, k + 1)), k + 1, 0.7),))
    lowered = gl.decompose()
    assert all(
        g.kind in (GateKind.HADAMARD, GateKind.SINGLE_QUBIT_PHASE, GateKind.CONTROLLED_PHASE)
        for g in lowered
    )
    assert np.max(np.abs(lowered.to_matrix() - gl.to_matrix())) <= 1e-12


def test_lowering_without_spare_qubits():
    for k in (1, 2, 3, 4, 5):
        n = k + 1
        gl = GateList(n, (multi_controlled_phase(tuple(range(k)), k, -0.4),))
        lowered = gl.decompose()
        assert np.max(np.abs(lowered.to_matrix() - gl.to_matrix())) <= 1e-12


def test_lowering_respects_polarity_masks():
    gl = GateList(4, (multi_controlled_phase((0, 1, 2), 3, 0.8, polarity=(0, 1, 0)),))
    assert np.max(np.abs(gl.decompose().to_matrix() - gl.to_matrix())) <= 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_interaction_circuit_unitary(n):
    gl = interaction_circuit(n, 0.37).decompose()
    u = gl.to_matrix()
    assert np.max(np.abs(u.conj().T @ u - identity(u.shape[0]))) <= 1e-9


def test_serialization_round_trip_is_exact():
    gl = interaction_circuit(3, 0.123456789123456789).decompose()
    parsed = GateList.from_text(gl.to_text())
    assert parsed.n_qubits == gl.n_qubits
    assert parsed.gates == gl.gates


def test_serialization_round_trip_with_multi_controlled():
    gl = GateList(
        4,
        (
            hadamard(0),
            phase(2, -0.25),
            cphase(1, 3, 2.5),
            multi_controlled_phase((0, 2), 3, 1e-7, polarity=(0, 1)),
        ),
    )
    parsed = GateList.from_text(gl.to_text())
    assert parsed.gates == gl.gates


def test_from_text_ignores_comments_and_blanks():
    text = "# gate dump\nqubits 2\n\nHADAMARD 0  # wall\nPHASE 1 0.5\n"
    gl = GateList.from_text(text)
    assert len(gl) == 2
    assert gl.gates[0] == hadamard(0)
    assert gl.gates[1] == phase(1, 0.5)


def test_from_text_reports_offending_line():
    with pytest.raises(ValueError, match="line 3"):
        GateList.from_text("qubits 2\nHADAMARD 0\nWIBBLE 1\n")
    with pytest.raises(ValueError, match="line 2"):
        GateList.from_text("qubits 2\nPHASE 1\n")
    with pytest.raises(ValueError, match="header"):
        GateList.from_text("HADAMARD 0\n")
    with pytest.raises(ValueError, match="line 2"):
        GateList.from_text("qubits 2\nMCPHASE 1 0 11 0.5\n")


def test_gate_records_are_immutable():
    g = hadamard(0)
    with pytest.raises(Exception):
        g.target = 1  # type: ignore[misc]
    assert isinstance(g, Gate)
