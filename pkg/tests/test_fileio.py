import json

import numpy as np
import pytest
from _oracles import random_hermitian

from probespec.fileio import (
    BadDimensionError,
    InconsistentLengthError,
    ParseError,
    RunConfig,
    comparison_json,
    parse_config,
    parse_dense_hamiltonian,
    parse_pauli_sum,
    parse_sweep_csv,
    peaks_json,
    refinement_json,
    serialize_dense_hamiltonian,
    sweep_csv,
    transitions_csv,
    write_text_atomic,
)
from probespec.analytic import transition_table
from probespec.model import SystemHamiltonian, random_system
from probespec.operators import NotHermitianError, kron, pauli
from probespec.oracle import compare_spectrum, diagonalize_system, explain_misses
from probespec.spectroscopy import (
    Peak,
    ShotSampling,
    SweepConfig,
    make_grid,
    plan_refinement,
    run_sweep,
)


def test_parse_dense_two_level_example():
    sys = parse_dense_hamiltonian("2\n3 0 0 0\n0 0 5 0")
    assert np.array_equal(sys.matrix, np.diag([3.0, 5.0]).astype(complex))
    assert sys.n == 1


def test_dense_serialization_round_trips_exactly():
    sys = SystemHamiltonian.from_matrix(random_hermitian(8, 17))
    text = serialize_dense_hamiltonian(sys)
    back = parse_dense_hamiltonian(text)
    assert np.array_equal(back.matrix, sys.matrix)
    assert serialize_dense_hamiltonian(back) == text


def test_parse_dense_skips_comments_and_blank_lines():
    text = "# a system\n2\n\n3 0 0 0  # row one\n0 0 5 0\n"
    sys = parse_dense_hamiltonian(text)
    assert np.array_equal(sys.matrix, np.diag([3.0, 5.0]).astype(complex))


def test_parse_dense_rejects_bad_dimensions():
    with pytest.raises(BadDimensionError):
        parse_dense_hamiltonian("3\n1 0 0 0 0 0\n0 0 1 0 0 0\n0 0 0 0 1 0")
    with pytest.raises(BadDimensionError):
        parse_dense_hamiltonian("1\n1 0")


def test_parse_dense_error_line_numbers():
    with pytest.raises(ParseError, match="line 1"):
        parse_dense_hamiltonian("not-a-number\n3 0 0 0\n0 0 5 0")
    with pytest.raises(ParseError, match="line 2"):
        parse_dense_hamiltonian("2\n3 0 0\n0 0 5 0")
    with pytest.raises(ParseError, match="line 3"):
        parse_dense_hamiltonian("2\n3 0 0 0\n0 0 five 0")
    with pytest.raises(ParseError):
        parse_dense_hamiltonian("2\n3 0 0 0")
    with pytest.raises(ParseError):
        parse_dense_hamiltonian("")


def test_parse_dense_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        parse_dense_hamiltonian("2\n3 0 1 0\n0 0 5 0")


def test_parse_pauli_single_z():
    sys = parse_pauli_sum("1.0 Z")
    assert np.array_equal(sys.matrix, np.diag([1.0, -1.0]).astype(complex))


def test_parse_pauli_weighted_sum():
    sys = parse_pauli_sum("0.5 XX\n0.5 ZI")
    expected = 0.5 * kron(pauli("X"), pauli("X")) + 0.5 * kron(pauli("Z"), np.eye(2))
    assert np.array_equal(sys.matrix, expected)


def test_parse_pauli_accepts_y_terms_and_lowercase():
    sys = parse_pauli_sum("1.0 xy\n1.0 yx")
    y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    expected = kron(pauli("X"), y) + kron(y, pauli("X"))
    assert np.allclose(sys.matrix, expected, atol=1e-15)


def test_parse_pauli_rejects_mixed_lengths():
    with pytest.raises(InconsistentLengthError, match="line 2"):
        parse_pauli_sum("1.0 XX\n1.0 Z")


def test_parse_pauli_error_line_numbers():
    with pytest.raises(ParseError, match="line 1"):
        parse_pauli_sum("1.0 Q")
    with pytest.raises(ParseError, match="line 2"):
        parse_pauli_sum("1.0 Z\nbogus Z")
    with pytest.raises(ParseError, match="line 1"):
        parse_pauli_sum("1.0")
    with pytest.raises(ParseError):
        parse_pauli_sum("# only a comment\n")


def test_config_defaults_pin_the_bundled_run():
    config = parse_config("")
    assert config == RunConfig()
    assert (config.random_n, config.random_seed) == (4, 7)
    assert (config.c, config.tau, config.alpha) == (0.002, 1200.0, -100.0)
    assert (config.omega_min, config.omega_max, config.intervals) == (15.8, 19.2, 170)
    assert (config.window_min, config.window_max) == (15.9, 19.1)
    assert (config.method, config.measurement, config.threshold) == ("exact", "exact", 0.05)
    config.validate()


def test_config_overrides_and_casts():
    text = """
    # tweak a few knobs
    c = 0.004
    intervals = 85
    method = trotter
    trotter_slices = 32
    plot = off
    measurement = shots
    shots = 2000
    """
    config = parse_config(text)
    assert config.c == 0.004
    assert config.intervals == 85
    assert config.method == "trotter"
    assert config.trotter_slices == 32
    assert config.plot is False
    assert config.measurement == "shots"
    assert config.shots == 2000
    config.validate()
    assert parse_config("plot = TRUE").plot is True


def test_config_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError, match="line 1"):
        parse_config("no_such_key = 3")
    with pytest.raises(ParseError, match="line 2"):
        parse_config("c = 0.1\nc 0.2")
    with pytest.raises(ParseError, match="line 1"):
        parse_config("intervals = many")


def test_config_validate_rejects_bad_values():
    bad = [
        {"system": "bogus"},
        {"system": "dense"},  # needs system_file
        {"random_n": 0},
        {"method": "magic"},
        {"measurement": "guess"},
        {"omega_min": 2.0, "omega_max": 1.0},
        {"intervals": 0},
        {"trotter_slices": 0},
        {"shots": 0},
        {"threshold": 0.0},
        {"threshold": 1.0},
        {"c": -1e-3},
        {"tau": -1.0},
        {"alpha": float("nan")},
    ]
    for overrides in bad:
        config = RunConfig(**overrides)
        with pytest.raises(ValueError):
            config.validate()


def test_config_loads_each_system_source(tmp_path):
    dense_path = tmp_path / "dense.txt"
    dense_path.write_text("2\n3 0 0 0\n0 0 5 0\n", encoding="utf-8")
    config = RunConfig(system="dense", system_file=str(dense_path))
    assert np.array_equal(config.load_system().matrix, np.diag([3.0, 5.0]).astype(complex))

    pauli_path = tmp_path / "pauli.txt"
    pauli_path.write_text("1.0 Z\n", encoding="utf-8")
    config = RunConfig(system="pauli", system_file=str(pauli_path))
    assert np.array_equal(config.load_system().matrix, np.diag([1.0, -1.0]).astype(complex))

    config = RunConfig()
    expected = random_system(4, 7, spectral_window=(15.9, 19.1), alpha=-100.0)
    assert np.array_equal(config.load_system().matrix, expected.matrix)


def test_atomic_write_creates_parents_and_leaves_no_droppings(tmp_path):
    target = tmp_path / "deep" / "dir" / "out.txt"
    write_text_atomic(target, "payload\n")
    assert target.read_text(encoding="utf-8") == "payload\n"
    assert [p.name for p in target.parent.iterdir()] == ["out.txt"]


def test_atomic_write_failure_leaves_no_partial_file(tmp_path):
    target = tmp_path / "out.txt"
    with pytest.raises(TypeError):
        write_text_atomic(target, 12345)  # not a string: the write itself fails
    assert list(tmp_path.iterdir()) == []


def sample_sweep(measurement=None):
    sys = random_system(1, seed=2)
    config = SweepConfig(c=0.01, tau=5.0, alpha=-1.0)
    if measurement is not None:
        config = SweepConfig(c=0.01, tau=5.0, alpha=-1.0, measurement=measurement)
    return run_sweep(sys, make_grid(0.0, 2.0, 8), config)


def test_sweep_csv_round_trip_exact():
    result = sample_sweep()
    text = sweep_csv(result)
    assert text.startswith("omega,p_decay\n")
    grid, decay = parse_sweep_csv(text)
    assert np.array_equal(decay, result.decay)
    assert grid.m == result.grid.m
    assert abs(grid.omega_min - result.grid.omega_min) <= 1e-12
    assert abs(grid.omega_max - result.grid.omega_max) <= 1e-12
    assert sweep_csv(result) == text  # serialization is deterministic


def test_sweep_csv_includes_shot_columns():
    result = sample_sweep(ShotSampling(count=300, seed=5))
    text = sweep_csv(result)
    assert text.startswith("omega,p_decay,shots,successes\n")
    rows = text.strip().splitlines()[1:]
    assert all(row.split(",")[2] == "300" for row in rows)
    grid, decay = parse_sweep_csv(text)
    assert np.array_equal(decay, result.decay)
    assert grid.m == result.grid.m


def test_parse_sweep_csv_rejects_malformed_input():
    with pytest.raises(ParseError, match="line 1"):
        parse_sweep_csv("frequency,decay\n1.0,0.5\n2.0,0.6")
    with pytest.raises(ParseError):
        parse_sweep_csv("omega,p_decay\n1.0,0.5")  # spacing unknowable
    with pytest.raises(ParseError, match="line 3"):
        parse_sweep_csv("omega,p_decay\n1.0,0.5\n2.0,0.6,7")
    with pytest.raises(ParseError, match="line 3"):
        parse_sweep_csv("omega,p_decay\n1.0,0.5\n2.0,bad")
    with pytest.raises(ParseError):
        parse_sweep_csv("omega,p_decay\n1.0,0.5\n1.1,0.6\n1.3,0.7")  # non-uniform


def test_peaks_json_structure():
    peaks = [
        Peak(k_max=3, omega_peak=1.05, height=0.9, estimated_energy=-98.95, half_width=0.01)
    ]
    payload = json.loads(peaks_json(peaks))
    assert payload == {
        "peaks": [
            {
                "k_max": 3,
                "omega_peak": 1.05,
                "height": 0.9,
                "estimated_energy": -98.95,
                "half_width": 0.01,
            }
        ]
    }
    assert json.loads(peaks_json([])) == {"peaks": []}


def test_comparison_json_carries_causes():
    vecs = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)
    sys = SystemHamiltonian.from_eigensystem(np.array([1.0, 2.0]), vecs)
    oracle = diagonalize_system(sys, alpha=0.0)
    peaks = [Peak(k_max=0, omega_peak=1.0, height=0.9, estimated_energy=1.0, half_width=0.01)]
    report = compare_spectrum(peaks, oracle, tol=0.01)
    explanations = explain_misses(
        report, oracle, c=0.01, tau=100.0, grid_delta=1e-3, height_threshold=0.05
    )
    payload = json.loads(comparison_json(report, oracle, explanations))
    assert payload["tol"] == 0.01
    assert len(payload["matched"]) == 1
    assert payload["matched"][0]["oracle_index"] == 0
    assert "weak-component-sum" in payload["missing"][0]["causes"]
    assert payload["spurious"] == []


def test_refinement_json_lists_jobs():
    result = sample_sweep()
    jobs = plan_refinement(result, expected_count=2, peaks=[])
    payload = json.loads(refinement_json(jobs))
    assert [job["rung"] for job in payload["jobs"]] == [
        "densify",
        "halve-coupling",
        "extend-time",
    ]
    assert payload["jobs"][0]["m"] == jobs[0].m


def test_transitions_csv_round_trips_floats():
    sys = SystemHamiltonian.from_matrix(random_hermitian(4, 21))
    table = transition_table(sys, c=0.002, alpha=-100.0)
    text = transitions_csv(table)
    lines = text.strip().splitlines()
    assert lines[0] == "j,energy,re_sum_d,im_sum_d,strength,transition_frequency"
    assert len(lines) == 1 + 4
    for row, expected in zip(lines[1:], table.rows):
        fields = row.split(",")
        assert int(fields[0]) == expected.index
        assert float(fields[1]) == expected.energy
        assert float(fields[4]) == expected.strength
        assert float(fields[5]) == expected.transition_frequency
