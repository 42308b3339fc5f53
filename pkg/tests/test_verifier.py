"""Verifier tests: hand-checked oracle values, an independent matrix-exponential
route for the rotation family, and negative controls that must fail."""

import json

import numpy as np
import pytest
import scipy.linalg

from qramforge import (
    ConfigurationError,
    InvalidParameterError,
    SynthesisOptions,
    UnitarySpec,
    allocate_registers,
    build_custom_instance,
    build_instance,
    build_qram_instance,
    build_random_instance,
    build_rotation_instance,
    build_table_lookup_instance,
    check_linearity,
    check_proposition,
    check_variant_agreement,
    oracle_effect,
    oracle_superposition,
    extract_data_state,
    synth_access,
    SparseState,
)

X = np.array([[0.0, 1.0], [1.0, 0.0]])


# ---------------------------------------------------------------------------
# reference semantics
# ---------------------------------------------------------------------------


def test_oracle_qram_hand_values():
    inst = build_qram_instance(1, 1)
    # address 1 selects leaf "1" holding s=1; result 1 -> 1 XOR 1 = 0
    assert oracle_effect(inst, 1, 1, (0, 1)) == {(1, 0, (0, 1)): 1.0 + 0j}
    # address 0 selects leaf "0" holding s=1; result 0 -> 1; memory untouched
    assert oracle_effect(inst, 0, 0, (1, 0)) == {(0, 1, (1, 0)): 1.0 + 0j}
    # default memory is all zeros
    assert oracle_effect(inst, 0, 1) == {(0, 1, (0, 0)): 1.0 + 0j}


def test_oracle_table_lookup_hand_values():
    inst = build_table_lookup_instance(2, 2, table=[2, 3, 0, 1])
    assert oracle_effect(inst, 1, 1) == {(1, 1 ^ 3, (0, 0, 0, 0)): 1.0 + 0j}
    assert oracle_effect(inst, 2, 3) == {(2, 3, (0, 0, 0, 0)): 1.0 + 0j}
    assert inst.params["table"] == [2, 3, 0, 1]


def test_rotation_matrix_matches_matrix_exponential():
    """The rotation family's blocks must equal exp(-i*pi*mu*X) computed by an
    independent route (scipy's expm), block by block."""
    fraction_bits = 3
    inst = build_rotation_instance(1, fraction_bits)
    matrix = inst.unitaries["0"].matrix
    for s in range(1 << fraction_bits):
        mu = sum(((s >> j) & 1) * 2.0 ** -(j + 1) for j in range(fraction_bits))
        expected = scipy.linalg.expm(-1j * np.pi * mu * X)
        rows = [s << 1, (s << 1) | 1]
        block = matrix[np.ix_(rows, rows)]
        assert np.max(np.abs(block - expected)) < 1e-12
    # nothing outside the blocks: the matrix is block-diagonal in the fraction
    mask = np.ones_like(matrix, dtype=bool)
    for s in range(1 << fraction_bits):
        rows = [s << 1, (s << 1) | 1]
        mask[np.ix_(rows, rows)] = False
    assert np.max(np.abs(matrix[mask])) == 0.0


def test_oracle_rotation_amplitudes():
    inst = build_rotation_instance(1, 2)
    # mem value 2 at leaf "0": bit 1 set -> mu = 1/4
    out = oracle_effect(inst, 0, 0, (2, 0))
    mu = 0.25
    assert out[(0, 0, (2, 0))] == pytest.approx(np.cos(np.pi * mu))
    assert out[(0, 1, (2, 0))] == pytest.approx(-1j * np.sin(np.pi * mu))
    assert len(out) == 2


def test_oracle_superposition():
    inst = build_qram_instance(1, 1)
    amp = 1 / np.sqrt(2)
    out = oracle_superposition(inst, [(amp, 0), (amp, 1)], 0, (1, 0))
    assert out == {
        (0, 1, (1, 0)): pytest.approx(amp),
        (1, 0, (1, 0)): pytest.approx(amp),
    }
    # exact cancellation filters the entry out
    assert oracle_superposition(inst, [(amp, 0), (-amp, 0)]) == {}


def test_oracle_validation():
    inst = build_qram_instance(1, 1)
    with pytest.raises(InvalidParameterError):
        oracle_effect(inst, 2, 0)
    with pytest.raises(InvalidParameterError):
        oracle_effect(inst, 0, 2)
    with pytest.raises(InvalidParameterError):
        oracle_effect(inst, 0, 0, (0,))  # one value per leaf
    with pytest.raises(InvalidParameterError):
        oracle_effect(inst, 0, 0, (0, 2))  # leaf register is one bit


# ---------------------------------------------------------------------------
# instance builders
# ---------------------------------------------------------------------------


def test_random_instance_is_deterministic_and_leafwise_distinct():
    a = build_random_instance(2, 1, 1, seed=3)
    b = build_random_instance(2, 1, 1, seed=3)
    assert a.unitaries == b.unitaries
    c = build_random_instance(2, 1, 1, seed=4)
    assert a.unitaries != c.unitaries
    matrices = [a.unitaries[z].matrix for z in ("00", "01", "10", "11")]
    for i in range(len(matrices)):
        for j in range(i + 1, len(matrices)):
            assert not np.array_equal(matrices[i], matrices[j])
    for mat in matrices:
        assert np.max(np.abs(mat.conj().T @ mat - np.eye(4))) < 1e-12


def test_build_instance_dispatch():
    assert build_instance("qram", 2, 1).family == "qram"
    assert build_instance("qram", 2, 1).k == (1, 1, 1, 1)
    assert build_instance("table_lookup", 2, 2, table=[0, 1, 2, 3]).k == (0,) * 4
    rot = build_instance("rotation", 1, 2)
    assert rot.m == 1 and rot.k == (2, 2)
    rand = build_instance("random", 1, 1, 2, seed=9)
    assert rand.k == (2, 2) and rand.params["seed"] == 9
    with pytest.raises(InvalidParameterError):
        build_instance("qft", 1, 1)
    with pytest.raises(InvalidParameterError):
        build_instance("qram", 1, 1, 0)  # qram fixes k = m
    with pytest.raises(InvalidParameterError):
        build_instance("table_lookup", 1, 1, 1)  # lookup fixes k = 0
    with pytest.raises(InvalidParameterError):
        build_instance("rotation", 1, 2, 2)  # rotation derives k itself


def test_builder_validation():
    with pytest.raises(InvalidParameterError):
        build_table_lookup_instance(1, 1, table=[0, 1, 0])  # wrong length
    with pytest.raises(InvalidParameterError):
        build_table_lookup_instance(1, 1, table=[0, 2])  # entry overflows m bits
    with pytest.raises(InvalidParameterError):
        build_rotation_instance(1, 0)
    with pytest.raises(ConfigurationError):
        build_custom_instance(1, 1, 0, {"0": UnitarySpec("0", np.eye(2))})


def test_describe_mentions_sizes():
    assert build_qram_instance(2, 1).describe() == "qram(n=2, m=1, k=1)"
    text = build_instance("random", 1, 1, [1, 2], seed=5).describe()
    assert text.startswith("random(n=1, m=1, k=[1, 2]")
    assert "seed=5" in text


# ---------------------------------------------------------------------------
# bridging simulated states to reference keys
# ---------------------------------------------------------------------------


def test_extract_data_state_splits_residual():
    layout = allocate_registers(1, 1, 0)
    data_key = (1 << layout.address_qubits[0]) | (1 << layout.result_qubits[0])
    dirty_key = data_key | (1 << layout.life("0"))
    state = SparseState(layout.total_qubits, {data_key: 0.8, dirty_key: 0.6})
    data, residual = extract_data_state(state, layout)
    assert data == {(1, 1, (0, 0)): 0.8 + 0j}
    assert residual == pytest.approx(0.36)


# ---------------------------------------------------------------------------
# the checkers
# ---------------------------------------------------------------------------


def test_check_proposition_exhaustive_case_count():
    report = check_proposition(build_qram_instance(2, 1))
    # 4 addresses x every (result, mem) assignment = 4 x 32
    assert len(report.cases) == 128
    assert report.passed
    assert report.min_fidelity == pytest.approx(1.0, abs=1e-12)
    assert report.max_residual <= 1e-12
    assert report.check == "proposition"
    assert report.cases[0].label.startswith("y=00 r=0 mem=")


def test_check_proposition_custom_cases():
    report = check_proposition(build_qram_instance(1, 1), cases=[(1, 0, None)])
    assert len(report.cases) == 1
    assert report.passed


def test_check_proposition_rejects_mismatched_circuit():
    inst = build_qram_instance(1, 1)
    other = build_qram_instance(2, 1)
    circuit = synth_access(other.layout(), other.unitaries)
    with pytest.raises(InvalidParameterError):
        check_proposition(inst, circuit=circuit)


def test_check_proposition_detects_tampering():
    """Dropping the opening moment of the circuit must be caught."""
    inst = build_qram_instance(1, 1)
    circuit = synth_access(inst.layout(), inst.unitaries)
    tampered = circuit.copy()
    tampered.moments.pop(0)
    report = check_proposition(inst, circuit=tampered)
    assert not report.passed
    assert "FAIL" in report.summary()


def test_check_proposition_detects_wrong_payloads():
    """A circuit carrying one instance's payloads must not verify against
    another instance's semantics."""
    built_from = build_random_instance(1, 1, 1, seed=1)
    claimed = build_random_instance(1, 1, 1, seed=2)
    circuit = synth_access(built_from.layout(), built_from.unitaries)
    report = check_proposition(
        claimed, circuit=circuit, circuit_unitaries=built_from.unitaries
    )
    assert not report.passed


def test_report_serialization():
    report = check_proposition(build_qram_instance(1, 1))
    data = report.to_dict()
    assert data["passed"] is True
    assert data["num_cases"] == len(report.cases) == 16
    assert data["instance"] == "qram(n=1, m=1, k=1)"
    assert data["fidelity_tolerance"] == 1e-10
    assert data["residual_tolerance"] == 1e-12
    assert len(data["cases"]) == 16
    parsed = json.loads(report.to_json())
    assert parsed == data
    table = report.format_table()
    assert report.summary() in table
    assert report.summary().startswith("PASS proposition on qram")
    assert table.count("pass") >= 16


def test_check_linearity_passes():
    report = check_linearity(build_qram_instance(2, 1), num_cases=5, seed=11)
    assert report.check == "linearity"
    assert len(report.cases) == 6  # five two-term cases plus the uniform one
    assert report.passed
    assert report.cases[-1].label == "uniform over addresses"
    assert report.min_fidelity >= 1 - 1e-10


def test_check_linearity_single_address_tree():
    # n = 1 still exercises superpositions over both addresses
    report = check_linearity(build_rotation_instance(1, 1), num_cases=3, seed=2)
    assert report.passed


def test_check_variant_agreement():
    report = check_variant_agreement(build_qram_instance(2, 2), assignments=2, seed=4)
    assert report.check == "variant_agreement"
    assert report.options["block_sizes"] == [1, 2]
    # two block sizes x 4 addresses x 2 assignments
    assert len(report.cases) == 16
    assert report.passed
    assert report.cases[0].label.startswith("s=1 ")


def test_check_proposition_fanout_variant():
    report = check_proposition(
        build_qram_instance(2, 2),
        SynthesisOptions(variant="fanout", fanout_block=1),
        assignments=2,
    )
    assert report.passed
    assert report.options["variant"] == "fanout"
    assert report.options["fanout_block"] == 1
