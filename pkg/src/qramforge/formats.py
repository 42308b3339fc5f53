"""Serialization: circuit JSON documents, QASM 2.0 text, and state dumps.

The JSON format (``qramforge-circuit/1``) is canonical: emitting a parsed
document reproduces the original bytes.  A document carries the layout
parameters, the full register table (kind, owning node, first physical
index, size), derived metrics, the moment-by-moment gate list, and
optionally the dense payload matrices.

QASM output targets OpenQASM 2.0.  Every *allocated* register becomes a
``qreg`` (aliased registers reuse their parents' wires and are not declared);
Fredkin gates use a locally defined ``fredkin`` gate so the file does not
depend on which ``qelib1.inc`` revision is installed; payload blocks appear
as ``opaque`` declarations named after their leaf.  Moment boundaries are
kept as comments.
"""

from __future__ import annotations

import json
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from .errors import SchemaError
from .ir import Circuit, Gate, GateKind
from .sim import SparseState, UnitarySpec
from .tree import RegisterMap

FORMAT_VERSION = "qramforge-circuit/1"
STATE_FORMAT_VERSION = "qramforge-state/1"

_PARAMETER_KEYS = ("phase", "variant", "include_preparation", "instance")


# ---------------------------------------------------------------------------
# helpers shared by the emitters
# ---------------------------------------------------------------------------


def _register_table(layout: RegisterMap) -> list[dict]:
    """Allocated registers as ``{kind, node, start, size}`` rows, in physical
    order (aliases do not appear; they own no qubits)."""
    rows: list[dict] = []
    for index, qid in enumerate(layout.qubit_at):
        if qid.index == 0:
            rows.append({"kind": qid.kind, "node": qid.node, "start": index, "size": 1})
        else:
            rows[-1]["size"] += 1
    return rows


def _metrics(circuit: Circuit) -> dict:
    return {
        "total_qubits": circuit.layout.total_qubits,
        "depth": circuit.depth,
        "width": circuit.width,
        "num_moments": circuit.num_moments,
        "num_gates": circuit.num_gates,
        "gate_counts": {kind: count for kind, count in sorted(circuit.gate_counts().items())},
    }


def _gate_record(gate: Gate) -> dict:
    record: dict = {
        "kind": gate.kind.value,
        "controls": list(gate.controls),
        "targets": list(gate.targets),
    }
    if gate.kind is GateKind.OPAQUE:
        record["leaf"] = gate.leaf
        record["dagger"] = gate.dagger
        record["declared_depth"] = gate.declared_depth
    return record


def _matrix_record(spec: UnitarySpec) -> dict:
    return {
        "declared_depth": spec.declared_depth,
        "matrix": [[[float(v.real), float(v.imag)] for v in row] for row in spec.matrix],
    }


# ---------------------------------------------------------------------------
# JSON emission
# ---------------------------------------------------------------------------


def emit_json(
    circuit: Circuit,
    unitaries: Mapping[str, UnitarySpec] | None = None,
    *,
    indent: int = 2,
) -> str:
    """Serialize a circuit (and optionally its payload matrices) to JSON."""
    layout = circuit.layout
    parameters: dict = {
        "n": layout.n,
        "m": layout.m,
        "k": list(layout.k),
        "fanout_block": layout.fanout_block,
    }
    for key in _PARAMETER_KEYS:
        if key in circuit.metadata:
            parameters[key] = circuit.metadata[key]
    document = {
        "format": FORMAT_VERSION,
        "parameters": parameters,
        "registers": _register_table(layout),
        "metrics": _metrics(circuit),
        "moments": [[_gate_record(g) for g in moment] for moment in circuit.moments],
    }
    if unitaries is not None:
        document["matrices"] = {
            leaf: _matrix_record(unitaries[leaf]) for leaf in sorted(unitaries)
        }
    return json.dumps(document, indent=indent)


# ---------------------------------------------------------------------------
# JSON parsing
# ---------------------------------------------------------------------------


def _expect(condition: bool, path: str, message: str) -> None:
    if not condition:
        raise SchemaError(f"{path}: {message}")


def _expect_int(value, path: str, minimum: int | None = None) -> int:
    _expect(isinstance(value, int) and not isinstance(value, bool), path, "expected an integer")
    if minimum is not None:
        _expect(value >= minimum, path, f"expected an integer >= {minimum}")
    return value


def _parse_gate(record, path: str) -> Gate:
    _expect(isinstance(record, dict), path, "expected a gate object")
    try:
        kind = GateKind(record.get("kind"))
    except ValueError:
        raise SchemaError(f"{path}.kind: unknown gate kind {record.get('kind')!r}") from None
    for field in ("controls", "targets"):
        _expect(
            isinstance(record.get(field), list)
            and all(isinstance(q, int) and not isinstance(q, bool) for q in record[field]),
            f"{path}.{field}",
            "expected a list of integers",
        )
    allowed = {"kind", "controls", "targets"}
    kwargs = {}
    if kind is GateKind.OPAQUE:
        allowed |= {"leaf", "dagger", "declared_depth"}
        _expect(isinstance(record.get("leaf"), str), f"{path}.leaf", "expected a node label string")
        _expect(isinstance(record.get("dagger", False), bool), f"{path}.dagger", "expected a boolean")
        kwargs = {
            "leaf": record["leaf"],
            "dagger": record.get("dagger", False),
            "declared_depth": _expect_int(record.get("declared_depth", 1), f"{path}.declared_depth", 1),
        }
    unknown = set(record) - allowed
    _expect(not unknown, path, f"unknown field(s) {sorted(unknown)}")
    try:
        return Gate(kind, tuple(record["controls"]), tuple(record["targets"]), **kwargs)
    except Exception as exc:
        raise SchemaError(f"{path}: {exc}") from exc


@dataclass
class CircuitDocument:
    """A fully parsed document: the circuit plus everything else it carried."""

    circuit: Circuit
    unitaries: dict[str, UnitarySpec] | None
    parameters: dict


def parse_document(text: str) -> CircuitDocument:
    """Parse and validate a ``qramforge-circuit/1`` document."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    _expect(isinstance(raw, dict), "$", "expected a JSON object")
    _expect(raw.get("format") == FORMAT_VERSION, "format", f"expected {FORMAT_VERSION!r}")
    for key in ("parameters", "registers", "metrics", "moments"):
        _expect(key in raw, key, "missing required section")

    params = raw["parameters"]
    _expect(isinstance(params, dict), "parameters", "expected an object")
    n = _expect_int(params.get("n"), "parameters.n", 1)
    m = _expect_int(params.get("m"), "parameters.m", 1)
    k = params.get("k")
    _expect(
        isinstance(k, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in k),
        "parameters.k",
        "expected a list of integers",
    )
    fanout_block = params.get("fanout_block")
    if fanout_block is not None:
        fanout_block = _expect_int(fanout_block, "parameters.fanout_block", 1)
    try:
        layout = RegisterMap(n, m, k, fanout_block=fanout_block)
    except Exception as exc:
        raise SchemaError(f"parameters: {exc}") from exc

    _expect(isinstance(raw["registers"], list), "registers", "expected a list")
    expected_rows = _register_table(layout)
    actual_rows = raw["registers"]
    _expect(
        len(actual_rows) == len(expected_rows),
        "registers",
        f"expected {len(expected_rows)} rows for these parameters, got {len(actual_rows)}",
    )
    for i, (actual, expected) in enumerate(zip(actual_rows, expected_rows)):
        _expect(actual == expected, f"registers[{i}]", f"expected {expected}, got {actual}")

    _expect(isinstance(raw["moments"], list), "moments", "expected a list")
    moments: list[list[Gate]] = []
    for i, gates in enumerate(raw["moments"]):
        _expect(isinstance(gates, list), f"moments[{i}]", "expected a list of gates")
        moments.append([_parse_gate(g, f"moments[{i}][{j}]") for j, g in enumerate(gates)])
    try:
        circuit = Circuit._from_moments(layout, moments)
    except Exception as exc:
        raise SchemaError(f"moments: {exc}") from exc
    for key in _PARAMETER_KEYS:
        if key in params:
            circuit.metadata[key] = params[key]
    circuit.metadata.setdefault("fanout_block", fanout_block)

    metrics = raw["metrics"]
    _expect(isinstance(metrics, dict), "metrics", "expected an object")
    for key, measured in _metrics(circuit).items():
        stated = metrics.get(key)
        _expect(
            stated == measured,
            f"metrics.{key}",
            f"document says {stated!r}, circuit measures {measured!r}",
        )

    unitaries = None
    if "matrices" in raw:
        _expect(isinstance(raw["matrices"], dict), "matrices", "expected an object")
        unitaries = {}
        for leaf, record in raw["matrices"].items():
            path = f"matrices.{leaf}"
            _expect(leaf in layout.leaves, path, "not a leaf of this layout")
            _expect(isinstance(record, dict), path, "expected an object")
            rows = record.get("matrix")
            _expect(isinstance(rows, list) and rows, f"{path}.matrix", "expected a non-empty list")
            try:
                matrix = np.array(
                    [[complex(pair[0], pair[1]) for pair in row] for row in rows]
                )
                unitaries[leaf] = UnitarySpec(
                    leaf,
                    matrix,
                    declared_depth=_expect_int(
                        record.get("declared_depth", 1), f"{path}.declared_depth", 1
                    ),
                )
            except SchemaError:
                raise
            except Exception as exc:
                raise SchemaError(f"{path}: {exc}") from exc

    unknown = set(raw) - {"format", "parameters", "registers", "metrics", "moments", "matrices"}
    _expect(not unknown, "$", f"unknown section(s) {sorted(unknown)}")
    return CircuitDocument(circuit=circuit, unitaries=unitaries, parameters=dict(params))


def parse_json(text: str) -> Circuit:
    """Parse a document and return just the circuit."""
    return parse_document(text).circuit


# ---------------------------------------------------------------------------
# QASM 2.0
# ---------------------------------------------------------------------------


def _qasm_register_name(kind: str, node: str) -> str:
    if kind in ("address", "result"):
        return kind
    return f"{kind}_{node}" if node else f"{kind}_eps"


def emit_qasm(circuit: Circuit) -> str:
    """Serialize a circuit as OpenQASM 2.0 text."""
    layout = circuit.layout
    rows = _register_table(layout)
    names: list[tuple[str, int]] = []
    for row in rows:
        name = _qasm_register_name(row["kind"], row["node"])
        names.extend((name, offset) for offset in range(row["size"]))

    def ref(q: int) -> str:
        name, offset = names[q]
        return f"{name}[{offset}]"

    counts = circuit.gate_counts()
    opaque_variants: list[tuple[str, bool]] = []
    seen = set()
    for gate in circuit.all_gates():
        if gate.kind is GateKind.OPAQUE and (gate.leaf, gate.dagger) not in seen:
            seen.add((gate.leaf, gate.dagger))
            opaque_variants.append((gate.leaf, gate.dagger))

    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    for row in rows:
        lines.append(f"qreg {_qasm_register_name(row['kind'], row['node'])}[{row['size']}];")
    if counts.get(GateKind.FREDKIN.value):
        lines.append("gate fredkin a,b,c { cx c,b; ccx a,b,c; cx c,b; }")
    for leaf, dagger in sorted(opaque_variants):
        arity = 1 + len(layout.res(leaf)) + len(layout.mem(leaf))
        formals = ",".join(["ctl"] + [f"q{i}" for i in range(arity - 1)])
        lines.append(f"opaque {_opaque_name(leaf, dagger)} {formals};")
    for index, moment in enumerate(circuit.moments):
        lines.append(f"// moment {index}")
        for gate in moment:
            lines.append(_qasm_gate_line(gate, ref))
    return "\n".join(lines) + "\n"


def _opaque_name(leaf: str, dagger: bool) -> str:
    return f"cu_{leaf}_dg" if dagger else f"cu_{leaf}"


def _qasm_gate_line(gate: Gate, ref) -> str:
    args = ",".join(ref(q) for q in gate.qubits)
    if gate.kind is GateKind.X:
        return f"x {args};"
    if gate.kind is GateKind.CNOT:
        return f"cx {args};"
    if gate.kind is GateKind.TOFFOLI:
        return f"ccx {args};"
    if gate.kind is GateKind.FREDKIN:
        return f"fredkin {args};"
    return f"{_opaque_name(gate.leaf, gate.dagger)} {args};"


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


def serialize_state(state: SparseState, *, indent: int = 2) -> str:
    """Dump a sparse state as JSON.  Keys are bit strings with qubit 0 as the
    rightmost character (matching the little-endian key convention)."""
    terms = [
        {
            "bits": format(key, f"0{state.num_qubits}b"),
            "re": float(amp.real),
            "im": float(amp.imag),
        }
        for key, amp in sorted(state.amps.items())
    ]
    document = {
        "format": STATE_FORMAT_VERSION,
        "num_qubits": state.num_qubits,
        "terms": terms,
    }
    return json.dumps(document, indent=indent)


def parse_state(text: str) -> SparseState:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    _expect(isinstance(raw, dict), "$", "expected a JSON object")
    _expect(raw.get("format") == STATE_FORMAT_VERSION, "format", f"expected {STATE_FORMAT_VERSION!r}")
    num_qubits = _expect_int(raw.get("num_qubits"), "num_qubits", 1)
    _expect(isinstance(raw.get("terms"), list), "terms", "expected a list")
    amps: dict[int, complex] = {}
    for i, term in enumerate(raw["terms"]):
        path = f"terms[{i}]"
        _expect(isinstance(term, dict), path, "expected an object")
        bits = term.get("bits")
        _expect(
            isinstance(bits, str) and len(bits) == num_qubits and set(bits) <= {"0", "1"},
            f"{path}.bits",
            f"expected a bit string of length {num_qubits}",
        )
        key = int(bits, 2)
        _expect(key not in amps, f"{path}.bits", "duplicate basis term")
        try:
            amps[key] = complex(float(term.get("re", 0.0)), float(term.get("im", 0.0)))
        except (TypeError, ValueError):
            raise SchemaError(f"{path}: re/im must be numbers") from None
    return SparseState(num_qubits, amps)
