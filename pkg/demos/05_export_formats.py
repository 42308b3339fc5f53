"""Every circuit travels: JSON documents, OpenQASM 2.0, and state dumps.

The JSON document is the canonical interchange form.  It carries the layout
parameters, the full register table, integrity metrics (re-checked on load),
the moment-by-moment gate list, and optionally the payload matrices.  Emission
is deterministic: parse(emit(c)) re-emits byte-for-byte identical text.

The QASM emission targets portability — controlled swaps come with a local
gate definition instead of relying on a particular qelib revision, and each
payload block becomes an `opaque` declaration.

The same operations are available from the command line:

    qramforge synth --family qram --n 2 --m 1 --include-matrices --out c.json
    qramforge simulate --circuit c.json --address 10 --mem 0,0,1,0
    qramforge verify --family qram --n 2 --m 1 --check all
    qramforge analyze --n 8 --m 16 --csv
"""

import json

from qramforge import (
    basis_state,
    build_qram_instance,
    emit_json,
    emit_qasm,
    parse_document,
    parse_state,
    run_circuit,
    serialize_state,
    synth_access,
)

instance = build_qram_instance(n=2, m=1)
circuit = synth_access(instance.layout(), instance.unitaries)

# --- JSON --------------------------------------------------------------------
text = emit_json(circuit, instance.unitaries)
document = json.loads(text)
print("document sections:", ", ".join(document))
print("format tag:       ", document["format"])
print("stated metrics:   ", json.dumps(document["metrics"]["gate_counts"]))
print("document size:    ", len(text), "bytes")

parsed = parse_document(text)
print("parses back to the same circuit: ", parsed.circuit == circuit)
print("re-emission is byte-identical:   ", emit_json(parsed.circuit, parsed.unitaries) == text)

# The parser validates everything it reads; a tampered document is rejected
# with a precise path.
tampered = json.loads(text)
tampered["metrics"]["depth"] = 3
try:
    parse_document(json.dumps(tampered))
except Exception as exc:
    print("tampered depth rejected:          ", exc)
print()

# --- QASM ---------------------------------------------------------------------
qasm = emit_qasm(circuit)
print("QASM header and declarations:")
for line in qasm.splitlines():
    if line.startswith(("OPENQASM", "include", "gate", "opaque")):
        print("  ", line)
print()

# --- states --------------------------------------------------------------------
final = run_circuit(
    basis_state(circuit.layout, "10", 0, {"00": 0, "01": 0, "10": 1, "11": 0}),
    circuit,
    instance.unitaries,
)
dump = serialize_state(final)
print("final state as JSON:")
print(dump)
print("round-trips:", parse_state(dump).amps == final.amps)
