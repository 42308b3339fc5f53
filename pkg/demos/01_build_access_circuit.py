"""Build the tree-routed access circuit, phase by phase.

The circuit lives on a full binary tree: the root holds the address and the
result, each leaf holds one payload unitary, and every node carries a small
set of working registers.  An access runs in three phases:

* Down  — route the "life" activation flag from the root to the addressed
          leaf, peeling one address bit per level, and hand the remaining
          address bits and the result register down the same path with
          controlled swaps.
* Run   — every leaf applies its payload unitary, controlled on its life
          flag.  Only the addressed leaf is alive, so exactly one fires.
* Up    — the exact mirror of Down returns the result to the root and parks
          every ancilla back at zero.

This script synthesizes each phase for a two-bit address and prints what the
scheduler produced.
"""

from qramforge import (
    allocate_registers,
    build_qram_instance,
    concat,
    emit_qasm,
    synth_access,
    synth_down,
    synth_run,
    synth_up,
)

# A classical-memory instance: each of the four leaves stores one memory bit
# and XORs it into the result register.
instance = build_qram_instance(n=2, m=1)
layout = instance.layout()

print("register layout")
print("---------------")
for kind, count in layout.counts().items():
    print(f"  {kind:>6}: {count}")
print(f"  address qubits: {layout.address_qubits}")
print(f"  result qubits:  {layout.result_qubits}")
print(f"  life flag of the root: qubit {layout.life('')}")
print(f"  leaf '10' result slot: qubits {layout.res('10')}")
print()

down = synth_down(layout)
run = synth_run(layout, instance.unitaries)
up = synth_up(layout)

print("phase sizes")
print("-----------")
for name, circuit in (("down", down), ("run", run), ("up", up)):
    print(
        f"  {name:<5} {circuit.num_gates:>3} gates in {circuit.num_moments:>2} moments, "
        f"depth {circuit.depth}"
    )

# The up phase is literally the adjoint of the down phase — same moments,
# reversed, gate by gate.
assert up == down.adjoint()
print("\nup == adjoint(down):", up == down.adjoint())

# Concatenating the phases is exact: moments are appended, never re-packed,
# so depths add.
access = concat(down, run, up)
assert access.depth == down.depth + run.depth + up.depth
print(f"access depth {access.depth} = {down.depth} + {run.depth} + {up.depth}")

# synth_access builds the same composite in one call.
same = synth_access(layout, instance.unitaries)
print("synth_access reproduces it:", same == access)

print("\nthe first few lines of the emitted OpenQASM:")
print("-" * 44)
for line in emit_qasm(access).splitlines()[:24]:
    print(" ", line)
print("  ...")
