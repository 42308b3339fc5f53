"""How the qubit bill grows with the tree.

Every register in the layout has a closed-form count:

  life   2^(n+1) - 1          one activation flag per node
  adr    2^n - n - 1          freshly allocated address ancillas
  res    m * (2^(n+1) - 2)    one result slot per non-root node
  mem    sum of the leaf widths

The adr line is the interesting one.  A node at depth d still needs n - d
address bits, which naively costs sum over levels of (n - d) 2^d qubits.  But
a left child can simply *alias* the low bits of its parent's register — only
right children allocate fresh qubits, and only as many as they will still
need.  That drops the count to sum over levels of (n - d - 1) 2^d
= 2^n - n - 1, and the hand-down swaps for aliased bits vanish entirely.

The grand total approaches (2m + 3) 2^n from below as n grows.
"""

from qramforge import allocate_registers, ancilla_counts

M = 4

print(f"ancilla budget for m = {M} result qubits, no leaf memory")
print(f"{'n':>3} {'life':>7} {'adr':>7} {'res':>8} {'ancillas':>9} "
      f"{'total':>9} {'(2m+3)2^n':>10} {'ratio':>7}")
for n in range(1, 13):
    counts = ancilla_counts(n, M, 0)
    layout = allocate_registers(n, M, 0)
    asymptote = (2 * M + 3) * 2**n
    print(
        f"{n:>3} {counts['life']:>7} {counts['adr']:>7} {counts['res']:>8} "
        f"{counts['total']:>9} {layout.total_qubits:>9} {asymptote:>10} "
        f"{layout.total_qubits / asymptote:>7.4f}"
    )

print()
print("the aliasing saving, spelled out per level (n = 4):")
n = 4
naive = fresh = 0
for level in range(n):
    nodes = 2**level
    naive_here = (n - level) * nodes
    fresh_here = (n - level - 1) * nodes
    naive += naive_here
    fresh += fresh_here
    print(
        f"  level {level}: {nodes:>2} nodes x ({n}-{level}) bits = {naive_here:>2} naive, "
        f"fresh only {fresh_here:>2}"
    )
print(f"  naive total {naive}, with aliasing {fresh} = 2^{n} - {n} - 1 "
      f"= {2**n - n - 1}")

print()
print("per-leaf memory widths may vary; mem is just their sum:")
counts = ancilla_counts(2, 1, [0, 1, 2, 3])
print(f"  k = [0, 1, 2, 3] over four leaves -> mem = {counts['mem']}")
