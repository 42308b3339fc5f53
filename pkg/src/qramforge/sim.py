"""Sparse statevector simulation.

A state is a dictionary from basis keys to complex amplitudes, where bit
``q`` of a key is the value of physical qubit ``q`` (see the numbering
contract in :mod:`qramforge.tree`).  The access circuit is almost entirely
classical routing — X, CNOT, Toffoli, and Fredkin merely permute basis keys —
so the support never grows under those gates and simulation cost tracks the
number of amplitudes, not the number of qubits.  Opaque blocks are the one
genuinely quantum step: amplitudes with the control bit set are grouped by
their non-target bits and each group is multiplied by the block's dense
matrix.

Amplitudes with magnitude at most :data:`PRUNE_TOL` are dropped when a dense
block produces them; exact zeros from routing never arise.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    ConfigurationError,
    InvalidParameterError,
    ShapeError,
    SimulationError,
    StructuralError,
)
from .ir import Circuit, Gate, GateKind
from .tree import RegisterMap, _check_label

#: Magnitude below which amplitudes produced by a dense block are discarded.
PRUNE_TOL = 1e-14

#: Allowed drift of the state norm across a full circuit run.
NORM_TOL = 1e-10

#: Allowed deviation of ``U^dagger U`` from the identity.
UNITARITY_TOL = 1e-10


class UnitarySpec:
    """A leaf's payload unitary: dense matrix plus a declared block depth.

    The matrix acts on ``res_z ++ mem_z`` in little-endian order: basis index
    bit ``j`` is ``res_z[j]`` for ``j < m`` and ``mem_z[j - m]`` above.  The
    matrix is checked for unitarity on construction and stored read-only.
    """

    __slots__ = ("leaf", "matrix", "declared_depth")

    def __init__(self, leaf: str, matrix, declared_depth: int = 1):
        _check_label(leaf)
        matrix = np.array(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ShapeError(
                f"unitary for leaf {leaf!r} must be a square matrix, got shape {matrix.shape}",
                leaf=leaf,
            )
        dim = matrix.shape[0]
        if dim < 2 or dim & (dim - 1):
            raise ShapeError(
                f"unitary for leaf {leaf!r} has dimension {dim}, not a power of two >= 2",
                leaf=leaf,
            )
        deviation = float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(dim))))
        if deviation > UNITARITY_TOL:
            raise InvalidParameterError(
                f"matrix for leaf {leaf!r} is not unitary (deviation {deviation:.3e})"
            )
        if not isinstance(declared_depth, int) or declared_depth < 1:
            raise InvalidParameterError(
                f"declared depth must be a positive integer, got {declared_depth!r}"
            )
        matrix.setflags(write=False)
        self.leaf = leaf
        self.matrix = matrix
        self.declared_depth = declared_depth

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UnitarySpec):
            return NotImplemented
        return (
            self.leaf == other.leaf
            and self.declared_depth == other.declared_depth
            and self.matrix.shape == other.matrix.shape
            and bool(np.array_equal(self.matrix, other.matrix))
        )

    def __repr__(self) -> str:
        return f"UnitarySpec(leaf={self.leaf!r}, dim={self.dim}, declared_depth={self.declared_depth})"


class SparseState:
    """A sparse statevector: ``{basis key -> amplitude}``."""

    __slots__ = ("num_qubits", "amps")

    def __init__(self, num_qubits: int, amps: Mapping[int, complex] | None = None):
        if not isinstance(num_qubits, int) or num_qubits < 1:
            raise InvalidParameterError(f"need at least one qubit, got {num_qubits!r}")
        self.num_qubits = num_qubits
        self.amps: dict[int, complex] = {}
        if amps:
            limit = 1 << num_qubits
            for key, amp in amps.items():
                if not isinstance(key, int) or not 0 <= key < limit:
                    raise InvalidParameterError(
                        f"basis key {key!r} out of range for {num_qubits} qubits"
                    )
                self.amps[key] = complex(amp)

    def copy(self) -> "SparseState":
        out = SparseState(self.num_qubits)
        out.amps = dict(self.amps)
        return out

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self.amps)

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(a) ** 2 for a in self.amps.values())))

    def inner(self, other: "SparseState") -> complex:
        """The inner product ``<self|other>``."""
        if self.num_qubits != other.num_qubits:
            raise InvalidParameterError("states live on different numbers of qubits")
        small, big, conj_small = (
            (self.amps, other.amps, True)
            if len(self.amps) <= len(other.amps)
            else (other.amps, self.amps, False)
        )
        total = 0j
        for key, amp in small.items():
            mate = big.get(key)
            if mate is not None:
                total += amp.conjugate() * mate if conj_small else mate.conjugate() * amp
        return total

    def fidelity(self, other: "SparseState") -> float:
        """``|<self|other>|**2`` (meaningful for normalized states)."""
        return abs(self.inner(other)) ** 2

    def prune(self, tol: float = PRUNE_TOL) -> "SparseState":
        self.amps = {k: a for k, a in self.amps.items() if abs(a) > tol}
        return self

    def __len__(self) -> int:
        return len(self.amps)

    def __repr__(self) -> str:
        return f"SparseState({len(self.amps)} basis terms on {self.num_qubits} qubits)"


def _register_value(value: int | str, width: int, what: str) -> int:
    """Normalize a register assignment (int, or MSB-first bit string) to an int."""
    if isinstance(value, str):
        if len(value) != width or any(c not in "01" for c in value):
            raise InvalidParameterError(
                f"{what} must be a bit string of length {width}, got {value!r}"
            )
        return int(value, 2) if width else 0
    if not isinstance(value, int) or not 0 <= value < (1 << width):
        raise InvalidParameterError(f"{what} must lie in [0, {1 << width}), got {value!r}")
    return value


def _scatter(value: int, span: Sequence[int]) -> int:
    """Spread the bits of ``value`` over the physical indices in ``span``."""
    key = 0
    for j, q in enumerate(span):
        if (value >> j) & 1:
            key |= 1 << q
    return key


def basis_state(
    layout: RegisterMap,
    address: int | str = 0,
    result: int | str = 0,
    mem: Mapping[str, int | str] | Sequence[int | str] | None = None,
) -> SparseState:
    """The computational basis state with the given data-register contents.

    All ancillas start at 0.  ``address`` and ``result`` may be ints or
    MSB-first bit strings of exactly the register width.  ``mem`` assigns the
    per-leaf memory registers, either as a mapping from leaf labels or as a
    sequence covering every leaf in ascending order; omitted leaves are 0.
    """
    key = _scatter(_register_value(address, layout.n, "address"), layout.address_qubits)
    key |= _scatter(_register_value(result, layout.m, "result"), layout.result_qubits)
    if mem is not None:
        if isinstance(mem, Mapping):
            items = mem.items()
        else:
            mem = list(mem)
            if len(mem) != len(layout.leaves):
                raise InvalidParameterError(
                    f"expected one memory value per leaf ({len(layout.leaves)}), got {len(mem)}"
                )
            items = zip(layout.leaves, mem)
        for leaf, value in items:
            span = layout.mem(leaf)
            key |= _scatter(_register_value(value, len(span), f"mem[{leaf}]"), span)
    return SparseState(layout.total_qubits, {key: 1.0 + 0j})


def superpose(terms: Iterable[tuple[complex, SparseState]]) -> SparseState:
    """The linear combination ``sum(amp * state)``.

    The amplitude vector must have unit norm (within :data:`NORM_TOL`); the
    result is normalized iff the input states are orthonormal.
    """
    terms = [(complex(amp), state) for amp, state in terms]
    if not terms:
        raise InvalidParameterError("need at least one term")
    sizes = {state.num_qubits for _, state in terms}
    if len(sizes) != 1:
        raise InvalidParameterError("all terms must live on the same number of qubits")
    weight = sum(abs(amp) ** 2 for amp, _ in terms)
    if abs(weight - 1.0) > NORM_TOL:
        raise InvalidParameterError(
            f"term amplitudes must form a unit vector, got squared norm {weight:.12f}"
        )
    out = SparseState(sizes.pop())
    for amp, state in terms:
        for key, value in state.amps.items():
            out.amps[key] = out.amps.get(key, 0j) + amp * value
    return out.prune()


def _apply_opaque(
    state: SparseState, gate: Gate, unitaries: Mapping[str, UnitarySpec] | None
) -> SparseState:
    if unitaries is None or gate.leaf not in unitaries:
        raise ConfigurationError(
            f"no unitary available for opaque block at leaf {gate.leaf!r}"
        )
    spec = unitaries[gate.leaf]
    if spec.num_qubits != len(gate.targets):
        raise ShapeError(
            f"unitary for leaf {gate.leaf!r} acts on {spec.num_qubits} qubit(s), "
            f"gate has {len(gate.targets)} target(s)",
            leaf=gate.leaf,
        )
    matrix = spec.matrix.conj().T if gate.dagger else spec.matrix
    dim = spec.dim
    control = 1 << gate.controls[0]
    targets = gate.targets
    new_amps: dict[int, complex] = {}
    groups: dict[int, np.ndarray] = {}
    for key, amp in state.amps.items():
        if not key & control:
            new_amps[key] = amp
            continue
        index = 0
        rest = key
        for j, q in enumerate(targets):
            if (key >> q) & 1:
                index |= 1 << j
                rest &= ~(1 << q)
        groups.setdefault(rest, np.zeros(dim, dtype=complex))[index] = amp
    for rest, vec in groups.items():
        out = matrix @ vec
        for index in range(dim):
            amp = out[index]
            if abs(amp) > PRUNE_TOL:
                new_amps[rest | _scatter(index, targets)] = complex(amp)
    result = SparseState(state.num_qubits)
    result.amps = new_amps
    return result


def apply_gate(
    state: SparseState, gate: Gate, unitaries: Mapping[str, UnitarySpec] | None = None
) -> SparseState:
    """Apply one gate, returning a new state (the input is untouched)."""
    kind = gate.kind
    if kind is GateKind.OPAQUE:
        return _apply_opaque(state, gate, unitaries)
    amps = state.amps
    new_amps: dict[int, complex] = {}
    if kind is GateKind.X:
        target = 1 << gate.targets[0]
        for key, amp in amps.items():
            new_amps[key ^ target] = amp
    elif kind is GateKind.CNOT:
        control = 1 << gate.controls[0]
        target = 1 << gate.targets[0]
        for key, amp in amps.items():
            new_amps[key ^ target if key & control else key] = amp
    elif kind is GateKind.TOFFOLI:
        control_a = 1 << gate.controls[0]
        control_b = 1 << gate.controls[1]
        target = 1 << gate.targets[0]
        for key, amp in amps.items():
            new_amps[key ^ target if key & control_a and key & control_b else key] = amp
    elif kind is GateKind.FREDKIN:
        control = 1 << gate.controls[0]
        qubit_a, qubit_b = gate.targets
        mask = (1 << qubit_a) | (1 << qubit_b)
        for key, amp in amps.items():
            if key & control and ((key >> qubit_a) ^ (key >> qubit_b)) & 1:
                key ^= mask
            new_amps[key] = amp
    else:  # pragma: no cover - the GateKind enum is closed
        raise StructuralError(f"cannot simulate gate kind {kind!r}")
    result = SparseState(state.num_qubits)
    result.amps = new_amps
    return result


def run_circuit(
    state: SparseState,
    circuit: Circuit,
    unitaries: Mapping[str, UnitarySpec] | None = None,
) -> SparseState:
    """Run every moment of ``circuit`` on ``state`` and return the final state.

    The state must live on exactly the circuit's qubit count; the final norm
    is checked against the initial one (drift beyond :data:`NORM_TOL` raises
    :class:`~qramforge.errors.SimulationError`).
    """
    if state.num_qubits != circuit.layout.total_qubits:
        raise StructuralError(
            f"state has {state.num_qubits} qubits, circuit expects "
            f"{circuit.layout.total_qubits}"
        )
    norm_before = state.norm()
    current = state
    for moment in circuit.moments:
        for gate in moment:
            current = apply_gate(current, gate, unitaries)
    drift = abs(current.norm() - norm_before)
    if drift > NORM_TOL:
        raise SimulationError(f"state norm drifted by {drift:.3e} during simulation")
    return current
