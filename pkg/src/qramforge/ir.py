"""Moment-structured circuit representation.

A circuit is a list of *moments*; each moment is a set of gates acting on
pairwise-disjoint qubits (controls count as acting).  Appending with the
default ``asap`` policy places a gate in the earliest moment after the last
use of any of its qubits, so structural depth falls out of construction
order; ``new_moment`` forces a fresh moment, and :meth:`Circuit.barrier`
fences all later gates behind everything appended so far.

Gate vocabulary: X, CNOT, Toffoli, Fredkin (all self-inverse), plus an
opaque single-controlled unitary block labelled by the leaf whose payload it
applies.  Opaque blocks carry a ``declared_depth`` that stands in for the
depth of whatever decomposition the target machine would substitute; circuit
depth is the sum over moments of the largest declared depth in the moment
(elementary gates count 1).
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidParameterError, StructuralError
from .tree import RegisterMap


class GateKind(str, Enum):
    X = "x"
    CNOT = "cx"
    TOFFOLI = "ccx"
    FREDKIN = "cswap"
    OPAQUE = "cu"


_ARITY = {
    GateKind.X: (0, 1),
    GateKind.CNOT: (1, 1),
    GateKind.TOFFOLI: (2, 1),
    GateKind.FREDKIN: (1, 2),
}


@dataclass(frozen=True, slots=True)
class Gate:
    """One gate instance over physical qubit indices.

    ``leaf``, ``dagger`` and ``declared_depth`` are meaningful only for
    :data:`GateKind.OPAQUE`; elementary gates pin them to their defaults.
    """

    kind: GateKind
    controls: tuple[int, ...]
    targets: tuple[int, ...]
    leaf: str | None = None
    dagger: bool = False
    declared_depth: int = 1

    def __post_init__(self) -> None:
        if self.kind is GateKind.OPAQUE:
            if len(self.controls) != 1 or not self.targets:
                raise StructuralError("an opaque block takes one control and at least one target")
            if self.leaf is None:
                raise StructuralError("an opaque block must name the leaf it applies")
            if not isinstance(self.declared_depth, int) or self.declared_depth < 1:
                raise InvalidParameterError(
                    f"declared depth must be a positive integer, got {self.declared_depth!r}"
                )
        else:
            expected = _ARITY[self.kind]
            if (len(self.controls), len(self.targets)) != expected:
                raise StructuralError(
                    f"{self.kind.value} takes {expected[0]} control(s) and {expected[1]} target(s), "
                    f"got {len(self.controls)} and {len(self.targets)}"
                )
            if self.leaf is not None or self.dagger or self.declared_depth != 1:
                raise StructuralError(
                    f"{self.kind.value} is elementary; leaf/dagger/declared_depth are fixed"
                )
        qubits = self.controls + self.targets
        for q in qubits:
            if not isinstance(q, int) or q < 0:
                raise InvalidParameterError(f"qubit indices are non-negative integers, got {q!r}")
        if len(set(qubits)) != len(qubits):
            raise StructuralError(f"gate qubits must be distinct, got {qubits}")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def x(target: int) -> "Gate":
        return Gate(GateKind.X, (), (target,))

    @staticmethod
    def cnot(control: int, target: int) -> "Gate":
        return Gate(GateKind.CNOT, (control,), (target,))

    @staticmethod
    def toffoli(control_a: int, control_b: int, target: int) -> "Gate":
        return Gate(GateKind.TOFFOLI, (control_a, control_b), (target,))

    @staticmethod
    def fredkin(control: int, target_a: int, target_b: int) -> "Gate":
        return Gate(GateKind.FREDKIN, (control,), (target_a, target_b))

    @staticmethod
    def controlled_opaque(
        control: int,
        targets: Iterable[int],
        leaf: str,
        *,
        dagger: bool = False,
        declared_depth: int = 1,
    ) -> "Gate":
        return Gate(
            GateKind.OPAQUE,
            (control,),
            tuple(targets),
            leaf=leaf,
            dagger=dagger,
            declared_depth=declared_depth,
        )

    # -- properties ----------------------------------------------------------

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    def adjoint(self) -> "Gate":
        """The inverse gate: elementary kinds are self-inverse; opaque blocks
        flip their dagger flag."""
        if self.kind is not GateKind.OPAQUE:
            return self
        return Gate(
            self.kind,
            self.controls,
            self.targets,
            leaf=self.leaf,
            dagger=not self.dagger,
            declared_depth=self.declared_depth,
        )


class Moment:
    """An ordered set of gates on pairwise-disjoint qubits."""

    __slots__ = ("gates", "_used")

    def __init__(self, gates: Iterable[Gate] = ()):
        self.gates: list[Gate] = []
        self._used: set[int] = set()
        for gate in gates:
            self.add(gate)

    def add(self, gate: Gate) -> None:
        overlap = self._used.intersection(gate.qubits)
        if overlap:
            raise StructuralError(
                f"qubit(s) {sorted(overlap)} already used in this moment"
            )
        self.gates.append(gate)
        self._used.update(gate.qubits)

    @property
    def used_qubits(self) -> frozenset[int]:
        return frozenset(self._used)

    @property
    def declared_depth(self) -> int:
        """Contribution of this moment to circuit depth."""
        return max((g.declared_depth for g in self.gates), default=1)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Moment):
            return NotImplemented
        return self.gates == other.gates

    def __repr__(self) -> str:
        return f"Moment({len(self.gates)} gates)"


class Circuit:
    """A moment list bound to a :class:`~qramforge.tree.RegisterMap`.

    ``metadata`` is a free-form dict (phase names, synthesis options, ...)
    that never participates in equality.
    """

    def __init__(self, layout: RegisterMap):
        self.layout = layout
        self.moments: list[Moment] = []
        self.metadata: dict = {}
        self._frontier: dict[int, int] = {}
        self._floor = 0

    # -- construction --------------------------------------------------------

    def append(self, gate: Gate, policy: str = "asap") -> "Circuit":
        for q in gate.qubits:
            if q >= self.layout.total_qubits:
                raise StructuralError(
                    f"qubit {q} is outside the layout ({self.layout.total_qubits} qubits)"
                )
        if policy == "asap":
            index = self._floor
            for q in gate.qubits:
                earliest = self._frontier.get(q, -1) + 1
                if earliest > index:
                    index = earliest
        elif policy == "new_moment":
            index = len(self.moments)
        else:
            raise InvalidParameterError(f"unknown placement policy {policy!r}")
        while len(self.moments) <= index:
            self.moments.append(Moment())
        self.moments[index].add(gate)
        for q in gate.qubits:
            self._frontier[q] = index
        return self

    def extend(self, gates: Iterable[Gate], policy: str = "asap") -> "Circuit":
        for gate in gates:
            self.append(gate, policy)
        return self

    def barrier(self) -> "Circuit":
        """Fence: every gate appended later lands strictly after existing moments."""
        self._floor = len(self.moments)
        return self

    @classmethod
    def _from_moments(cls, layout: RegisterMap, moments: Iterable[Iterable[Gate]]) -> "Circuit":
        circuit = cls(layout)
        for gates in moments:
            circuit.moments.append(Moment(gates))
        for index, moment in enumerate(circuit.moments):
            for q in moment.used_qubits:
                if q >= layout.total_qubits:
                    raise StructuralError(
                        f"qubit {q} is outside the layout ({layout.total_qubits} qubits)"
                    )
                circuit._frontier[q] = index
        circuit._floor = len(circuit.moments)
        return circuit

    # -- derived circuits ------------------------------------------------------

    def adjoint(self) -> "Circuit":
        """The exact inverse: moments reversed, each gate replaced by its adjoint."""
        out = Circuit._from_moments(
            self.layout,
            ([g.adjoint() for g in moment] for moment in reversed(self.moments)),
        )
        out.metadata = dict(self.metadata)
        return out

    def copy(self) -> "Circuit":
        out = Circuit._from_moments(self.layout, (list(m) for m in self.moments))
        out.metadata = dict(self.metadata)
        return out

    # -- metrics ----------------------------------------------------------------

    @property
    def num_gates(self) -> int:
        return sum(len(m) for m in self.moments)

    @property
    def num_moments(self) -> int:
        return len(self.moments)

    @property
    def depth(self) -> int:
        return sum(m.declared_depth for m in self.moments)

    @property
    def width(self) -> int:
        """Largest number of gates executing in any one moment."""
        return max((len(m) for m in self.moments), default=0)

    def gate_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for moment in self.moments:
            for gate in moment:
                counts[gate.kind.value] = counts.get(gate.kind.value, 0) + 1
        return counts

    def all_gates(self) -> Iterator[Gate]:
        for moment in self.moments:
            yield from moment

    # -- identity -----------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return self.layout == other.layout and self.moments == other.moments

    def __repr__(self) -> str:
        return (
            f"Circuit({self.num_gates} gates in {self.num_moments} moments, "
            f"depth {self.depth}, on {self.layout.total_qubits} qubits)"
        )


def concat(first: Circuit, second: Circuit, *rest: Circuit) -> Circuit:
    """Sequential composition preserving each part's moment structure.

    All parts must share one layout.  The result's moment list is the plain
    concatenation of the parts' moment lists, so its depth is exactly the sum
    of the parts' depths (in particular, never more).
    """
    parts = (first, second, *rest)
    for part in parts[1:]:
        if part.layout != first.layout:
            raise StructuralError("cannot concatenate circuits over different layouts")
    out = Circuit._from_moments(first.layout, (list(m) for part in parts for m in part.moments))
    return out
