"""Synthesis of the Down, Run, and Up phases of the access circuit.

Down phase
----------
After a preparation ``X`` lights the root's life flag, each tree level
``k = 0 .. n-1`` routes activity one step deeper.  For a node ``x`` at level
``k`` the selector is ``adr_x[n-k-1]``, the most significant still-unconsumed
address bit:

1. copy the remaining low bits ``adr_x[0 .. n-k-2]`` into the right child's
   fresh ``adr`` register with CNOTs (the left child's register aliases those
   same qubits, so its copy costs nothing and no gates are emitted);
2. ``Toffoli(selector, life_x, life_x1)`` — fires when the bit is 1;
3. conjugate the selector with ``X`` around ``Toffoli(selector, life_x,
   life_x0)`` — fires when the bit is 0 — and restore the selector;
4. hand the payload to whichever child is now alive:
   ``Fredkin(life_x0, res_x[i], res_x0[i])`` and
   ``Fredkin(life_x1, res_x[i], res_x1[i])`` for every ``i < m``.

Gates are emitted in two passes: the address/flag routing (steps 1-3) for all
levels first, then the payload hand-down (step 4) for all levels.  The two
orders are gate-for-gate equivalent — a hand-down swap uses life flags only
as controls, and the only qubit it can share with a deeper level's routing
gates is such a flag, used there as a control as well; gates that overlap
only on controls commute.  The split matters for depth: interleaved emission
would serialize ``m`` swaps per level on the level's life flags, whereas the
split lets the greedy scheduler pipeline the hand-down diagonally across
levels for an overall ``O(n + m)`` critical path.

Fan-out variant
---------------
With ``variant="fanout"``, each non-root node's life flag is spread into
``c = ceil(m/s)`` scratch copies by a CNOT chain, the ``m`` swaps are split
into blocks of ``s`` controlled by distinct copies, and the chain is
uncomputed, giving a per-level hand-down depth of ``2*ceil(m/s) + s + O(1)``
instead of ``m + O(1)``.  The default block size is ``ceil(sqrt(m))``.  When
``ceil(m/s) < 2`` the copies would add nothing and the plain hand-down is
emitted (with ``m = 1`` each level degenerates to its single Fredkin pair).

Run and Up
----------
Run applies, for every leaf ``z``, one opaque block controlled by ``life_z``
acting on ``res_z ++ mem_z``; all blocks commute and share no qubits, so Run
is a single moment.  Up is the exact adjoint of Down, emitted gate for gate.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass

from .errors import ConfigurationError, InvalidParameterError, ShapeError
from .ir import Circuit, Gate, concat
from .sim import UnitarySpec
from .tree import ROOT, RegisterMap


@dataclass(frozen=True)
class SynthesisOptions:
    """Knobs shared by all synthesis entry points.

    ``variant`` selects the hand-down style (``"sequential"`` or
    ``"fanout"``); ``fanout_block`` is the block size ``s`` (default
    ``ceil(sqrt(m))``, only meaningful for the fan-out variant);
    ``include_preparation`` controls the opening ``X`` on the root's life
    flag (the Up phase then closes with its mirror image).
    """

    variant: str = "sequential"
    fanout_block: int | None = None
    include_preparation: bool = True

    def __post_init__(self) -> None:
        if self.variant not in ("sequential", "fanout"):
            raise InvalidParameterError(
                f"variant must be 'sequential' or 'fanout', got {self.variant!r}"
            )
        if self.fanout_block is not None and (
            not isinstance(self.fanout_block, int) or self.fanout_block < 1
        ):
            raise InvalidParameterError(
                f"fan-out block size must be a positive integer, got {self.fanout_block!r}"
            )

    def resolved_block(self, m: int) -> int:
        """The effective block size ``s`` for result width ``m``."""
        if self.fanout_block is None:
            s = math.isqrt(m)
            if s * s < m:
                s += 1
        else:
            s = self.fanout_block
        if not 1 <= s <= m:
            raise InvalidParameterError(
                f"fan-out block size must satisfy 1 <= s <= m, got s={s} with m={m}"
            )
        return s


def _routing_level(layout: RegisterMap, k: int) -> Iterator[Gate]:
    """Steps 1-3 for level ``k``: address copies and life-flag Toffolis."""
    n = layout.n
    for x in layout.levels[k]:
        adr_x = layout.adr(x)
        selector = adr_x[n - k - 1]
        if k < n - 1:
            adr_right = layout.adr(x + "1")
            for j in range(n - k - 1):
                yield Gate.cnot(adr_x[j], adr_right[j])
        yield Gate.toffoli(selector, layout.life(x), layout.life(x + "1"))
        yield Gate.x(selector)
        yield Gate.toffoli(selector, layout.life(x), layout.life(x + "0"))
        yield Gate.x(selector)


def _routing_gates(layout: RegisterMap) -> Iterator[Gate]:
    for k in range(layout.n):
        yield from _routing_level(layout, k)


def _handdown_sequential(layout: RegisterMap, nodes: Sequence[str]) -> Iterator[Gate]:
    """Step 4 for one level, controlled directly on the children's life flags."""
    for x in nodes:
        res_x = layout.res(x)
        for side in "01":
            child = x + side
            life_child = layout.life(child)
            res_child = layout.res(child)
            for i in range(layout.m):
                yield Gate.fredkin(life_child, res_x[i], res_child[i])


def _handdown_fanout(layout: RegisterMap, nodes: Sequence[str], s: int) -> Iterator[Gate]:
    """Step 4 for one level with life-flag copies and swap blocks of size ``s``."""
    m = layout.m
    c = layout.copies_per_node
    if c < 2:
        yield from _handdown_sequential(layout, nodes)
        return
    for x in nodes:
        res_x = layout.res(x)
        children = (x + "0", x + "1")
        for child in children:
            cps = layout.copies(child)
            yield Gate.cnot(layout.life(child), cps[0])
            for t in range(1, c):
                yield Gate.cnot(cps[t - 1], cps[t])
        for child in children:
            cps = layout.copies(child)
            res_child = layout.res(child)
            for i in range(m):
                yield Gate.fredkin(cps[i // s], res_x[i], res_child[i])
        for child in children:
            cps = layout.copies(child)
            for t in range(c - 1, 0, -1):
                yield Gate.cnot(cps[t - 1], cps[t])
            yield Gate.cnot(layout.life(child), cps[0])


def synth_down(layout: RegisterMap, options: SynthesisOptions | None = None) -> Circuit:
    """The Down phase: route the life flag and the result payload to leaf level.

    With the fan-out variant the returned circuit lives on
    ``layout.with_fanout_copies(s)``; inspect ``circuit.layout``.
    """
    options = options or SynthesisOptions()
    if options.variant == "fanout":
        s = options.resolved_block(layout.m)
        layout = layout.with_fanout_copies(s)
    else:
        s = None
    circuit = Circuit(layout)
    circuit.metadata.update(
        phase="down",
        variant=options.variant,
        fanout_block=s,
        include_preparation=options.include_preparation,
    )
    if options.include_preparation:
        circuit.append(Gate.x(layout.life(ROOT)))
        circuit.barrier()
    circuit.extend(_routing_gates(layout))
    for k in range(layout.n):
        nodes = layout.levels[k]
        if s is not None:
            circuit.extend(_handdown_fanout(layout, nodes, s))
        else:
            circuit.extend(_handdown_sequential(layout, nodes))
    return circuit


def synth_up(layout: RegisterMap, options: SynthesisOptions | None = None) -> Circuit:
    """The Up phase: the exact gate-for-gate adjoint of :func:`synth_down`."""
    circuit = synth_down(layout, options).adjoint()
    circuit.metadata["phase"] = "up"
    return circuit


def synth_run(
    layout: RegisterMap,
    unitaries: Mapping[str, UnitarySpec] | None = None,
    *,
    declared_depths: Mapping[str, int] | int | None = None,
) -> Circuit:
    """The Run phase: one life-controlled opaque block per leaf, all in one moment.

    With ``unitaries`` given (one :class:`~qramforge.sim.UnitarySpec` per
    leaf), each block's dimension is checked against ``2**(m + k_z)`` and its
    declared depth is taken from the spec.  Without matrices — purely
    structural synthesis, e.g. for resource estimates — ``declared_depths``
    supplies the depths (an int for all leaves, or a per-leaf mapping,
    default 1).
    """
    if unitaries is not None and declared_depths is not None:
        raise InvalidParameterError("pass either unitaries or declared_depths, not both")
    circuit = Circuit(layout)
    circuit.metadata["phase"] = "run"
    if unitaries is not None:
        unknown = set(unitaries) - set(layout.leaves)
        if unknown:
            raise ConfigurationError(f"unitaries given for unknown leaves: {sorted(unknown)}")
    for leaf in layout.leaves:
        targets = layout.res(leaf) + layout.mem(leaf)
        if unitaries is not None:
            spec = unitaries.get(leaf)
            if spec is None:
                raise ConfigurationError(f"no unitary provided for leaf {leaf!r}")
            if spec.num_qubits != len(targets):
                raise ShapeError(
                    f"unitary for leaf {leaf!r} acts on {spec.num_qubits} qubit(s), "
                    f"but res_z ++ mem_z has {len(targets)}",
                    leaf=leaf,
                )
            depth = spec.declared_depth
        elif isinstance(declared_depths, int):
            depth = declared_depths
        elif declared_depths is not None:
            depth = declared_depths.get(leaf, 1)
        else:
            depth = 1
        circuit.append(
            Gate.controlled_opaque(layout.life(leaf), targets, leaf, declared_depth=depth)
        )
    return circuit


def synth_access(
    layout: RegisterMap,
    unitaries: Mapping[str, UnitarySpec] | None = None,
    options: SynthesisOptions | None = None,
    *,
    declared_depths: Mapping[str, int] | int | None = None,
) -> Circuit:
    """The full access circuit ``Down ; Run ; Up`` as one moment-concatenation."""
    options = options or SynthesisOptions()
    down = synth_down(layout, options)
    run = synth_run(down.layout, unitaries, declared_depths=declared_depths)
    up = down.adjoint()
    up.metadata["phase"] = "up"
    circuit = concat(down, run, up)
    circuit.metadata.update(down.metadata, phase="access")
    return circuit


def fanout_handdown(layout: RegisterMap, nodes: Iterable[str], s: int) -> Circuit:
    """A standalone fan-out hand-down fragment for one level's ``nodes``.

    Useful for inspecting the depth of a single level in isolation.  The
    fragment lives on ``layout.with_fanout_copies(s)``.
    """
    nodes = tuple(nodes)
    if not nodes:
        raise InvalidParameterError("need at least one node")
    depth_set = {len(x) for x in nodes}
    if len(depth_set) != 1:
        raise InvalidParameterError("hand-down fragments span a single level")
    if len(set(nodes)) != len(nodes):
        raise InvalidParameterError("duplicate nodes in hand-down fragment")
    if depth_set.pop() >= layout.n:
        raise InvalidParameterError("leaves have no children to hand the payload to")
    if not 1 <= s <= layout.m:
        raise InvalidParameterError(
            f"fan-out block size must satisfy 1 <= s <= m, got s={s} with m={layout.m}"
        )
    layout = layout.with_fanout_copies(s)
    fragment = Circuit(layout)
    fragment.metadata.update(phase="handdown", fanout_block=s, nodes=list(nodes))
    fragment.extend(_handdown_fanout(layout, nodes, s))
    return fragment
