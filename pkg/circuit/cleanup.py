"""
Semantics-preserving netlist cleanup, valid in both modes.

A single forward pass over the (already topological) cell list rebuilds the
netlist while folding:
  - constants and polymorphic constants into their readers,
  - gates with two identical or complementary inputs,
  - double negation and chains of 1-input polymorphic cells,
  - polymorphic cells whose two modes agree, into ordinary cells,
and hashing structurally identical cells (commutative fan-ins sorted) onto one.
A dead-cell sweep follows; input cells always survive.
"""
import logging
from typing import Dict, List, Optional, Tuple

from circuit.netlist import (
    Cell,
    CellKind,
    COMMUTATIVE,
    GateKind,
    Netlist,
    NetlistBuilder,
    Op,
    Unit,
    unit_for,
)

logger = logging.getLogger("cleanup")


def _compose(outer: Unit, inner: Unit) -> Unit:
    """outer(inner(x)) as a single unit."""
    if inner.is_constant:
        bit = outer.apply(1 if inner is Unit.ONE else 0)
        return Unit.ONE if bit else Unit.ZERO
    if inner is Unit.WIRE:
        return outer
    if outer.is_constant:
        return outer
    return Unit.NOT if outer is Unit.WIRE else Unit.WIRE


def _pair_unit(gate: GateKind, same: bool) -> Unit:
    """gate(x, x) when same, gate(x, NOT x) otherwise."""
    if same:
        return Unit.ZERO if gate is GateKind.XOR else Unit.WIRE
    return Unit.ZERO if gate is GateKind.AND else Unit.ONE


class _Folder:
    def __init__(self, netlist: Netlist):
        self.builder = NetlistBuilder(netlist.inputs, netlist.mode_labels)
        self.table: Dict[Tuple[CellKind, Tuple[int, ...]], int] = {}
        self.folded = 0
        for cid, cell in enumerate(self.builder.cells):
            self.table[(cell.kind, cell.fanin)] = cid

    # cell facts on the rebuilt side

    def _kind(self, cid: int) -> CellKind:
        return self.builder.cells[cid].kind

    def _fanin(self, cid: int) -> Tuple[int, ...]:
        return self.builder.cells[cid].fanin

    def _const(self, cid: int) -> Optional[int]:
        kind = self._kind(cid)
        return kind.params[0] if kind.op is Op.CONST else None

    def _polyconst(self, cid: int) -> Optional[Tuple[int, int]]:
        kind = self._kind(cid)
        return kind.params if kind.op is Op.POLYCONST else None

    def _negation_of(self, cid: int) -> Optional[int]:
        kind = self._kind(cid)
        return self._fanin(cid)[0] if kind.op is Op.NOT else None

    def _complementary(self, a: int, b: int) -> bool:
        return self._negation_of(a) == b or self._negation_of(b) == a

    # emission

    def _emit(self, kind: CellKind, fanin: Tuple[int, ...]) -> int:
        if kind.op in COMMUTATIVE:
            fanin = tuple(sorted(fanin))
        key = (kind, fanin)
        hit = self.table.get(key)
        if hit is not None:
            self.folded += 1
            return hit
        cid = self.builder.add(kind, *fanin)
        self.table[key] = cid
        return cid

    def const(self, bit: int) -> int:
        return self._emit(CellKind.const(bit), ())

    def polyconst(self, b1: int, b2: int) -> int:
        if b1 == b2:
            return self.const(b1)
        return self._emit(CellKind.polyconst(b1, b2), ())

    def not_(self, a: int) -> int:
        bit = self._const(a)
        if bit is not None:
            return self.const(1 - bit)
        pc = self._polyconst(a)
        if pc is not None:
            return self.polyconst(1 - pc[0], 1 - pc[1])
        inner = self._negation_of(a)
        if inner is not None:
            self.folded += 1
            return inner
        return self._emit(CellKind.not_(), (a,))

    def unit(self, u: Unit, a: int) -> int:
        if u is Unit.ZERO:
            return self.const(0)
        if u is Unit.ONE:
            return self.const(1)
        if u is Unit.WIRE:
            return a
        return self.not_(a)

    def poly1(self, u1: Unit, u2: Unit, a: int) -> int:
        if u1 == u2:
            return self.unit(u1, a)
        if u1.is_constant and u2.is_constant:
            return self.polyconst(int(u1 is Unit.ONE), int(u2 is Unit.ONE))
        bit = self._const(a)
        if bit is not None:
            return self.polyconst(u1.apply(bit), u2.apply(bit))
        pc = self._polyconst(a)
        if pc is not None:
            return self.polyconst(u1.apply(pc[0]), u2.apply(pc[1]))
        inner = self._negation_of(a)
        if inner is not None:
            return self.poly1(_compose(u1, Unit.NOT), _compose(u2, Unit.NOT), inner)
        kind = self._kind(a)
        if kind.op is Op.POLY1:
            v1, v2 = kind.params
            return self.poly1(_compose(u1, v1), _compose(u2, v2), self._fanin(a)[0])
        return self._emit(CellKind.poly1(u1, u2), (a,))

    def gate(self, gate: GateKind, a: int, b: int) -> int:
        for x, y in ((a, b), (b, a)):
            bit = self._const(x)
            if bit is not None:
                return self.unit(unit_for(gate, bit), y)
            pc = self._polyconst(x)
            if pc is not None:
                return self.poly1(unit_for(gate, pc[0]), unit_for(gate, pc[1]), y)
        if a == b:
            return self.unit(_pair_unit(gate, True), a)
        if self._complementary(a, b):
            return self.unit(_pair_unit(gate, False), a)
        return self._emit(CellKind.gate(gate), (a, b))

    def poly2(self, g1: GateKind, g2: GateKind, a: int, b: int) -> int:
        if g1 == g2:
            return self.gate(g1, a, b)
        for x, y in ((a, b), (b, a)):
            bit = self._const(x)
            if bit is not None:
                return self.poly1(unit_for(g1, bit), unit_for(g2, bit), y)
            pc = self._polyconst(x)
            if pc is not None:
                return self.poly1(unit_for(g1, pc[0]), unit_for(g2, pc[1]), y)
        if a == b or self._complementary(a, b):
            same = a == b
            return self.poly1(_pair_unit(g1, same), _pair_unit(g2, same), a)
        return self._emit(CellKind.poly2(g1, g2), (a, b))

    def fold(self, kind: CellKind, fanin: Tuple[int, ...]) -> int:
        op = kind.op
        if op is Op.INPUT:
            return self.builder.signal(self.builder.inputs[kind.params[0]])
        if op is Op.CONST:
            return self.const(kind.params[0])
        if op is Op.POLYCONST:
            return self.polyconst(*kind.params)
        if op is Op.NOT:
            return self.not_(fanin[0])
        if op is Op.POLY1:
            return self.poly1(kind.params[0], kind.params[1], fanin[0])
        if op is Op.POLY2:
            return self.poly2(kind.params[0], kind.params[1], fanin[0], fanin[1])
        return self.gate(kind.gate_kind, fanin[0], fanin[1])


def sweep(netlist: Netlist) -> Netlist:
    """Drop cells no output depends on, keeping every input cell, and renumber."""
    live = set()
    stack = [driver for _, driver in netlist.outputs]
    while stack:
        cid = stack.pop()
        if cid in live:
            continue
        live.add(cid)
        stack.extend(netlist.cells[cid].fanin)
    remap: Dict[int, int] = {}
    cells: List[Cell] = []
    for cid, cell in enumerate(netlist.cells):
        if cid not in live and cell.kind.op is not Op.INPUT:
            continue
        remap[cid] = len(cells)
        cells.append(Cell(cell.kind, tuple(remap[src] for src in cell.fanin)))
    outputs = tuple((name, remap[driver]) for name, driver in netlist.outputs)
    return Netlist(netlist.inputs, tuple(cells), outputs, netlist.mode_labels)


def cleanup(netlist: Netlist) -> Netlist:
    folder = _Folder(netlist)
    remap: Dict[int, int] = {}
    for cid, cell in enumerate(netlist.cells):
        remap[cid] = folder.fold(cell.kind, tuple(remap[src] for src in cell.fanin))
    for name, driver in netlist.outputs:
        folder.builder.set_output(name, remap[driver])
    result = sweep(folder.builder.build())
    logger.debug(
        "cleanup: %d -> %d cells (%d merged)", len(netlist.cells), len(result.cells), folder.folded
    )
    return result
