"""
Polymorphic netlist model.

A Netlist is an immutable, topologically ordered list of cells (a cell's id is
its position and every fan-in id is smaller). Polymorphic cells carry one
function per mode; the mode is a single global bit chosen at simulation time.
NetlistBuilder appends cells during synthesis; NetlistEditor wraps a networkx
DiGraph for the in-place rewriting done by mode-variable elimination.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

logger = logging.getLogger("netlist")

DEFAULT_MODE_LABELS = ("mode1", "mode2")


class GateKind(str, Enum):
    """Connecting gates of a bi-decomposition."""
    AND = "AND"
    OR = "OR"
    XOR = "XOR"

    def apply(self, a, b):
        if self is GateKind.AND:
            return a & b
        if self is GateKind.OR:
            return a | b
        return a ^ b


GATE_ORDER = (GateKind.AND, GateKind.OR, GateKind.XOR)


class Unit(str, Enum):
    """One-input functions a 1-input polymorphic cell can take per mode."""
    ZERO = "ZERO"
    ONE = "ONE"
    WIRE = "WIRE"
    NOT = "NOT"

    def apply(self, x):
        if self is Unit.ZERO:
            return x & ~x if isinstance(x, np.ndarray) else 0
        if self is Unit.ONE:
            return x | ~x if isinstance(x, np.ndarray) else 1
        if self is Unit.WIRE:
            return x
        return ~x if isinstance(x, np.ndarray) else 1 - x

    @property
    def is_constant(self) -> bool:
        return self in (Unit.ZERO, Unit.ONE)

    def negated(self) -> "Unit":
        return {Unit.ZERO: Unit.ONE, Unit.ONE: Unit.ZERO, Unit.WIRE: Unit.NOT, Unit.NOT: Unit.WIRE}[self]


def unit_for(gate: GateKind, constant: int) -> Unit:
    """What gate(constant, x) does to x."""
    if gate is GateKind.AND:
        return Unit.WIRE if constant else Unit.ZERO
    if gate is GateKind.OR:
        return Unit.ONE if constant else Unit.WIRE
    return Unit.NOT if constant else Unit.WIRE


class Op(str, Enum):
    INPUT = "INPUT"
    CONST = "CONST"
    NOT = "NOT"
    AND2 = "AND2"
    OR2 = "OR2"
    XOR2 = "XOR2"
    POLY2 = "POLY2"
    POLY1 = "POLY1"
    POLYCONST = "POLYCONST"


_GATE_OPS = {GateKind.AND: Op.AND2, GateKind.OR: Op.OR2, GateKind.XOR: Op.XOR2}
_OP_GATES = {op: gate for gate, op in _GATE_OPS.items()}
_ARITY = {
    Op.INPUT: 0, Op.CONST: 0, Op.POLYCONST: 0,
    Op.NOT: 1, Op.POLY1: 1,
    Op.AND2: 2, Op.OR2: 2, Op.XOR2: 2, Op.POLY2: 2,
}
COMMUTATIVE = frozenset({Op.AND2, Op.OR2, Op.XOR2, Op.POLY2})


@dataclass(frozen=True)
class CellKind:
    """op plus its parameters: INPUT (index,), CONST (bit,), POLY2 (g1, g2),
    POLY1 (u1, u2), POLYCONST (b1, b2); the plain gates take none."""
    op: Op
    params: tuple = ()

    @classmethod
    def input(cls, index: int) -> "CellKind":
        return cls(Op.INPUT, (int(index),))

    @classmethod
    def const(cls, bit: int) -> "CellKind":
        return cls(Op.CONST, (1 if bit else 0,))

    @classmethod
    def not_(cls) -> "CellKind":
        return cls(Op.NOT)

    @classmethod
    def gate(cls, gate: GateKind) -> "CellKind":
        return cls(_GATE_OPS[GateKind(gate)])

    @classmethod
    def poly2(cls, g1: GateKind, g2: GateKind) -> "CellKind":
        return cls(Op.POLY2, (GateKind(g1), GateKind(g2)))

    @classmethod
    def poly1(cls, u1: Unit, u2: Unit) -> "CellKind":
        return cls(Op.POLY1, (Unit(u1), Unit(u2)))

    @classmethod
    def polyconst(cls, b1: int, b2: int) -> "CellKind":
        return cls(Op.POLYCONST, (1 if b1 else 0, 1 if b2 else 0))

    @property
    def arity(self) -> int:
        return _ARITY[self.op]

    @property
    def is_poly(self) -> bool:
        return self.op in (Op.POLY2, Op.POLY1, Op.POLYCONST)

    @property
    def is_counted(self) -> bool:
        # constants, inputs and wires are free
        return self.op not in (Op.INPUT, Op.CONST)

    @property
    def gate_kind(self) -> Optional[GateKind]:
        return _OP_GATES.get(self.op)

    @property
    def tag(self) -> str:
        if self.op is Op.INPUT or self.op is Op.CONST:
            return f"{self.op.value}:{self.params[0]}"
        if self.op is Op.POLY2 or self.op is Op.POLY1:
            return f"{self.op.value}:{self.params[0].value}/{self.params[1].value}"
        if self.op is Op.POLYCONST:
            return f"{self.op.value}:{self.params[0]}/{self.params[1]}"
        return self.op.value

    @property
    def label(self) -> str:
        """Short label in the g1/g2 notation of the figures."""
        if self.op is Op.INPUT:
            return f"in{self.params[0]}"
        if self.op is Op.CONST:
            return str(self.params[0])
        if self.op in (Op.POLY2, Op.POLY1):
            return f"{self.params[0].value}/{self.params[1].value}"
        if self.op is Op.POLYCONST:
            names = ("ZERO", "ONE")
            return f"{names[self.params[0]]}/{names[self.params[1]]}"
        return self.op.value.rstrip("2")

    @classmethod
    def from_tag(cls, tag: str) -> "CellKind":
        head, _, rest = tag.partition(":")
        op = Op(head)
        if op is Op.INPUT:
            return cls.input(int(rest))
        if op is Op.CONST:
            return cls.const(int(rest))
        if op in (Op.POLY2, Op.POLY1, Op.POLYCONST):
            first, sep, second = rest.partition("/")
            if not sep:
                raise ValueError(f"malformed polymorphic tag {tag!r}")
            if op is Op.POLY2:
                return cls.poly2(GateKind(first), GateKind(second))
            if op is Op.POLY1:
                return cls.poly1(Unit(first), Unit(second))
            return cls.polyconst(int(first), int(second))
        if rest:
            raise ValueError(f"unexpected parameters in tag {tag!r}")
        return cls(op)

    def evaluate(self, mode: int, args: Sequence, width: int = 1):
        """Evaluate on numpy bool vectors (one lane per assignment) in mode 1 or 2."""
        op = self.op
        if op is Op.CONST:
            return np.full(width, bool(self.params[0]))
        if op is Op.POLYCONST:
            return np.full(width, bool(self.params[mode - 1]))
        if op is Op.NOT:
            return ~args[0]
        if op is Op.POLY1:
            return self.params[mode - 1].apply(args[0])
        if op is Op.POLY2:
            return self.params[mode - 1].apply(args[0], args[1])
        gate = _OP_GATES.get(op)
        if gate is None:
            raise ValueError(f"cannot evaluate {self.tag} directly")
        return gate.apply(args[0], args[1])


@dataclass(frozen=True)
class Cell:
    kind: CellKind
    fanin: Tuple[int, ...] = ()


@dataclass(frozen=True)
class Netlist:
    inputs: Tuple[str, ...]
    cells: Tuple[Cell, ...]
    outputs: Tuple[Tuple[str, int], ...]
    mode_labels: Tuple[str, str] = DEFAULT_MODE_LABELS

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(self, "outputs", tuple((str(n), int(d)) for n, d in self.outputs))
        object.__setattr__(self, "mode_labels", tuple(self.mode_labels))
        self.validate()

    def validate(self):
        if len(self.mode_labels) != 2:
            raise ValueError("a netlist has exactly two mode labels")
        for cid, cell in enumerate(self.cells):
            if len(cell.fanin) != cell.kind.arity:
                raise ValueError(f"cell {cid} ({cell.kind.tag}) has {len(cell.fanin)} fan-ins")
            for src in cell.fanin:
                if not 0 <= src < cid:
                    raise ValueError(f"cell {cid} reads cell {src}, which does not precede it")
            if cell.kind.op is Op.INPUT and not 0 <= cell.kind.params[0] < len(self.inputs):
                raise ValueError(f"cell {cid} reads undeclared input {cell.kind.params[0]}")
        for name, driver in self.outputs:
            if not 0 <= driver < len(self.cells):
                raise ValueError(f"output {name} is driven by missing cell {driver}")

    @property
    def output_names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.outputs)

    def input_cell(self, index: int) -> Optional[int]:
        for cid, cell in enumerate(self.cells):
            if cell.kind.op is Op.INPUT and cell.kind.params[0] == index:
                return cid
        return None

    def fanouts(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {cid: [] for cid in range(len(self.cells))}
        for cid, cell in enumerate(self.cells):
            for src in cell.fanin:
                out[src].append(cid)
        return out


@dataclass(frozen=True)
class GateStats:
    total_counted: int
    poly_count: int

    @property
    def poly_percent(self) -> float:
        if self.total_counted == 0:
            return 0.0
        return 100.0 * self.poly_count / self.total_counted

    def line(self) -> str:
        return f"total={self.total_counted} poly={self.poly_count} percent={self.poly_percent:.1f}"


def gate_stats(netlist: Netlist) -> GateStats:
    """Counts NOT, AND, OR, XOR and every polymorphic cell; inputs and constants are free."""
    counted = [c for c in netlist.cells if c.kind.is_counted]
    return GateStats(len(counted), sum(1 for c in counted if c.kind.is_poly))


def simulate_vectors(netlist: Netlist, columns: Sequence[np.ndarray], mode: int) -> List[np.ndarray]:
    """Bit-parallel simulation: columns[i] holds input i for every lane."""
    if mode not in (1, 2):
        raise ValueError(f"mode must be 1 or 2, got {mode}")
    if len(columns) != len(netlist.inputs):
        raise ValueError(f"expected {len(netlist.inputs)} input columns, got {len(columns)}")
    width = len(columns[0]) if columns else 1
    values: List[np.ndarray] = []
    for cell in netlist.cells:
        if cell.kind.op is Op.INPUT:
            values.append(np.asarray(columns[cell.kind.params[0]], dtype=bool))
        else:
            values.append(cell.kind.evaluate(mode, [values[i] for i in cell.fanin], width))
    return [values[driver] for _, driver in netlist.outputs]


def simulate(netlist: Netlist, assignment: Sequence[int], mode: int) -> Tuple[int, ...]:
    """One assignment (a bit per input, in input order); returns a bit per output."""
    if len(assignment) != len(netlist.inputs):
        raise ValueError(f"expected {len(netlist.inputs)} input bits, got {len(assignment)}")
    columns = [np.array([bool(b)]) for b in assignment]
    return tuple(int(v[0]) for v in simulate_vectors(netlist, columns, mode))


class NetlistBuilder:
    """Append-only construction used by the synthesizers; one INPUT cell per input."""

    def __init__(self, inputs: Sequence[str], mode_labels: Sequence[str] = DEFAULT_MODE_LABELS):
        self.inputs = tuple(inputs)
        self.mode_labels = tuple(mode_labels)
        self.cells: List[Cell] = []
        self.outputs: List[Tuple[str, int]] = []
        self.counted = 0
        self._signals = {name: self.add(CellKind.input(i)) for i, name in enumerate(self.inputs)}

    def add(self, kind: CellKind, *fanin: int) -> int:
        for src in fanin:
            if not 0 <= src < len(self.cells):
                raise ValueError(f"fan-in {src} does not exist yet")
        self.cells.append(Cell(kind, tuple(fanin)))
        if kind.is_counted:
            self.counted += 1
        return len(self.cells) - 1

    def signal(self, name: str) -> int:
        return self._signals[name]

    def const(self, bit: int) -> int:
        return self.add(CellKind.const(bit))

    def not_(self, a: int) -> int:
        return self.add(CellKind.not_(), a)

    def gate(self, gate: GateKind, a: int, b: int) -> int:
        return self.add(CellKind.gate(gate), a, b)

    def poly2(self, g1: GateKind, g2: GateKind, a: int, b: int) -> int:
        if g1 == g2:
            return self.gate(g1, a, b)
        return self.add(CellKind.poly2(g1, g2), a, b)

    def poly1(self, u1: Unit, u2: Unit, a: int) -> int:
        return self.add(CellKind.poly1(u1, u2), a)

    def polyconst(self, b1: int, b2: int) -> int:
        return self.add(CellKind.polyconst(b1, b2))

    def set_output(self, name: str, driver: int):
        self.outputs.append((name, driver))

    def build(self) -> Netlist:
        return Netlist(self.inputs, tuple(self.cells), tuple(self.outputs), self.mode_labels)


class NetlistEditor:
    """Mutable view for rewriting. Cell ids are stable node keys of a networkx
    DiGraph; fan-in order lives in the node's 'fanin' attribute because the
    graph itself cannot hold a repeated or ordered edge."""

    def __init__(self, inputs: Sequence[str], mode_labels: Sequence[str] = DEFAULT_MODE_LABELS):
        self.inputs = tuple(inputs)
        self.mode_labels = tuple(mode_labels)
        self.graph = nx.DiGraph()
        self.outputs: List[List] = []
        self._next = 0

    @classmethod
    def from_netlist(cls, netlist: Netlist) -> "NetlistEditor":
        ed = cls(netlist.inputs, netlist.mode_labels)
        for cell in netlist.cells:
            ed.add(cell.kind, *cell.fanin)
        ed.outputs = [[name, driver] for name, driver in netlist.outputs]
        return ed

    def add(self, kind: CellKind, *fanin: int) -> int:
        cid = self._next
        self._next += 1
        self.graph.add_node(cid, kind=kind, fanin=tuple(fanin))
        for src in set(fanin):
            self.graph.add_edge(src, cid)
        return cid

    def kind(self, cid: int) -> CellKind:
        return self.graph.nodes[cid]["kind"]

    def fanin(self, cid: int) -> Tuple[int, ...]:
        return self.graph.nodes[cid]["fanin"]

    def fanout(self, cid: int) -> List[int]:
        return sorted(self.graph.successors(cid))

    def drives_output(self, cid: int) -> bool:
        return any(driver == cid for _, driver in self.outputs)

    def input_cell(self, name: str) -> Optional[int]:
        index = self.inputs.index(name)
        for cid, data in self.graph.nodes(data=True):
            if data["kind"].op is Op.INPUT and data["kind"].params[0] == index:
                return cid
        return None

    def replace(self, cid: int, kind: CellKind, fanin: Iterable[int]):
        fanin = tuple(fanin)
        self.graph.remove_edges_from(list(self.graph.in_edges(cid)))
        self.graph.nodes[cid]["kind"] = kind
        self.graph.nodes[cid]["fanin"] = fanin
        for src in set(fanin):
            self.graph.add_edge(src, cid)

    def substitute(self, old: int, new: int):
        """Redirect every reader of old (cells and outputs) to new."""
        for reader in list(self.graph.successors(old)):
            fanin = tuple(new if src == old else src for src in self.fanin(reader))
            self.replace(reader, self.kind(reader), fanin)
        for out in self.outputs:
            if out[1] == old:
                out[1] = new

    def sweep(self) -> int:
        """Remove cells nothing reads; inputs always stay. Returns the number removed."""
        live = set()
        stack = [driver for _, driver in self.outputs]
        while stack:
            cid = stack.pop()
            if cid in live:
                continue
            live.add(cid)
            stack.extend(self.fanin(cid))
        dead = [cid for cid, data in self.graph.nodes(data=True)
                if cid not in live and data["kind"].op is not Op.INPUT]
        self.graph.remove_nodes_from(dead)
        return len(dead)

    def topo_order(self) -> List[int]:
        return list(nx.lexicographical_topological_sort(self.graph))

    def to_netlist(self, drop_inputs: Sequence[str] = ()) -> Netlist:
        """Renumber into a Netlist; dropped inputs must have no readers left."""
        keep = [name for name in self.inputs if name not in set(drop_inputs)]
        new_index = {self.inputs.index(name): i for i, name in enumerate(keep)}
        remap: Dict[int, int] = {}
        cells: List[Cell] = []
        for cid in self.topo_order():
            kind = self.kind(cid)
            if kind.op is Op.INPUT:
                old_index = kind.params[0]
                if old_index not in new_index:
                    if self.fanout(cid) or self.drives_output(cid):
                        raise ValueError(f"input {self.inputs[old_index]} is still referenced")
                    continue
                kind = CellKind.input(new_index[old_index])
            remap[cid] = len(cells)
            cells.append(Cell(kind, tuple(remap[src] for src in self.fanin(cid))))
        outputs = tuple((name, remap[driver]) for name, driver in self.outputs)
        return Netlist(tuple(keep), tuple(cells), outputs, self.mode_labels)
