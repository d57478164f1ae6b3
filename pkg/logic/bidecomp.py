"""
Single-mode bi-decomposition: f(A, S, B) = g(r(A, S), h(B, S)) for g in {AND, OR, XOR}.

The checks work on the function's on/off vectors regrouped into an (S, A, B)
array, one slice per assignment of the shared variables S:

  OR   decomposable iff no on-point has an off-point both in its A-row and in
       its B-column. r is off on rows holding an off-point and on on rows
       holding only on-points; h is off on columns holding an off-point and on
       where an on-point sits in an off row.
  AND  the OR check applied to the complement, children complemented back.
  XOR  per slice, the care points are parity constraints r(a) ^ h(b) = f(a, b);
       decomposable iff they are consistent. In each connected component the
       lowest node (r nodes before h nodes) takes 0; untouched nodes stay
       don't-care.

Weak decomposition takes A empty with a single-variable B and keeps only the
part of the on-set r can cover; h then gains don't-cares. When neither applies a
Shannon expansion on the most balanced variable keeps synthesis total.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from circuit.cleanup import cleanup
from circuit.netlist import GATE_ORDER, GateKind, Netlist, NetlistBuilder
from infra.config import SynthLimits
from infra.errors import ResourceLimitExceeded
from infra.observability import record_decomposition
from infra.prometheus_metrics import Metrics
from logic.boolfn import (
    Isf,
    VarSet,
    care_count,
    cofactor,
    complement,
    is_constant,
    project_support,
)
from logic.recipes import emit_recipe, find_recipe, single_mode_library

logger = logging.getLogger("bidecomp")

__all__ = [
    "GateKind",
    "Partition",
    "StrongDecomp",
    "WeakDecomp",
    "ShannonDecomp",
    "check_strong",
    "is_decomposable",
    "weak_decompose",
    "find_initial_pair",
    "grow_partition",
    "score",
    "bidecompose",
    "leaf_recipe",
    "leaf_synth",
    "design",
    "design_outputs",
    "SingleModeSynthesizer",
]


@dataclass(frozen=True)
class Partition:
    a: VarSet
    b: VarSet
    s: VarSet

    @classmethod
    def of(cls, a: Sequence[int], b: Sequence[int], n: int) -> "Partition":
        a, b = tuple(sorted(a)), tuple(sorted(b))
        if set(a) & set(b):
            raise ValueError(f"A={a} and B={b} overlap")
        rest = tuple(v for v in range(n) if v not in set(a) | set(b))
        return cls(a, b, rest)

    def swapped(self) -> "Partition":
        return Partition(self.b, self.a, self.s)

    def covers(self, n: int) -> bool:
        return sorted(self.a + self.b + self.s) == list(range(n))


@dataclass(frozen=True)
class StrongDecomp:
    gate: GateKind
    partition: Partition
    r: Isf
    h: Isf


@dataclass(frozen=True)
class WeakDecomp:
    gate: GateKind
    b: VarSet
    r: Isf
    h: Isf
    gain: int


@dataclass(frozen=True)
class ShannonDecomp:
    var: int
    low: Isf
    high: Isf


DecompResult = Union[StrongDecomp, WeakDecomp, ShannonDecomp]


# variable regrouping


def _group_view(vec: np.ndarray, n: int, groups: Sequence[VarSet]) -> np.ndarray:
    """Reshape a 2**n vector to one axis per group; inside a group, its j-th variable is bit j."""
    order: List[int] = []
    for g in groups:
        order += [n - 1 - v for v in reversed(g)]
    shape = tuple(1 << len(g) for g in groups)
    return vec.reshape((2,) * n).transpose(order).reshape(shape)


def _from_groups(arr: np.ndarray, groups: Sequence[VarSet]) -> np.ndarray:
    """Inverse of _group_view for the variables of the given groups, ascending."""
    axis_vars: List[int] = []
    for g in groups:
        axis_vars += list(reversed(g))
    m = len(axis_vars)
    if m == 0:
        return np.asarray(arr).reshape(-1)
    perm = [axis_vars.index(v) for v in sorted(axis_vars, reverse=True)]
    return np.asarray(arr).reshape((2,) * m).transpose(perm).reshape(-1)


def _child(f: Isf, on: np.ndarray, off: np.ndarray, groups: Sequence[VarSet]) -> Isf:
    names = tuple(f.var_names[v] for v in sorted(itertools.chain(*groups)))
    return Isf._raw(_from_groups(on, groups), _from_groups(off, groups), names)


# strong checks


def _or_children(on3: np.ndarray, off3: np.ndarray):
    r_off = off3.any(axis=2)
    h_off = off3.any(axis=1)
    if (on3 & r_off[:, :, None] & h_off[:, None, :]).any():
        return None
    r_on = on3.any(axis=2) & ~r_off
    h_on = (on3 & r_off[:, :, None]).any(axis=1)
    return r_on, r_off, h_on, h_off


def _or_possible(on3: np.ndarray, off3: np.ndarray) -> bool:
    r_off = off3.any(axis=2)
    h_off = off3.any(axis=1)
    return not (on3 & r_off[:, :, None] & h_off[:, None, :]).any()


def _xor_children(on3: np.ndarray, off3: np.ndarray):
    ns, ra, rb = on3.shape
    care = on3 | off3
    r_val = np.zeros((ns, ra), dtype=bool)
    r_set = np.zeros((ns, ra), dtype=bool)
    h_val = np.zeros((ns, rb), dtype=bool)
    h_set = np.zeros((ns, rb), dtype=bool)

    full = care.all(axis=(1, 2))
    if full.any():
        m = on3[full]
        pred = m[:, :, :1] ^ m[:, :1, :] ^ m[:, :1, :1]
        if (pred != m).any():
            return None
        r_val[full] = m[:, :, 0] ^ m[:, :1, 0]
        h_val[full] = m[:, 0, :]
        r_set[full] = True
        h_set[full] = True

    for s in np.flatnonzero(~full & care.any(axis=(1, 2))):
        values = _xor_slice(on3[s], care[s])
        if values is None:
            return None
        for node, bit in values.items():
            if node < ra:
                r_set[s, node], r_val[s, node] = True, bit
            else:
                h_set[s, node - ra], h_val[s, node - ra] = True, bit

    return r_set & r_val, r_set & ~r_val, h_set & h_val, h_set & ~h_val


def _xor_slice(on: np.ndarray, care: np.ndarray) -> Optional[Dict[int, bool]]:
    ra = on.shape[0]
    adj: Dict[int, List[Tuple[int, bool]]] = {}
    for a, b in zip(*np.nonzero(care)):
        parity = bool(on[a, b])
        a, hb = int(a), ra + int(b)
        adj.setdefault(a, []).append((hb, parity))
        adj.setdefault(hb, []).append((a, parity))
    values: Dict[int, bool] = {}
    for root in sorted(adj):
        if root in values:
            continue
        values[root] = False
        queue = [root]
        while queue:
            node = queue.pop()
            for other, parity in adj[node]:
                want = values[node] ^ parity
                seen = values.get(other)
                if seen is None:
                    values[other] = want
                    queue.append(other)
                elif seen != want:
                    return None
    return values


def _xor_possible(on3: np.ndarray, off3: np.ndarray) -> bool:
    return _xor_children(on3, off3) is not None


def _arranged(f: Isf, part: Partition):
    n = f.num_vars
    if not part.covers(n):
        raise ValueError(f"partition {part} does not cover the {n} variables of f")
    groups = (part.s, part.a, part.b)
    return _group_view(f.on, n, groups), _group_view(f.off, n, groups)


def is_decomposable(f: Isf, gate: GateKind, part: Partition) -> bool:
    on3, off3 = _arranged(f, part)
    gate = GateKind(gate)
    if gate is GateKind.OR:
        return _or_possible(on3, off3)
    if gate is GateKind.AND:
        return _or_possible(off3, on3)
    return _xor_possible(on3, off3)


def check_strong(f: Isf, gate: GateKind, part: Partition) -> Optional[Tuple[Isf, Isf]]:
    """(r over A∪S, h over B∪S) when f is gate-decomposable for part, else None."""
    on3, off3 = _arranged(f, part)
    gate = GateKind(gate)
    if gate is GateKind.XOR:
        children = _xor_children(on3, off3)
    elif gate is GateKind.OR:
        children = _or_children(on3, off3)
    else:
        children = _or_children(off3, on3)
        if children is not None:
            r_off, r_on, h_off, h_on = children
            children = r_on, r_off, h_on, h_off
    if children is None:
        return None
    r_on, r_off, h_on, h_off = children
    r = _child(f, r_on, r_off, (part.s, part.a))
    h = _child(f, h_on, h_off, (part.s, part.b))
    return r, h


# weak decomposition


def weak_decompose(f: Isf, gate: GateKind, b: Sequence[int]) -> Optional[WeakDecomp]:
    gate = GateKind(gate)
    if gate is GateKind.XOR:
        raise ValueError("weak decomposition uses OR or AND")
    n = f.num_vars
    part = Partition.of((), b, n)
    on3, off3 = _arranged(f, part)
    on2, off2 = on3[:, 0, :], off3[:, 0, :]
    if gate is GateKind.AND:
        on2, off2 = off2, on2
    r_off = off2.any(axis=1)
    r_on = on2.any(axis=1) & ~r_off
    covered = on2 & r_on[:, None]
    gain = int(np.count_nonzero(covered))
    if gain == 0:
        return None
    h_on = on2 & ~covered
    h_off = off2
    if gate is GateKind.AND:
        r_on, r_off = r_off, r_on
        h_on, h_off = h_off, h_on
    r = _child(f, r_on, r_off, (part.s,))
    h = _child(f, h_on[:, None, :], h_off[:, None, :], (part.s, (), part.b))
    return WeakDecomp(gate, part.b, r, h, gain)


# partition search


def score(part: Partition, v_size: int) -> int:
    la, lb = len(part.a), len(part.b)
    return v_size * min(la, lb) + max(la, lb)


def find_initial_pair(f: Isf, gate: GateKind) -> Optional[Tuple[int, int]]:
    n = f.num_vars
    for i, j in itertools.combinations(range(n), 2):
        if is_decomposable(f, gate, Partition.of((i,), (j,), n)):
            return i, j
    return None


def grow_partition(f: Isf, gate: GateKind, seed_a: Sequence[int], seed_b: Sequence[int]) -> Partition:
    n = f.num_vars
    a, b = list(seed_a), list(seed_b)
    for x in range(n):
        if x in a or x in b:
            continue
        if is_decomposable(f, gate, Partition.of(a + [x], b, n)):
            a.append(x)
        elif is_decomposable(f, gate, Partition.of(a, b + [x], n)):
            b.append(x)
    return Partition.of(a, b, n)


def _best_strong(f: Isf) -> Optional[StrongDecomp]:
    n = f.num_vars
    best: Optional[Tuple[int, GateKind, Partition]] = None
    for gate in GATE_ORDER:
        seed = find_initial_pair(f, gate)
        if seed is None:
            continue
        part = grow_partition(f, gate, (seed[0],), (seed[1],))
        if len(part.a) > len(part.b):
            part = part.swapped()
        sc = score(part, n)
        logger.debug("candidate %s A=%s B=%s score=%d", gate.value, part.a, part.b, sc)
        if best is None or sc > best[0]:
            best = (sc, gate, part)
    if best is None:
        return None
    _, gate, part = best
    r, h = check_strong(f, gate, part)
    return StrongDecomp(gate, part, r, h)


def _best_weak(f: Isf) -> Optional[WeakDecomp]:
    best: Optional[WeakDecomp] = None
    for gate in (GateKind.OR, GateKind.AND):
        for v in range(f.num_vars):
            cand = weak_decompose(f, gate, (v,))
            if cand is not None and (best is None or cand.gain > best.gain):
                best = cand
    return best


def shannon(f: Isf) -> ShannonDecomp:
    best_var, best_gap = 0, None
    for v in range(f.num_vars):
        low, high = cofactor(f, v, 0), cofactor(f, v, 1)
        gap = abs(care_count(low) - care_count(high))
        if best_gap is None or gap < best_gap:
            best_var, best_gap = v, gap
    return ShannonDecomp(best_var, cofactor(f, best_var, 0), cofactor(f, best_var, 1))


def bidecompose(f: Isf) -> DecompResult:
    """Best strong decomposition by score, else best weak by gain, else Shannon."""
    if f.num_vars <= 2:
        raise ValueError("bidecompose needs more than two variables; use leaf_synth")
    strong = _best_strong(f)
    if strong is not None:
        return strong
    weak = _best_weak(f)
    if weak is not None:
        return weak
    return shannon(f)


# leaves and recursive construction


def leaf_recipe(f: Isf):
    """Cheapest recipe over f's own variables (at most two)."""
    k = f.num_vars
    recipe = find_recipe(single_mode_library(k), f.on, f.off, f.on, f.off)
    if recipe is None:
        raise ValueError(f"no leaf recipe for {f!r}")
    return recipe


def leaf_synth(f: Isf) -> Netlist:
    g, kept = project_support(f)
    if g.num_vars > 2:
        raise ValueError(f"leaf_synth needs at most two support variables, got {g.num_vars}")
    builder = NetlistBuilder(f.var_names)
    root = emit_recipe(builder, leaf_recipe(g), [builder.signal(name) for name in g.var_names])
    builder.set_output("f", root)
    return builder.build()


class SingleModeSynthesizer:
    """Builds cells for single-mode functions into a shared NetlistBuilder.

    Strong steps recurse (each child has fewer variables); weak chains are
    unrolled into a loop since each step only shrinks the care set.
    """

    def __init__(self, builder: NetlistBuilder, limits: Optional[SynthLimits] = None, metrics: Optional[Metrics] = None):
        self.builder = builder
        self.limits = limits or SynthLimits()
        self.metrics = metrics

    def _guard(self, depth: int):
        if depth > self.limits.max_depth:
            raise ResourceLimitExceeded(f"decomposition depth exceeded {self.limits.max_depth}")
        if self.builder.counted > self.limits.max_cells:
            raise ResourceLimitExceeded(f"netlist grew past {self.limits.max_cells} cells")

    def leaf(self, g: Isf) -> int:
        bit = is_constant(g)
        if bit is not None:
            return self.builder.const(bit)
        ids = [self.builder.signal(name) for name in g.var_names]
        return emit_recipe(self.builder, leaf_recipe(g), ids)

    def synth(self, f: Isf, depth: int = 0) -> int:
        chain: List[Tuple[GateKind, int]] = []
        while True:
            self._guard(depth)
            g, _ = project_support(f)
            if g.num_vars <= 2:
                root = self.leaf(g)
                break
            d = bidecompose(g)
            if isinstance(d, WeakDecomp):
                record_decomposition(self.metrics, "weak")
                logger.debug("weak %s b=%s gain=%d", d.gate.value, d.b, d.gain)
                chain.append((d.gate, self.synth(d.r, depth + 1)))
                f = d.h
                continue
            if isinstance(d, StrongDecomp):
                record_decomposition(self.metrics, "strong")
                logger.debug("strong %s A=%s B=%s S=%s", d.gate.value, d.partition.a, d.partition.b, d.partition.s)
                r_id = self.synth(d.r, depth + 1)
                h_id = self.synth(d.h, depth + 1)
                root = self.builder.gate(d.gate, r_id, h_id)
                break
            record_decomposition(self.metrics, "shannon")
            x = self.builder.signal(g.var_names[d.var])
            low = self.synth(d.low, depth + 1)
            high = self.synth(d.high, depth + 1)
            root = self.mux(x, low, high)
            break
        for gate, r_id in reversed(chain):
            root = self.builder.gate(gate, r_id, root)
        return root

    def mux(self, sel: int, low: int, high: int) -> int:
        b = self.builder
        return b.gate(GateKind.OR, b.gate(GateKind.AND, b.not_(sel), low), b.gate(GateKind.AND, sel, high))


def design_outputs(
    fs: Sequence[Isf],
    input_names: Optional[Sequence[str]] = None,
    output_names: Optional[Sequence[str]] = None,
    limits: Optional[SynthLimits] = None,
    metrics: Optional[Metrics] = None,
) -> Netlist:
    """Synthesize each output independently into one netlist; cleanup shares structure."""
    if not fs:
        raise ValueError("no functions to synthesize")
    names = tuple(input_names) if input_names is not None else fs[0].var_names
    for f in fs:
        if f.var_names != names:
            raise ValueError(f"output function over {f.var_names}, expected {names}")
    outs = list(output_names) if output_names is not None else [f"f{k}" for k in range(len(fs))]
    builder = NetlistBuilder(names)
    synth = SingleModeSynthesizer(builder, limits, metrics)
    for k, (name, f) in enumerate(zip(outs, fs)):
        logger.info("output %d/%d (%s): %d variables", k + 1, len(fs), name, f.num_vars)
        builder.set_output(name, synth.synth(f))
    return cleanup(builder.build())


def design(f: Isf, limits: Optional[SynthLimits] = None, metrics: Optional[Metrics] = None) -> Netlist:
    return design_outputs([f], limits=limits, metrics=metrics)
