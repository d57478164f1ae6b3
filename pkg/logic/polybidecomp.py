"""
Polymorphic bi-decomposition of two-mode functions.

A two-mode function f1/f2 decomposes through a polymorphic gate g1/g2 when one
partition (A, B, S) works for both modes: f1 = g1(r1, h1) and f2 = g2(r2, h2).
The search seeds on the first variable pair that works for both modes, grows the
partition greedily and keeps the best score over g1 in {AND, OR, XOR}.

When no such partition exists the two modes are merged into one function of an
extra mode variable x0 (x0 = 0 selects mode 1), decomposed as a single-mode
function and split back: children depending on x0 stay two-mode, the others
are ordinary functions.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

from circuit.cleanup import cleanup
from circuit.netlist import GATE_ORDER, GateKind, Netlist, NetlistBuilder, Unit
from infra.config import SynthOptions
from infra.errors import ResourceLimitExceeded
from infra.observability import record_decomposition
from infra.prometheus_metrics import Metrics
from logic.bidecomp import (
    Partition,
    ShannonDecomp,
    SingleModeSynthesizer,
    StrongDecomp,
    WeakDecomp,
    bidecompose,
    check_strong,
    is_decomposable,
    score,
)
from logic.boolfn import (
    Isf,
    PolyFunction,
    VarSet,
    merge_modes,
    merge_out,
    project_support,
    split_modes,
    support,
)
from logic.recipes import emit_recipe, find_recipe, poly_library

logger = logging.getLogger("polybidecomp")

Child = Union[PolyFunction, Isf]


@dataclass(frozen=True)
class PolyGateKind:
    g1: GateKind
    g2: GateKind

    def __post_init__(self):
        if self.g1 == self.g2:
            raise ValueError(f"a polymorphic gate needs two different functions, got {self.g1.value} twice")

    @property
    def tag(self) -> str:
        return f"{self.g1.value}/{self.g2.value}"


POLY_GATE_KINDS = tuple(PolyGateKind(g1, g2) for g1 in GATE_ORDER for g2 in GATE_ORDER if g1 != g2)


@dataclass(frozen=True)
class PolyStrong:
    gate1: GateKind
    gate2: GateKind
    partition: Partition
    r: PolyFunction
    h: PolyFunction

    @property
    def gate(self) -> Union[GateKind, PolyGateKind]:
        if self.gate1 == self.gate2:
            return self.gate1
        return PolyGateKind(self.gate1, self.gate2)


@dataclass(frozen=True)
class Merged:
    """Result of merge-and-decompose.

    kind is "strong", "weak" or "shannon". For Shannon steps pivot names the
    expansion variable and gate is None; pivot == mode_var is a plain mode split
    whose children are mode 1 and mode 2 as single-mode functions.
    """
    kind: str
    gate: Optional[GateKind]
    left: Child
    right: Child
    mode_var: str
    pivot: Optional[str] = None

    @property
    def is_mode_split(self) -> bool:
        return self.kind == "shannon" and self.pivot == self.mode_var


def project_poly_support(pf: PolyFunction) -> Tuple[PolyFunction, VarSet]:
    """Drop variables neither mode needs, one at a time; returns kept original indices."""
    kept = list(range(pf.num_vars))
    m1, m2 = pf.mode1, pf.mode2
    while True:
        needed = set(support(m1)) | set(support(m2))
        idle = [v for v in range(m1.num_vars) if v not in needed]
        if not idle:
            return PolyFunction(m1, m2), tuple(kept)
        v = idle[-1]
        m1, m2 = merge_out(m1, v), merge_out(m2, v)
        del kept[v]


def _g2_order(g1: GateKind, g2_distinct: bool) -> List[GateKind]:
    others = [g for g in GATE_ORDER if g != g1]
    return others if g2_distinct else [g1] + others


def find_initial_variable(
    pf: PolyFunction, g1: GateKind, g2_distinct: bool = False
) -> Optional[Tuple[GateKind, VarSet, VarSet]]:
    """First pair ({xi}, {xj}), i < j, where mode 1 splits through g1 and mode 2 through some g2."""
    n = pf.num_vars
    g1 = GateKind(g1)
    for i in range(n):
        for j in range(i + 1, n):
            part = Partition.of((i,), (j,), n)
            if not is_decomposable(pf.mode1, g1, part):
                continue
            for g2 in _g2_order(g1, g2_distinct):
                if is_decomposable(pf.mode2, g2, part):
                    return g2, (i,), (j,)
    return None


def _both(pf: PolyFunction, g1: GateKind, g2: GateKind, part: Partition) -> bool:
    return is_decomposable(pf.mode1, g1, part) and is_decomposable(pf.mode2, g2, part)


def poly_decomposition(pf: PolyFunction, g2_distinct: bool = False) -> Optional[PolyStrong]:
    """Best-scoring decomposition valid in both modes, or None."""
    n = pf.num_vars
    best: Optional[Tuple[int, GateKind, GateKind, Partition]] = None
    for g1 in GATE_ORDER:
        seed = find_initial_variable(pf, g1, g2_distinct)
        if seed is None:
            continue
        g2, a0, b0 = seed
        a, b = list(a0), list(b0)
        for x in range(n):
            if x in a or x in b:
                continue
            if _both(pf, g1, g2, Partition.of(a + [x], b, n)):
                a.append(x)
            elif _both(pf, g1, g2, Partition.of(a, b + [x], n)):
                b.append(x)
        part = Partition.of(a, b, n)
        if len(part.a) > len(part.b):
            part = part.swapped()
        sc = score(part, n)
        logger.debug("poly candidate %s/%s A=%s B=%s score=%d", g1.value, g2.value, part.a, part.b, sc)
        if best is None or sc > best[0]:
            best = (sc, g1, g2, part)
    if best is None:
        return None
    _, g1, g2, part = best
    r1, h1 = check_strong(pf.mode1, g1, part)
    r2, h2 = check_strong(pf.mode2, g2, part)
    return PolyStrong(g1, g2, part, PolyFunction(r1, r2), PolyFunction(h1, h2))


def _split_child(f: Isf, mode_var: str) -> Child:
    """Two-mode when f still needs the mode variable, otherwise single-mode without it."""
    if mode_var not in f.var_names:
        return f
    x0 = f.index_of(mode_var)
    if x0 in support(f):
        return split_modes(f, x0)
    return merge_out(f, x0)


def _stalled(child: Child, pf: PolyFunction) -> bool:
    if not isinstance(child, PolyFunction):
        return False
    reduced, _ = project_poly_support(child)
    return reduced.num_vars >= pf.num_vars and reduced.care_count >= pf.care_count


def merge_and_decompose(pf: PolyFunction) -> Merged:
    merged = merge_modes(pf)
    mode_var = merged.var_names[-1]
    g, _ = project_support(merged)
    if g.num_vars <= 2:
        raise ValueError("merged function has too few variables to decompose")
    d = bidecompose(g)
    if isinstance(d, StrongDecomp):
        result = Merged("strong", d.gate, _split_child(d.r, mode_var), _split_child(d.h, mode_var), mode_var)
    elif isinstance(d, WeakDecomp):
        result = Merged("weak", d.gate, _split_child(d.r, mode_var), _split_child(d.h, mode_var), mode_var)
    else:
        pivot = g.var_names[d.var]
        if pivot == mode_var:
            result = Merged("shannon", None, d.low, d.high, mode_var, pivot)
        else:
            result = Merged("shannon", None, _split_child(d.low, mode_var), _split_child(d.high, mode_var), mode_var, pivot)
    if _stalled(result.left, pf) or _stalled(result.right, pf):
        logger.debug("merge made no progress; splitting on the mode variable")
        return Merged("shannon", None, pf.mode1, pf.mode2, mode_var, mode_var)
    return result


def poly_leaf_recipe(pf: PolyFunction):
    """(recipe, leaf names) for a two-mode function with at most two support
    variables, or None when no single library cell (plus inverters) fits."""
    reduced, _ = project_poly_support(pf)
    k = reduced.num_vars
    if k > 2:
        raise ValueError(f"poly leaf needs at most two support variables, got {k}")
    m1, m2 = reduced.mode1, reduced.mode2
    recipe = find_recipe(poly_library(k), m1.on, m1.off, m2.on, m2.off)
    if recipe is None:
        return None
    return recipe, reduced.var_names


class PolySynthesizer:
    """Recursive two-mode synthesis into a shared NetlistBuilder."""

    def __init__(self, builder: NetlistBuilder, options: Optional[SynthOptions] = None, metrics: Optional[Metrics] = None):
        self.builder = builder
        self.options = options or SynthOptions()
        self.metrics = metrics
        self.single = SingleModeSynthesizer(builder, self.options.limits, metrics)

    def _guard(self, depth: int):
        limits = self.options.limits
        if depth > limits.max_depth:
            raise ResourceLimitExceeded(f"decomposition depth exceeded {limits.max_depth}")
        if self.builder.counted > limits.max_cells:
            raise ResourceLimitExceeded(f"netlist grew past {limits.max_cells} cells")

    def child(self, c: Child, depth: int) -> int:
        if isinstance(c, PolyFunction):
            return self.synth(c, depth)
        return self.single.synth(c, depth)

    def synth(self, pf: PolyFunction, depth: int = 0) -> int:
        chain: List[Tuple[GateKind, int]] = []
        while True:
            self._guard(depth)
            g, _ = project_poly_support(pf)
            if g.is_single_mode():
                root = self.single.synth(g.combined(), depth + 1)
                break
            if g.num_vars <= 2:
                leaf = poly_leaf_recipe(g)
                if leaf is not None:
                    recipe, names = leaf
                    root = emit_recipe(self.builder, recipe, [self.builder.signal(n) for n in names])
                    break
            else:
                p = poly_decomposition(g, self.options.g2_distinct)
                if p is not None:
                    record_decomposition(self.metrics, "poly-strong")
                    logger.debug("poly %s/%s A=%s B=%s", p.gate1.value, p.gate2.value, p.partition.a, p.partition.b)
                    r_id = self.synth(p.r, depth + 1)
                    h_id = self.synth(p.h, depth + 1)
                    root = self.builder.poly2(p.gate1, p.gate2, r_id, h_id)
                    break
            m = merge_and_decompose(g)
            if m.kind == "weak" and isinstance(m.right, PolyFunction):
                record_decomposition(self.metrics, "merged")
                chain.append((m.gate, self.child(m.left, depth + 1)))
                pf = m.right
                continue
            root = self.realize(m, depth)
            break
        for gate, left in reversed(chain):
            root = self.builder.gate(gate, left, root)
        return root

    def realize(self, m: Merged, depth: int) -> int:
        b = self.builder
        if m.is_mode_split:
            record_decomposition(self.metrics, "mode-split")
            d1 = self.single.synth(m.left, depth + 1)
            d2 = self.single.synth(m.right, depth + 1)
            return b.gate(GateKind.OR, b.poly1(Unit.WIRE, Unit.ZERO, d1), b.poly1(Unit.ZERO, Unit.WIRE, d2))
        record_decomposition(self.metrics, "merged")
        left = self.child(m.left, depth + 1)
        right = self.child(m.right, depth + 1)
        if m.kind == "shannon":
            return self.single.mux(b.signal(m.pivot), left, right)
        return b.gate(m.gate, left, right)


def poly_design_outputs(
    pfs: Sequence[PolyFunction],
    output_names: Optional[Sequence[str]] = None,
    options: Optional[SynthOptions] = None,
    metrics: Optional[Metrics] = None,
    mode_labels: Sequence[str] = ("mode1", "mode2"),
) -> Netlist:
    if not pfs:
        raise ValueError("no functions to synthesize")
    names = pfs[0].var_names
    for pf in pfs:
        if pf.var_names != names:
            raise ValueError(f"output function over {pf.var_names}, expected {names}")
    outs = list(output_names) if output_names is not None else [f"f{k}" for k in range(len(pfs))]
    builder = NetlistBuilder(names, mode_labels)
    synth = PolySynthesizer(builder, options, metrics)
    for k, (name, pf) in enumerate(zip(outs, pfs)):
        logger.info("output %d/%d (%s): %d variables", k + 1, len(pfs), name, pf.num_vars)
        builder.set_output(name, synth.synth(pf))
    return cleanup(builder.build())


def poly_design(pf: PolyFunction, options: Optional[SynthOptions] = None, metrics: Optional[Metrics] = None) -> Netlist:
    return poly_design_outputs([pf], options=options, metrics=metrics)


def poly_leaf_synth(pf: PolyFunction, options: Optional[SynthOptions] = None) -> Netlist:
    reduced, _ = project_poly_support(pf)
    if reduced.num_vars > 2:
        raise ValueError(f"poly_leaf_synth needs at most two support variables, got {reduced.num_vars}")
    return poly_design(pf, options)
