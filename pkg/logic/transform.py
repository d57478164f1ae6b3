"""
Transformation method: merge the two modes into one function of a mode variable
x0, synthesize it as an ordinary circuit, then eliminate x0.

Every gate reading x0 (or NOT x0) is visited in topological order. When the
gate's cone is owned by it alone, depends on at most three inputs including x0,
and a library recipe no larger than the cone exists, the whole cone becomes that
recipe (rule 3.1). Otherwise the gate alone becomes a 1-input polymorphic cell on
its other input (rule 3.2):

    AND(x0, h) -> ZERO/WIRE(h)    AND(~x0, h) -> WIRE/ZERO(h)
    OR(x0, h)  -> WIRE/ONE(h)     OR(~x0, h)  -> ONE/WIRE(h)
    XOR(x0, h) -> WIRE/NOT(h)     XOR(~x0, h) -> NOT/WIRE(h)

Outputs driven by x0 itself become the polymorphic constant ZERO/ONE (ONE/ZERO
for NOT x0).
"""
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from circuit.cleanup import cleanup
from circuit.netlist import CellKind, GateKind, Netlist, NetlistEditor, Op, unit_for
from infra.config import SynthOptions
from infra.errors import TransformInvariantError
from infra.observability import record_rule
from infra.prometheus_metrics import Metrics
from logic.bidecomp import design_outputs
from logic.boolfn import Isf, PolyFunction, VarSet, fresh_name, merge_modes
from logic.polybidecomp import poly_leaf_recipe
from logic.recipes import emit_recipe, recipe_cost, recipe_truth

logger = logging.getLogger("transform")

MAX_CONE_VARS = 3


@dataclass(frozen=True)
class Cone:
    apex: int
    members: FrozenSet[int]
    var_g: VarSet


@dataclass(frozen=True)
class RuleApplication:
    rule: str
    apex: int
    replaced: Tuple[int, ...]
    replacement: Tuple[str, ...]


@dataclass(frozen=True)
class EliminationReport:
    netlist: Netlist
    applications: Tuple[RuleApplication, ...]

    def count(self, rule: str) -> int:
        return sum(1 for a in self.applications if a.rule == rule)


def cone_of(netlist: Union[Netlist, NetlistEditor], cid: int) -> Cone:
    ed = NetlistEditor.from_netlist(netlist) if isinstance(netlist, Netlist) else netlist
    if cid not in ed.graph:
        raise ValueError(f"no cell {cid} in netlist")
    members = frozenset(nx.ancestors(ed.graph, cid)) | {cid}
    var_g = tuple(sorted(ed.kind(m).params[0] for m in members if ed.kind(m).op is Op.INPUT))
    return Cone(cid, members, var_g)


def _interior(ed: NetlistEditor, cone: Cone, x0_cell: int) -> List[int]:
    """Cone cells other than the apex, inputs and the NOT x0 literal."""
    return [
        m for m in sorted(cone.members)
        if m != cone.apex and ed.kind(m).op is not Op.INPUT and _literal(ed, m, x0_cell) is None
    ]


def _exclusive(ed: NetlistEditor, cone: Cone, x0_cell: int) -> bool:
    for m in _interior(ed, cone, x0_cell):
        if ed.drives_output(m) or any(r not in cone.members for r in ed.fanout(m)):
            return False
    return True


def _eval_cone(ed: NetlistEditor, cone: Cone, mode: int, values: Dict[int, int]) -> int:
    """Evaluate the cone in the given mode with x0 = mode - 1; values maps input index to bit."""
    out: Dict[int, np.ndarray] = {}
    for m in sorted(cone.members):
        kind = ed.kind(m)
        if kind.op is Op.INPUT:
            out[m] = np.array([bool(values[kind.params[0]])])
        else:
            out[m] = kind.evaluate(mode, [out[s] for s in ed.fanin(m)], 1)
    return int(out[cone.apex][0])


def _cone_modes(ed: NetlistEditor, cone: Cone, x0_index: int) -> PolyFunction:
    """The cone's mode-1 and mode-2 functions over its inputs other than x0."""
    real = [v for v in cone.var_g if v != x0_index]
    names = [ed.inputs[v] for v in real]
    tables = []
    for mode in (1, 2):
        values = []
        for m in range(1 << len(real)):
            assign = {v: (m >> j) & 1 for j, v in enumerate(real)}
            assign[x0_index] = mode - 1
            values.append(_eval_cone(ed, cone, mode, assign))
        tables.append(Isf.from_truth(names, values))
    return PolyFunction(tables[0], tables[1])


def _literal(ed: NetlistEditor, cid: int, x0_cell: int) -> Optional[int]:
    """1 for x0, 0 for NOT x0, None otherwise."""
    if cid == x0_cell:
        return 1
    if ed.kind(cid).op is Op.NOT and ed.fanin(cid) == (x0_cell,):
        return 0
    return None


def _check(ok: bool, what: str):
    if not ok:
        raise TransformInvariantError(f"local check failed: {what}")


def replace_cone_rule31(ed: NetlistEditor, cone: Cone, x0_index: int, check: bool = True) -> Optional[RuleApplication]:
    """Replace an exclusively owned cone of at most three inputs by its cheapest recipe.
    Returns None (netlist untouched) when the preconditions do not hold."""
    x0_cell = ed.input_cell(ed.inputs[x0_index])
    if x0_index not in cone.var_g or len(cone.var_g) > MAX_CONE_VARS:
        return None
    if not _exclusive(ed, cone, x0_cell):
        return None
    pf = _cone_modes(ed, cone, x0_index)
    leaf = poly_leaf_recipe(pf)
    if leaf is None:
        return None
    recipe, names = leaf
    counted = [m for m in _interior(ed, cone, x0_cell) + [cone.apex] if ed.kind(m).is_counted]
    if recipe_cost(recipe) > len(counted):
        return None
    if check:
        k = len(names)
        for mode, fn in ((1, pf.mode1), (2, pf.mode2)):
            truth = recipe_truth(recipe, k, mode)
            # pf spans the cone's real inputs; the recipe may use a subset of them
            full = list(fn.var_names)
            for m in range(1 << len(full)):
                sub = sum(((m >> full.index(nm)) & 1) << j for j, nm in enumerate(names))
                _check(bool(truth[sub]) == bool(fn.on[m]), f"rule 3.1 at cell {cone.apex}, mode {mode}")
    before = set(ed.graph.nodes)
    root = emit_recipe(_EditorBuilder(ed), recipe, [ed.input_cell(n) for n in names])
    added = tuple(sorted(set(ed.graph.nodes) - before))
    ed.substitute(cone.apex, root)
    return RuleApplication("3.1", cone.apex, tuple(counted), tuple(ed.kind(c).tag for c in added))


def replace_gate_rule32(ed: NetlistEditor, cid: int, x0_cell: int, check: bool = True) -> RuleApplication:
    kind = ed.kind(cid)
    gate = kind.gate_kind
    if gate is None:
        raise TransformInvariantError(f"cell {cid} ({kind.tag}) is not a gate")
    a, b = ed.fanin(cid)
    lit = _literal(ed, a, x0_cell)
    other = b
    if lit is None:
        lit = _literal(ed, b, x0_cell)
        other = a
    if lit is None:
        raise TransformInvariantError(f"cell {cid} is not fed by the mode variable")
    # positive literal: mode 1 sees x0 = 0; negated literal flips that
    u1 = unit_for(gate, 0 if lit else 1)
    u2 = unit_for(gate, 1 if lit else 0)
    new = CellKind.poly1(u1, u2)
    if check:
        for mode, x0 in ((1, 0), (2, 1)):
            lit_value = x0 if lit else 1 - x0
            for h in (0, 1):
                _check(gate.apply(lit_value, h) == new.params[mode - 1].apply(h), f"rule 3.2 at cell {cid}")
    ed.replace(cid, new, (other,))
    return RuleApplication("3.2", cid, (cid,), (new.tag,))


class _EditorBuilder:
    """The slice of the NetlistBuilder interface emit_recipe needs, over an editor."""

    def __init__(self, ed: NetlistEditor):
        self.ed = ed

    def const(self, bit):
        return self.ed.add(CellKind.const(bit))

    def not_(self, a):
        return self.ed.add(CellKind.not_(), a)

    def gate(self, g, a, b):
        return self.ed.add(CellKind.gate(g), a, b)

    def poly2(self, g1, g2, a, b):
        if g1 == g2:
            return self.gate(g1, a, b)
        return self.ed.add(CellKind.poly2(g1, g2), a, b)

    def poly1(self, u1, u2, a):
        return self.ed.add(CellKind.poly1(u1, u2), a)

    def polyconst(self, b1, b2):
        return self.ed.add(CellKind.polyconst(b1, b2))


def eliminate_x0(
    netlist: Netlist,
    mode_var: str = "x0",
    check_locality: bool = True,
    metrics: Optional[Metrics] = None,
) -> EliminationReport:
    if mode_var not in netlist.inputs:
        return EliminationReport(netlist, ())
    ed = NetlistEditor.from_netlist(cleanup(netlist))
    x0_index = ed.inputs.index(mode_var)
    x0_cell = ed.input_cell(mode_var)
    applications: List[RuleApplication] = []

    for cid in ed.topo_order():
        if cid not in ed.graph:
            continue
        kind = ed.kind(cid)
        if kind.gate_kind is None:
            continue
        if not any(_literal(ed, src, x0_cell) is not None for src in ed.fanin(cid)):
            continue
        app = replace_cone_rule31(ed, cone_of(ed, cid), x0_index, check_locality)
        if app is None:
            app = replace_gate_rule32(ed, cid, x0_cell, check_locality)
        logger.debug("rule %s at cell %d -> %s", app.rule, app.apex, ",".join(app.replacement))
        record_rule(metrics, app.rule)
        applications.append(app)

    for out in ed.outputs:
        lit = _literal(ed, out[1], x0_cell)
        if lit is None:
            continue
        kind = CellKind.polyconst(0, 1) if lit else CellKind.polyconst(1, 0)
        new = ed.add(kind)
        applications.append(RuleApplication("output", out[1], (), (kind.tag,)))
        record_rule(metrics, "output")
        out[1] = new

    ed.sweep()
    if ed.fanout(x0_cell):
        readers = ", ".join(f"{c}:{ed.kind(c).tag}" for c in ed.fanout(x0_cell))
        raise TransformInvariantError(f"{mode_var} is still read by {readers}")
    result = cleanup(ed.to_netlist(drop_inputs=(mode_var,)))
    logger.info("eliminated %s with %d rule applications", mode_var, len(applications))
    return EliminationReport(result, tuple(applications))


def transform_design_outputs(
    pfs: Sequence[PolyFunction],
    output_names: Optional[Sequence[str]] = None,
    options: Optional[SynthOptions] = None,
    metrics: Optional[Metrics] = None,
    mode_labels: Sequence[str] = ("mode1", "mode2"),
) -> EliminationReport:
    if not pfs:
        raise ValueError("no functions to synthesize")
    options = options or SynthOptions()
    names = pfs[0].var_names
    mode_var = fresh_name(names)
    merged = [merge_modes(pf, mode_var) for pf in pfs]
    cir = design_outputs(merged, names + (mode_var,), output_names, options.limits, metrics)
    report = eliminate_x0(cir, mode_var, options.check_locality, metrics)
    net = report.netlist
    relabelled = Netlist(net.inputs, net.cells, net.outputs, tuple(mode_labels))
    return EliminationReport(relabelled, report.applications)


def transform_design(pf: PolyFunction, options: Optional[SynthOptions] = None, metrics: Optional[Metrics] = None) -> Netlist:
    return transform_design_outputs([pf], options=options, metrics=metrics).netlist
