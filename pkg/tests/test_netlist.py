import numpy as np
import pytest

from circuit.cleanup import cleanup
from circuit.netlist import (
    Cell,
    CellKind,
    GateKind,
    Netlist,
    NetlistBuilder,
    NetlistEditor,
    Op,
    Unit,
    gate_stats,
    simulate,
    simulate_vectors,
)
from circuit.serialize import from_json, to_dot, to_json
from circuit.verify import verify
from infra.errors import NetlistFormatError, SpecError
from logic.boolfn import Isf, PolyFunction, minterm_columns
from tests.helpers import random_netlist

X12 = ("x1", "x2")
AND_OR = PolyFunction(
    Isf.from_function(X12, lambda a, b: a & b),
    Isf.from_function(X12, lambda a, b: a | b),
)


def _one_cell(kind: CellKind) -> Netlist:
    b = NetlistBuilder(X12)
    fanin = [b.signal(n) for n in X12][: kind.arity]
    b.set_output("f", b.add(kind, *fanin))
    return b.build()


def test_poly2_follows_the_mode():
    net = _one_cell(CellKind.poly2(GateKind.AND, GateKind.OR))
    assert simulate(net, (1, 0), 1) == (0,)
    assert simulate(net, (1, 0), 2) == (1,)


def test_poly1_zero_wire():
    net = _one_cell(CellKind.poly1(Unit.ZERO, Unit.WIRE))
    assert simulate(net, (1, 0), 1) == (0,)
    assert simulate(net, (1, 0), 2) == (1,)


def test_polyconst_ignores_inputs():
    net = _one_cell(CellKind.polyconst(1, 0))
    assert simulate(net, (0, 0), 1) == (1,)
    assert simulate(net, (1, 1), 2) == (0,)


def test_bad_mode_is_rejected():
    with pytest.raises(ValueError):
        simulate(_one_cell(CellKind.gate(GateKind.AND)), (0, 0), 3)


def test_netlist_rejects_forward_references():
    with pytest.raises(ValueError):
        Netlist(("a",), (Cell(CellKind.not_(), (1,)), Cell(CellKind.input(0))), ())


def test_equal_gates_make_a_plain_gate():
    b = NetlistBuilder(X12)
    cid = b.poly2(GateKind.OR, GateKind.OR, b.signal("x1"), b.signal("x2"))
    assert b.cells[cid].kind == CellKind.gate(GateKind.OR)


def test_tags_round_trip():
    kinds = [
        CellKind.input(3), CellKind.const(1), CellKind.not_(),
        CellKind.gate(GateKind.XOR),
        CellKind.poly2(GateKind.XOR, GateKind.AND),
        CellKind.poly1(Unit.NOT, Unit.ONE),
        CellKind.polyconst(0, 1),
    ]
    for kind in kinds:
        assert CellKind.from_tag(kind.tag) == kind
    assert CellKind.poly2(GateKind.AND, GateKind.OR).tag == "POLY2:AND/OR"
    with pytest.raises(ValueError):
        CellKind.from_tag("POLY2:AND")


def test_stats_count_poly_share():
    b = NetlistBuilder(("a", "b", "c", "d"))
    a, bb, c, d = (b.signal(n) for n in ("a", "b", "c", "d"))
    x = b.gate(GateKind.XOR, a, bb)
    y = b.gate(GateKind.XOR, c, d)
    z = b.gate(GateKind.XOR, x, y)
    b.set_output("f", b.poly2(GateKind.AND, GateKind.OR, z, a))
    stats = gate_stats(b.build())
    assert (stats.total_counted, stats.poly_count) == (4, 1)
    assert stats.poly_percent == 25.0
    assert stats.line() == "total=4 poly=1 percent=25.0"


def test_inputs_and_constants_are_free():
    b = NetlistBuilder(X12)
    b.set_output("f", b.const(1))
    assert gate_stats(b.build()).total_counted == 0


def test_cleanup_folds_xor_of_a_signal_with_itself():
    b = NetlistBuilder(X12)
    a, c = b.signal("x1"), b.signal("x2")
    b.set_output("f", b.gate(GateKind.AND, b.gate(GateKind.XOR, a, a), c))
    net = cleanup(b.build())
    driver = net.cells[net.outputs[0][1]]
    assert driver.kind == CellKind.const(0)
    assert gate_stats(net).total_counted == 0
    assert len(net.inputs) == 2


def test_cleanup_merges_identical_cells():
    b = NetlistBuilder(X12)
    a, c = b.signal("x1"), b.signal("x2")
    b.set_output("f", b.gate(GateKind.OR, b.gate(GateKind.AND, a, c), b.gate(GateKind.AND, c, a)))
    net = cleanup(b.build())
    assert gate_stats(net).total_counted == 1


def test_cleanup_collapses_poly1_chains():
    b = NetlistBuilder(("a",))
    inner = b.poly1(Unit.NOT, Unit.WIRE, b.signal("a"))
    b.set_output("f", b.poly1(Unit.WIRE, Unit.NOT, inner))
    net = cleanup(b.build())
    # NOT in mode 1 after WIRE, NOT in mode 2 after NOT: a plain inverter
    assert [c.kind for c in net.cells if c.kind.is_counted] == [CellKind.not_()]


def test_cleanup_preserves_both_modes(rng):
    for _ in range(10):
        net = random_netlist(rng, 5, 60)
        cols = minterm_columns(5)
        folded = cleanup(net)
        assert gate_stats(folded).total_counted <= gate_stats(net).total_counted
        for mode in (1, 2):
            before = simulate_vectors(net, cols, mode)
            after = simulate_vectors(folded, cols, mode)
            for x, y in zip(before, after):
                assert np.array_equal(x, y)


def test_json_round_trip(rng):
    net = random_netlist(rng, 6, 100)
    assert from_json(to_json(net)) == net


def test_json_errors_carry_position():
    with pytest.raises(NetlistFormatError) as err:
        from_json('{"version": 1,\n  "inputs": [}')
    assert err.value.line == 2
    with pytest.raises(NetlistFormatError):
        from_json('{"version": 2, "inputs": [], "cells": [], "outputs": []}')
    with pytest.raises(NetlistFormatError):
        from_json('{"version": 1, "inputs": ["a"], "cells": [{"id": 0, "kind": "NOT", "fanin": [0]}], "outputs": []}')


def test_dot_marks_polymorphic_cells():
    text = to_dot(_one_cell(CellKind.poly2(GateKind.AND, GateKind.OR)))
    assert 'label="AND/OR"' in text
    assert "fillcolor=lightgrey" in text
    assert text.startswith("digraph netlist {")


def test_editor_substitute_and_sweep():
    b = NetlistBuilder(X12)
    a, c = b.signal("x1"), b.signal("x2")
    old = b.gate(GateKind.AND, a, c)
    b.set_output("f", b.not_(old))
    ed = NetlistEditor.from_netlist(b.build())
    new = ed.add(CellKind.gate(GateKind.OR), a, c)
    ed.substitute(old, new)
    assert ed.sweep() == 1
    net = ed.to_netlist()
    assert [c.kind.op for c in net.cells if c.kind.is_counted] == [Op.OR2, Op.NOT]
    assert simulate(net, (1, 0), 1) == (0,)


def test_editor_refuses_to_drop_a_read_input():
    b = NetlistBuilder(X12)
    b.set_output("f", b.not_(b.signal("x2")))
    ed = NetlistEditor.from_netlist(b.build())
    with pytest.raises(ValueError):
        ed.to_netlist(drop_inputs=("x2",))
    assert ed.to_netlist(drop_inputs=("x1",)).inputs == ("x2",)


def test_verify_passes_a_correct_cell():
    report = verify(_one_cell(CellKind.poly2(GateKind.AND, GateKind.OR)), AND_OR)
    assert report.passed
    assert report.exhaustive
    assert report.checks == 8


def test_verify_reports_first_counterexample():
    report = verify(_one_cell(CellKind.poly2(GateKind.OR, GateKind.AND)), AND_OR)
    assert not report.passed
    cex = report.counterexample
    assert (cex.mode, cex.output, cex.assignment, cex.expected, cex.actual) == (1, "f", (1, 0), 0, 1)
    assert "x1=1 x2=0" in cex.describe(X12)


def test_verify_accepts_anything_on_an_empty_care_set():
    dc = Isf.from_truth(X12, [None] * 4)
    assert verify(_one_cell(CellKind.gate(GateKind.XOR)), PolyFunction(dc, dc)).passed


def test_verify_samples_beyond_the_limit():
    report = verify(_one_cell(CellKind.poly2(GateKind.AND, GateKind.OR)), AND_OR, limit=1, samples=64, seed=7)
    assert report.passed
    assert not report.exhaustive
    assert report.checks == 128


def test_verify_rejects_arity_mismatch():
    wide = PolyFunction(Isf.constant(("a", "b", "c"), 0), Isf.constant(("a", "b", "c"), 0))
    with pytest.raises(SpecError):
        verify(_one_cell(CellKind.gate(GateKind.AND)), wide)
