import pytest

from bench.generators import gen_majority, gen_parity
from circuit.netlist import CellKind, GateKind, gate_stats
from circuit.verify import verify
from infra.config import SynthOptions
from logic.bidecomp import design
from logic.boolfn import Isf, PolyFunction
from logic.polybidecomp import (
    PolyGateKind,
    find_initial_variable,
    merge_and_decompose,
    poly_decomposition,
    poly_design,
    poly_design_outputs,
    poly_leaf_recipe,
    poly_leaf_synth,
    project_poly_support,
)
from logic.transform import transform_design
from tests.helpers import gate_sound, random_poly, random_total

X12 = ("x1", "x2")
X123 = ("x1", "x2", "x3")


def _fn(names, fn):
    return Isf.from_function(names, fn)


PARITY3_OR3 = PolyFunction(_fn(X123, lambda a, b, c: a ^ b ^ c), _fn(X123, lambda a, b, c: a | b | c))
PARITY4_MAJ4 = PolyFunction(gen_parity(4), gen_majority(4))


def _counted(net):
    return [c.kind for c in net.cells if c.kind.is_counted]


def test_poly_gate_needs_two_functions():
    with pytest.raises(ValueError):
        PolyGateKind(GateKind.AND, GateKind.AND)
    assert PolyGateKind(GateKind.XOR, GateKind.OR).tag == "XOR/OR"


def test_initial_variable_pairs_xor_with_or():
    g2, a, b = find_initial_variable(PARITY3_OR3, GateKind.XOR)
    assert (g2, a, b) == (GateKind.OR, (0,), (1,))
    assert find_initial_variable(PARITY3_OR3, GateKind.AND) is None


def test_initial_variable_prefers_the_same_gate():
    pf = PolyFunction(_fn(X12, lambda a, b: a & b), _fn(X12, lambda a, b: a & b))
    assert find_initial_variable(pf, GateKind.AND)[0] is GateKind.AND
    assert find_initial_variable(pf, GateKind.AND, g2_distinct=True) is None


def test_parity_or_decomposes_as_xor_or():
    p = poly_decomposition(PARITY3_OR3)
    assert (p.gate1, p.gate2) == (GateKind.XOR, GateKind.OR)
    assert p.gate == PolyGateKind(GateKind.XOR, GateKind.OR)
    assert len(p.partition.a) + len(p.partition.b) == 3
    assert gate_sound(p.gate1, p.r.mode1, p.h.mode1, PARITY3_OR3.mode1)
    assert gate_sound(p.gate2, p.r.mode2, p.h.mode2, PARITY3_OR3.mode2)


def test_parity_majority_has_no_poly_decomposition():
    assert poly_decomposition(PARITY4_MAJ4) is None
    for g1 in (GateKind.AND, GateKind.OR, GateKind.XOR):
        assert find_initial_variable(PARITY4_MAJ4, g1) is None


def test_planted_xor_or_decomposition_is_found(rng):
    for _ in range(10):
        r1, r2 = random_total(rng, ("x2", "x3", "x4")), random_total(rng, ("x2", "x3", "x4"))
        h1, h2 = random_total(rng, ("x1", "x2")), random_total(rng, ("x1", "x2"))
        names = ("x1", "x2", "x3", "x4")

        def lift(f, cols):
            return lambda *bits: int(f.on[sum(bits[c] << j for j, c in enumerate(cols))])

        rr1, rr2 = lift(r1, (1, 2, 3)), lift(r2, (1, 2, 3))
        hh1, hh2 = lift(h1, (0, 1)), lift(h2, (0, 1))
        pf = PolyFunction(
            _fn(names, lambda *x: rr1(*x) ^ hh1(*x)),
            _fn(names, lambda *x: rr2(*x) | hh2(*x)),
        )
        p = poly_decomposition(pf)
        # x1 against x3 always splits both modes, so something is found
        assert p is not None
        assert gate_sound(p.gate1, p.r.mode1, p.h.mode1, pf.mode1)
        assert gate_sound(p.gate2, p.r.mode2, p.h.mode2, pf.mode2)


def test_merge_and_decompose_parity_majority():
    m = merge_and_decompose(PARITY4_MAJ4)
    assert m.mode_var == "x0"
    assert m.kind == "weak"
    assert m.gate in (GateKind.AND, GateKind.OR)


def test_poly_support_drops_unused_variables():
    pf = PolyFunction(_fn(X123, lambda a, b, c: a), _fn(X123, lambda a, b, c: b))
    reduced, kept = project_poly_support(pf)
    assert kept == (0, 1)
    assert reduced.var_names == X12


def test_leaf_and_or_is_one_cell():
    pf = PolyFunction(_fn(X12, lambda a, b: a & b), _fn(X12, lambda a, b: a | b))
    net = poly_leaf_synth(pf)
    assert _counted(net) == [CellKind.poly2(GateKind.AND, GateKind.OR)]
    assert verify(net, pf).passed


def test_leaf_zero_wire():
    pf = PolyFunction(Isf.constant(("x1",), 0), Isf.variable(("x1",), 0))
    recipe, names = poly_leaf_recipe(pf)
    assert recipe == ("poly1", "ZERO", "WIRE", ("var", 0))
    assert names == ("x1",)


def test_leaf_and_xor():
    pf = PolyFunction(_fn(X12, lambda a, b: a & b), _fn(X12, lambda a, b: a ^ b))
    assert _counted(poly_leaf_synth(pf)) == [CellKind.poly2(GateKind.AND, GateKind.XOR)]


def test_leaf_nand_or_falls_back_to_merging():
    pf = PolyFunction(_fn(X12, lambda a, b: 1 - (a & b)), _fn(X12, lambda a, b: a | b))
    assert poly_leaf_recipe(pf) is None
    net = poly_leaf_synth(pf)
    assert verify(net, pf).passed
    assert gate_stats(net).total_counted <= 3


def test_same_function_in_both_modes_is_single_mode():
    pf = PolyFunction(gen_parity(4), gen_parity(4))
    net = poly_design(pf)
    assert gate_stats(net).poly_count == 0
    assert net == design(gen_parity(4))


def test_parity_majority_verifies_in_both_modes():
    net = poly_design(PARITY4_MAJ4)
    report = verify(net, PARITY4_MAJ4)
    assert report.passed
    assert report.checks == 32
    assert gate_stats(net).poly_count >= 1


def test_g2_distinct_still_realizes_the_function():
    net = poly_design(PARITY3_OR3, SynthOptions(g2_distinct=True))
    assert verify(net, PARITY3_OR3).passed


def test_outputs_are_named_and_share_inputs(rng):
    pfs = [random_poly(rng, 4) for _ in range(2)]
    net = poly_design_outputs(pfs, output_names=["s", "t"], mode_labels=("VDD3.3", "VDD1.8"))
    assert net.output_names == ("s", "t")
    assert net.mode_labels == ("VDD3.3", "VDD1.8")
    assert verify(net, pfs).passed


def test_random_poly_functions_verify(rng):
    for n in (2, 3, 4, 5, 6):
        for _ in range(12):
            pf = random_poly(rng, n)
            assert verify(poly_design(pf), pf).passed


@pytest.mark.slow
@pytest.mark.parametrize("synth", [poly_design, transform_design], ids=["poly-bidec", "xform-bidec"])
def test_thousand_random_poly_functions(rng, synth):
    for k in range(1000):
        pf = random_poly(rng, 1 + k % 6)
        assert verify(synth(pf), pf).passed
