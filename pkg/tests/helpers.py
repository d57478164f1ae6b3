import numpy as np

from circuit.netlist import GATE_ORDER, GateKind, NetlistBuilder, Unit
from logic.boolfn import Isf, PolyFunction


def random_isf(rng, names, dc_rate=1 / 3):
    """Each minterm is don't-care with probability dc_rate, otherwise on or off evenly."""
    size = 1 << len(names)
    draw = rng.random(size)
    dc = draw < dc_rate
    on = ~dc & (rng.random(size) < 0.5)
    off = ~dc & ~on
    return Isf(on, off, names)


def random_total(rng, names):
    return random_isf(rng, names, dc_rate=0.0)


def random_poly(rng, n, dc_rate=1 / 3):
    names = tuple(f"x{i}" for i in range(1, n + 1))
    return PolyFunction(random_isf(rng, names, dc_rate), random_isf(rng, names, dc_rate))


def expand(f: Isf, names):
    """on/off of f (over a subset of names) lifted to the minterm space of names."""
    index = np.arange(1 << len(names), dtype=np.int64)
    sub = np.zeros_like(index)
    for j, name in enumerate(f.var_names):
        sub |= ((index >> names.index(name)) & 1) << j
    return f.on[sub], f.off[sub]


def gate_sound(gate, r: Isf, h: Isf, f: Isf) -> bool:
    """Every completion of r and h recombined through gate agrees with f on f's care set."""
    r_on, r_off = expand(r, f.var_names)
    h_on, h_off = expand(h, f.var_names)
    gate = GateKind(gate)
    if gate is GateKind.OR:
        ok_on = r_on | h_on
        ok_off = r_off & h_off
    elif gate is GateKind.AND:
        ok_on = r_on & h_on
        ok_off = r_off | h_off
    else:
        known = (r_on | r_off) & (h_on | h_off)
        ok_on = known & (r_on ^ h_on)
        ok_off = known & ~(r_on ^ h_on)
    return not (f.on & ~ok_on).any() and not (f.off & ~ok_off).any()


def single_spec(f: Isf) -> PolyFunction:
    return PolyFunction(f, f)


def random_netlist(rng, num_inputs, num_cells, num_outputs=3):
    """Random well-formed netlist over every cell kind, for structural tests."""
    units = list(Unit)
    builder = NetlistBuilder([f"i{k}" for k in range(num_inputs)])

    def pick():
        return int(rng.integers(0, len(builder.cells)))

    for _ in range(num_cells):
        choice = int(rng.integers(0, 8))
        if choice == 0:
            builder.not_(pick())
        elif choice <= 3:
            builder.gate(GATE_ORDER[choice - 1], pick(), pick())
        elif choice == 4:
            g1, g2 = rng.choice(3, size=2, replace=False)
            builder.poly2(GATE_ORDER[g1], GATE_ORDER[g2], pick(), pick())
        elif choice == 5:
            u1, u2 = rng.choice(4, size=2, replace=False)
            builder.poly1(units[u1], units[u2], pick())
        elif choice == 6:
            b1 = int(rng.integers(0, 2))
            builder.polyconst(b1, 1 - b1)
        else:
            builder.const(int(rng.integers(0, 2)))
    total = len(builder.cells)
    for k in range(num_outputs):
        builder.set_output(f"y{k}", total - 1 - k)
    return builder.build()
