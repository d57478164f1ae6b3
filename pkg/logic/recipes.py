"""
Leaf recipes: tiny expression trees over at most two leaf variables, used to
realize the base cases of both synthesis methods with the fewest counted cells.

Recipe nodes are tuples:
  ("const", b)  ("var", i)  ("not", r)  ("gate", g, r1, r2)
  ("poly1", u1, u2, r)  ("poly2", g1, g2, r1, r2)  ("polyconst", b1, b2)
"""
import itertools
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np

from circuit.netlist import GATE_ORDER, GateKind, Unit
from logic.boolfn import minterm_columns

Recipe = tuple
LibraryEntry = Tuple[int, Recipe, np.ndarray, np.ndarray]

POLY_GATES = tuple((g1, g2) for g1 in GATE_ORDER for g2 in GATE_ORDER if g1 != g2)
UNITS = (Unit.ZERO, Unit.ONE, Unit.WIRE, Unit.NOT)


def recipe_truth(recipe: Recipe, k: int, mode: int = 1) -> np.ndarray:
    """Truth table of recipe over k leaf variables (leaf i is bit i) in mode 1 or 2."""
    cols = minterm_columns(k)
    size = 1 << k

    def ev(r):
        tag = r[0]
        if tag == "const":
            return np.full(size, bool(r[1]))
        if tag == "var":
            return cols[r[1]]
        if tag == "not":
            return ~ev(r[1])
        if tag == "gate":
            return r[1].apply(ev(r[2]), ev(r[3]))
        if tag == "poly1":
            return r[mode].apply(ev(r[3]))
        if tag == "poly2":
            return r[mode].apply(ev(r[3]), ev(r[4]))
        if tag == "polyconst":
            return np.full(size, bool(r[mode]))
        raise ValueError(f"unknown recipe node {tag!r}")

    return np.asarray(ev(recipe), dtype=bool)


def recipe_cost(recipe: Recipe) -> int:
    tag = recipe[0]
    if tag in ("const", "var"):
        return 0
    if tag == "polyconst":
        return 1
    if tag == "not":
        return 1 + recipe_cost(recipe[1])
    if tag == "poly1":
        return 1 + recipe_cost(recipe[3])
    children = recipe[2:] if tag == "gate" else recipe[3:]
    return 1 + sum(recipe_cost(c) for c in children)


def recipe_is_poly(recipe: Recipe) -> bool:
    tag = recipe[0]
    if tag in ("poly1", "poly2", "polyconst"):
        return True
    return any(recipe_is_poly(c) for c in recipe[1:] if isinstance(c, tuple))


def emit_recipe(builder, recipe: Recipe, leaf_ids: Sequence[int]) -> int:
    """Append the recipe's cells to a NetlistBuilder-like object; returns the root cell."""
    tag = recipe[0]
    if tag == "const":
        return builder.const(recipe[1])
    if tag == "var":
        return leaf_ids[recipe[1]]
    if tag == "not":
        return builder.not_(emit_recipe(builder, recipe[1], leaf_ids))
    if tag == "gate":
        a = emit_recipe(builder, recipe[2], leaf_ids)
        b = emit_recipe(builder, recipe[3], leaf_ids)
        return builder.gate(recipe[1], a, b)
    if tag == "poly1":
        return builder.poly1(recipe[1], recipe[2], emit_recipe(builder, recipe[3], leaf_ids))
    if tag == "poly2":
        a = emit_recipe(builder, recipe[3], leaf_ids)
        b = emit_recipe(builder, recipe[4], leaf_ids)
        return builder.poly2(recipe[1], recipe[2], a, b)
    if tag == "polyconst":
        return builder.polyconst(recipe[1], recipe[2])
    raise ValueError(f"unknown recipe node {tag!r}")


def _literals(k: int) -> List[Recipe]:
    return [("var", i) for i in range(k)] + [("not", ("var", i)) for i in range(k)]


def _maybe_not(r: Recipe, negate: bool) -> Recipe:
    return ("not", r) if negate else r


def _single_mode_recipes(k: int) -> List[Recipe]:
    out: List[Recipe] = [("const", 0), ("const", 1)]
    out += _literals(k)
    for i, j in itertools.combinations(range(k), 2):
        for gate in GATE_ORDER:
            for na, nb, no in itertools.product((False, True), repeat=3):
                body = ("gate", gate, _maybe_not(("var", i), na), _maybe_not(("var", j), nb))
                out.append(_maybe_not(body, no))
    return out


def _poly_recipes(k: int) -> List[Recipe]:
    out: List[Recipe] = [("polyconst", b1, b2) for b1 in (0, 1) for b2 in (0, 1) if b1 != b2]
    for lit in _literals(k):
        for u1 in UNITS:
            for u2 in UNITS:
                if u1 != u2:
                    out.append(("poly1", u1, u2, lit))
    for i, j in itertools.combinations(range(k), 2):
        for g1, g2 in POLY_GATES:
            for na, nb, no in itertools.product((False, True), repeat=3):
                body = ("poly2", g1, g2, _maybe_not(("var", i), na), _maybe_not(("var", j), nb))
                out.append(_maybe_not(body, no))
    return out


def _table(recipes: List[Recipe], k: int) -> Tuple[LibraryEntry, ...]:
    entries = [(recipe_cost(r), n, r) for n, r in enumerate(recipes)]
    entries.sort(key=lambda e: (e[0], e[1]))
    return tuple((cost, r, recipe_truth(r, k, 1), recipe_truth(r, k, 2)) for cost, _, r in entries)


@lru_cache(maxsize=None)
def single_mode_library(k: int) -> Tuple[LibraryEntry, ...]:
    """Cheapest-first recipes over k ≤ 2 leaves; every k-input function has one."""
    if not 0 <= k <= 2:
        raise ValueError(f"leaf libraries cover at most 2 variables, got {k}")
    return _table(_single_mode_recipes(k), k)


@lru_cache(maxsize=None)
def poly_library(k: int) -> Tuple[LibraryEntry, ...]:
    """Single-mode recipes plus one-cell polymorphic recipes (with inverters), cheapest first.
    Ties keep single-mode recipes ahead of polymorphic ones."""
    if not 0 <= k <= 2:
        raise ValueError(f"leaf libraries cover at most 2 variables, got {k}")
    return _table(_single_mode_recipes(k) + _poly_recipes(k), k)


def find_recipe(library, on1, off1, on2, off2):
    """First (cheapest) entry compatible with both mode care sets, or None."""
    for cost, recipe, t1, t2 in library:
        if (on1 & ~t1).any() or (off1 & t1).any():
            continue
        if (on2 & ~t2).any() or (off2 & t2).any():
            continue
        return recipe
    return None
