"""
Benchmark function generators. Every generator names its inputs x1..xn, with
input j (from 0) on bit j of the minterm index, and returns fully specified
functions.

  gen_multiplier(a, b)  inputs: the a bits of A then the b bits of B, LSB first;
                        outputs: the a+b product bits, LSB first
  gen_sorting_net(k)    output j is 1 iff at least j+1 inputs are 1
  gen_parity(n)         XOR of all inputs
  gen_majority(n)       1 iff more than n/2 inputs are 1
"""
import re
from typing import List, Optional, Sequence

import numpy as np

from infra.errors import SpecError
from logic.boolfn import MAX_VARS, Isf, PolyFunction

GENERATOR_FORMS = ("parity:N", "majority:N", "mul:AxB", "sort:K")


def input_names(n: int) -> tuple:
    return tuple(f"x{i}" for i in range(1, n + 1))


def _check_width(n: int, what: str):
    if n < 1:
        raise SpecError(f"{what} needs at least one input")
    if n > MAX_VARS:
        raise SpecError(f"{what} has {n} inputs; the cap is {MAX_VARS}")


def _popcount(n: int) -> np.ndarray:
    index = np.arange(1 << n, dtype=np.int64)
    count = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        count += (index >> i) & 1
    return count


def _total(names, truth: np.ndarray) -> Isf:
    truth = np.asarray(truth, dtype=bool)
    return Isf(truth, ~truth, names)


def gen_parity(n: int) -> Isf:
    _check_width(n, "parity")
    return _total(input_names(n), _popcount(n) & 1)


def gen_majority(n: int) -> Isf:
    _check_width(n, "majority")
    return _total(input_names(n), 2 * _popcount(n) > n)


def gen_sorting_net(k: int) -> List[Isf]:
    _check_width(k, "sorting-net")
    count = _popcount(k)
    names = input_names(k)
    return [_total(names, count >= j + 1) for j in range(k)]


def gen_multiplier(a_bits: int, b_bits: int) -> List[Isf]:
    if a_bits < 1 or b_bits < 1:
        raise SpecError("multiplier operands need at least one bit each")
    n = a_bits + b_bits
    _check_width(n, "multiplier")
    index = np.arange(1 << n, dtype=np.int64)
    product = (index & ((1 << a_bits) - 1)) * (index >> a_bits)
    names = input_names(n)
    return [_total(names, (product >> k) & 1) for k in range(n)]


_FORMS = {
    "parity": re.compile(r"^parity:(\d+)$"),
    "majority": re.compile(r"^majority:(\d+)$"),
    "mul": re.compile(r"^mul:(\d+)x(\d+)$"),
    "sort": re.compile(r"^sort:(\d+)$"),
}


def parse_generator(descriptor: str) -> List[Isf]:
    """'parity:N', 'majority:N', 'mul:AxB' or 'sort:K' to its output functions."""
    text = descriptor.strip().lower()
    for family, pattern in _FORMS.items():
        m = pattern.match(text)
        if not m:
            continue
        args = [int(g) for g in m.groups()]
        if family == "parity":
            return [gen_parity(args[0])]
        if family == "majority":
            return [gen_majority(args[0])]
        if family == "mul":
            return gen_multiplier(args[0], args[1])
        return gen_sorting_net(args[0])
    raise SpecError(f"unknown generator {descriptor!r}; expected one of {', '.join(GENERATOR_FORMS)}")


def is_generator(descriptor: str) -> bool:
    return any(p.match(descriptor.strip().lower()) for p in _FORMS.values())


def make_poly_spec(
    f1s: Sequence[Isf],
    f2s: Sequence[Isf],
    names: Optional[Sequence[str]] = None,
    labels: Sequence[str] = ("mode 1", "mode 2"),
) -> List[PolyFunction]:
    """Pair output columns of two specs; mode 2 adopts mode 1's input names."""
    if not f1s or not f2s:
        raise SpecError("both modes need at least one output")
    n1, n2 = f1s[0].num_vars, f2s[0].num_vars
    if n1 != n2 or len(f1s) != len(f2s):
        raise SpecError(
            f"arity mismatch: {labels[0]} is {n1} -> {len(f1s)}, {labels[1]} is {n2} -> {len(f2s)}"
        )
    names = tuple(names) if names is not None else f1s[0].var_names
    pairs = []
    for f1, f2 in zip(f1s, f2s):
        if f1.num_vars != n1 or f2.num_vars != n2:
            raise SpecError("all outputs of a spec must share its inputs")
        pairs.append(PolyFunction(Isf._raw(f1.on, f1.off, names), Isf._raw(f2.on, f2.off, names)))
    return pairs
