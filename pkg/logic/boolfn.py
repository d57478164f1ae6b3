"""
Incompletely specified Boolean functions over an explicit, ordered variable list.

On-set and off-set are dense numpy bool vectors of length 2**n. Variable i
contributes bit i of the minterm index, so variable 0 is the least significant.
Viewed as an n-dimensional cube of shape (2,)*n in C order, variable i lives on
axis n-1-i; every operation below works on that view.
"""
import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence, Tuple

import numpy as np

MAX_VARS = 24

VarSet = Tuple[int, ...]


def _cube(arr: np.ndarray, n: int) -> np.ndarray:
    return arr.reshape((2,) * n)


def _axis(n: int, v: int) -> int:
    return n - 1 - v


def minterm_columns(n: int, index: Optional[np.ndarray] = None) -> list:
    """Per-variable value columns for the given minterm indices (all 2**n by default)."""
    if index is None:
        index = np.arange(1 << n, dtype=np.int64)
    return [((index >> i) & 1).astype(bool) for i in range(n)]


class Isf:
    """Immutable ISF. The don't-care set is the complement of on | off and is never stored."""

    __slots__ = ("on", "off", "var_names")

    def __init__(self, on, off, var_names: Sequence[str]):
        names = tuple(var_names)
        if len(names) > MAX_VARS:
            raise ValueError(f"{len(names)} variables exceed the {MAX_VARS}-variable cap")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        on = np.array(on, dtype=bool).reshape(-1)
        off = np.array(off, dtype=bool).reshape(-1)
        size = 1 << len(names)
        if on.size != size or off.size != size:
            raise ValueError(f"expected bit-vectors of length {size}, got {on.size} and {off.size}")
        if (on & off).any():
            raise ValueError("on-set and off-set overlap")
        self._freeze(on, off, names)

    def _freeze(self, on, off, names):
        on.setflags(write=False)
        off.setflags(write=False)
        object.__setattr__(self, "on", on)
        object.__setattr__(self, "off", off)
        object.__setattr__(self, "var_names", names)

    @classmethod
    def _raw(cls, on: np.ndarray, off: np.ndarray, names: Sequence[str]) -> "Isf":
        # internal constructor: arrays are owned by the caller and already valid
        obj = cls.__new__(cls)
        obj._freeze(np.ascontiguousarray(on).reshape(-1), np.ascontiguousarray(off).reshape(-1), tuple(names))
        return obj

    def __setattr__(self, key, value):
        raise AttributeError("Isf is immutable")

    # construction helpers

    @classmethod
    def from_truth(cls, var_names: Sequence[str], values: Iterable) -> "Isf":
        """values per minterm: 1/'1'/True on, 0/'0'/False off, None/'-'/'*' don't-care."""
        vals = list(values)
        on = [v is not None and v in (1, "1") for v in vals]
        off = [v is not None and v in (0, "0") for v in vals]
        return cls(on, off, var_names)

    @classmethod
    def from_function(cls, var_names: Sequence[str], fn: Callable[..., Optional[int]]) -> "Isf":
        """fn receives one bit per variable, in variable order, and returns 0, 1 or None."""
        n = len(var_names)
        values = []
        for m in range(1 << n):
            values.append(fn(*((m >> i) & 1 for i in range(n))))
        return cls.from_truth(var_names, values)

    @classmethod
    def constant(cls, var_names: Sequence[str], bit: int) -> "Isf":
        size = 1 << len(var_names)
        ones = np.ones(size, dtype=bool)
        zeros = np.zeros(size, dtype=bool)
        return cls(ones, zeros, var_names) if bit else cls(zeros, ones, var_names)

    @classmethod
    def variable(cls, var_names: Sequence[str], v: int) -> "Isf":
        cols = minterm_columns(len(var_names))
        return cls(cols[v], ~cols[v], var_names)

    # queries

    @property
    def num_vars(self) -> int:
        return len(self.var_names)

    @property
    def care(self) -> np.ndarray:
        return self.on | self.off

    @property
    def dc(self) -> np.ndarray:
        return ~(self.on | self.off)

    def value(self, m: int) -> Optional[int]:
        if self.on[m]:
            return 1
        if self.off[m]:
            return 0
        return None

    def index_of(self, name: str) -> int:
        return self.var_names.index(name)

    def __eq__(self, other):
        if not isinstance(other, Isf):
            return NotImplemented
        return (
            self.var_names == other.var_names
            and np.array_equal(self.on, other.on)
            and np.array_equal(self.off, other.off)
        )

    __hash__ = None

    def __repr__(self):
        chars = "".join("1" if a else "0" if b else "-" for a, b in zip(self.on[:64], self.off[:64]))
        more = "..." if self.on.size > 64 else ""
        return f"Isf({','.join(self.var_names)}: {chars}{more})"


@dataclass(frozen=True)
class PolyFunction:
    """f1/f2: mode1 is computed in mode 1, mode2 in mode 2, over one variable list."""
    mode1: Isf
    mode2: Isf

    def __post_init__(self):
        if self.mode1.var_names != self.mode2.var_names:
            raise ValueError(
                f"mode functions disagree on variables: {self.mode1.var_names} vs {self.mode2.var_names}"
            )

    @property
    def num_vars(self) -> int:
        return self.mode1.num_vars

    @property
    def var_names(self) -> Tuple[str, ...]:
        return self.mode1.var_names

    @property
    def care_count(self) -> int:
        return care_count(self.mode1) + care_count(self.mode2)

    def is_single_mode(self) -> bool:
        return equal_on_care(self.mode1, self.mode2)

    def combined(self) -> Isf:
        """The single-mode function both modes share; only valid when is_single_mode()."""
        return Isf._raw(self.mode1.on | self.mode2.on, self.mode1.off | self.mode2.off, self.var_names)


# algebra


def _check_var(f: Isf, v: int) -> int:
    if not 0 <= v < f.num_vars:
        raise IndexError(f"variable index {v} out of range for {f.num_vars} variables")
    return int(v)


def _check_varset(f: Isf, vars: Iterable[int]) -> VarSet:
    vs = tuple(sorted(set(_check_var(f, v) for v in vars)))
    return vs


def _without(names: Tuple[str, ...], vs: Iterable[int]) -> Tuple[str, ...]:
    drop = set(vs)
    return tuple(name for i, name in enumerate(names) if i not in drop)


def complement(f: Isf) -> Isf:
    return Isf._raw(f.off, f.on, f.var_names)


def cofactor(f: Isf, v: int, val: int) -> Isf:
    """f with variable v fixed to val; v is removed and higher indices shift down by one."""
    v = _check_var(f, v)
    n = f.num_vars
    ax = _axis(n, v)
    bit = 1 if val else 0
    on = _cube(f.on, n).take(bit, axis=ax)
    off = _cube(f.off, n).take(bit, axis=ax)
    return Isf._raw(on, off, _without(f.var_names, (v,)))


def _quantify(f: Isf, vars: Iterable[int], universal: bool) -> Isf:
    vs = _check_varset(f, vars)
    if not vs:
        return f
    n = f.num_vars
    axes = tuple(_axis(n, v) for v in vs)
    on_cube, off_cube = _cube(f.on, n), _cube(f.off, n)
    if universal:
        on = np.all(on_cube, axis=axes)
        off = np.any(off_cube, axis=axes)
    else:
        on = np.any(on_cube, axis=axes)
        off = np.all(off_cube, axis=axes)
    return Isf._raw(np.asarray(on), np.asarray(off), _without(f.var_names, vs))


def forall_quant(f: Isf, vars: Iterable[int]) -> Isf:
    """on iff every extension over vars is on; off iff some extension is off."""
    return _quantify(f, vars, universal=True)


def exists_quant(f: Isf, vars: Iterable[int]) -> Isf:
    """on iff some extension over vars is on; off iff every extension is off."""
    return _quantify(f, vars, universal=False)


def fresh_name(names: Sequence[str], base: str = "x0") -> str:
    name = base
    while name in names:
        name += "_"
    return name


def merge_modes(pf: PolyFunction, name: str = "x0") -> Isf:
    """Single-mode f'(..., x0) with f'(x0=0) = mode1 and f'(x0=1) = mode2; x0 is the highest index."""
    if pf.num_vars + 1 > MAX_VARS:
        raise ValueError(f"merging would exceed the {MAX_VARS}-variable cap")
    mode_var = fresh_name(pf.var_names, name)
    on = np.concatenate([pf.mode1.on, pf.mode2.on])
    off = np.concatenate([pf.mode1.off, pf.mode2.off])
    return Isf._raw(on, off, pf.var_names + (mode_var,))


def split_modes(f: Isf, x0: int) -> PolyFunction:
    return PolyFunction(cofactor(f, x0, 0), cofactor(f, x0, 1))


def _conflicts(f: Isf, v: int) -> bool:
    n = f.num_vars
    ax = _axis(n, v)
    on, off = _cube(f.on, n), _cube(f.off, n)
    on0, on1 = on.take(0, axis=ax), on.take(1, axis=ax)
    off0, off1 = off.take(0, axis=ax), off.take(1, axis=ax)
    return bool((on0 & off1).any() or (off0 & on1).any())


def support(f: Isf) -> VarSet:
    """Variables whose flip turns some on-point into an off-point."""
    return tuple(v for v in range(f.num_vars) if _conflicts(f, v))


def merge_out(f: Isf, v: int) -> Isf:
    """Drop v by uniting its cofactors; only care-preserving when v is outside support(f)."""
    v = _check_var(f, v)
    n = f.num_vars
    ax = _axis(n, v)
    on = np.any(_cube(f.on, n), axis=ax)
    off = np.any(_cube(f.off, n), axis=ax)
    return Isf._raw(np.asarray(on), np.asarray(off), _without(f.var_names, (v,)))


def project_support(f: Isf) -> Tuple[Isf, VarSet]:
    """Remove variables the care set does not need, one at a time.

    Dropping one variable can create a conflict on another (on at 00, off at 11),
    so support is recomputed after each removal. Returns the reduced function and
    the original indices of the variables it keeps.
    """
    kept = list(range(f.num_vars))
    g = f
    while True:
        needed = set(support(g))
        idle = [v for v in range(g.num_vars) if v not in needed]
        if not idle:
            return g, tuple(kept)
        v = idle[-1]
        g = merge_out(g, v)
        del kept[v]


def equal_on_care(f: Isf, g: Isf) -> bool:
    """True when f and g have a common completion."""
    if f.num_vars != g.num_vars:
        return False
    return not ((f.on & g.off).any() or (f.off & g.on).any())


def is_constant(f: Isf) -> Optional[int]:
    """0 or 1 when a constant completes f (0 wins for the empty care set), else None."""
    if not f.on.any():
        return 0
    if not f.off.any():
        return 1
    return None


def care_count(f: Isf) -> int:
    return int(np.count_nonzero(f.on) + np.count_nonzero(f.off))


class CompletionPolicy(str, Enum):
    ALL_ZERO = "all-zero"
    ALL_ONE = "all-one"
    NEAREST_GATE = "nearest-gate"


def _gate_candidates(n: int):
    """Cheapest-first truth tables of the one-gate library over n variables."""
    cols = minterm_columns(n)
    size = 1 << n
    yield 0, np.zeros(size, dtype=bool)
    yield 0, np.ones(size, dtype=bool)
    for i in range(n):
        yield 0, cols[i]
    for i in range(n):
        yield 1, ~cols[i]
    ops = (np.logical_and, np.logical_or, np.logical_xor)
    for cost in (1, 2, 3, 4):
        for i, j in itertools.combinations(range(n), 2):
            for op in ops:
                for na, nb, no in itertools.product((0, 1), repeat=3):
                    if 1 + na + nb + no != cost:
                        continue
                    a = ~cols[i] if na else cols[i]
                    b = ~cols[j] if nb else cols[j]
                    out = op(a, b)
                    yield cost, ~out if no else out


def complete(f: Isf, policy: CompletionPolicy = CompletionPolicy.ALL_ZERO) -> Isf:
    """Fill every don't-care. nearest-gate picks the cheapest compatible single-gate
    function (constant, literal, or a two-input AND/OR/XOR with optional inverters)
    and falls back to all-zero when none fits."""
    policy = CompletionPolicy(policy)
    if policy is CompletionPolicy.ALL_ONE:
        return Isf._raw(~f.off, f.off, f.var_names)
    if policy is CompletionPolicy.NEAREST_GATE:
        for _, truth in _gate_candidates(f.num_vars):
            if not (f.on & ~truth).any() and not (f.off & truth).any():
                return Isf._raw(truth.copy(), ~truth, f.var_names)
    return Isf._raw(f.on, ~f.on, f.var_names)
