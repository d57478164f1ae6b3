"""
Two-mode verification of a netlist against PolyFunction specs, one per output.

Exhaustive over all 2**n input assignments up to the exhaustive limit, otherwise
seeded random sampling. A netlist output is compatible with a mode function when
it is 1 on the on-set and 0 on the off-set; don't-cares are unconstrained.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from circuit.netlist import Netlist, simulate_vectors
from infra.config import DEFAULT_EXHAUSTIVE_LIMIT
from infra.errors import SpecError
from logic.boolfn import PolyFunction, minterm_columns

logger = logging.getLogger("verify")

DEFAULT_SAMPLES = 4096


@dataclass(frozen=True)
class Counterexample:
    mode: int
    output: str
    assignment: Tuple[int, ...]
    expected: int
    actual: int

    def describe(self, inputs: Sequence[str]) -> str:
        bits = " ".join(f"{name}={bit}" for name, bit in zip(inputs, self.assignment))
        return f"mode {self.mode} output {self.output}: expected {self.expected}, got {self.actual} at {bits}"


@dataclass(frozen=True)
class VerifyReport:
    passed: bool
    checks: int
    exhaustive: bool
    counterexample: Optional[Counterexample] = None


def verify(
    netlist: Netlist,
    specs: Union[PolyFunction, Sequence[PolyFunction]],
    limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> VerifyReport:
    """Counterexamples are searched mode 1 first, then outputs in order, then by
    ascending assignment index (sample order when sampling)."""
    if isinstance(specs, PolyFunction):
        specs = [specs]
    specs = list(specs)
    n = len(netlist.inputs)
    if len(specs) != len(netlist.outputs):
        raise SpecError(f"netlist has {len(netlist.outputs)} outputs but {len(specs)} specs were given")
    for spec in specs:
        if spec.num_vars != n:
            raise SpecError(f"netlist has {n} inputs but a spec has {spec.num_vars} variables")

    exhaustive = n <= limit
    if exhaustive:
        index = np.arange(1 << n, dtype=np.int64)
    else:
        rng = np.random.default_rng(seed)
        index = rng.integers(0, 1 << n, size=samples, dtype=np.int64)
    columns = minterm_columns(n, index)

    checks = 0
    for mode in (1, 2):
        values = simulate_vectors(netlist, columns, mode)
        for (name, _), spec, got in zip(netlist.outputs, specs, values):
            fn = spec.mode1 if mode == 1 else spec.mode2
            on, off = fn.on[index], fn.off[index]
            bad = (on & ~got) | (off & got)
            checks += index.size
            if bad.any():
                lane = int(np.argmax(bad))
                m = int(index[lane])
                cex = Counterexample(
                    mode=mode,
                    output=name,
                    assignment=tuple((m >> i) & 1 for i in range(n)),
                    expected=int(on[lane]),
                    actual=int(got[lane]),
                )
                logger.warning("verification failed: %s", cex.describe(netlist.inputs))
                return VerifyReport(False, checks, exhaustive, cex)
    logger.info("verified %d checks (%s)", checks, "exhaustive" if exhaustive else "sampled")
    return VerifyReport(True, checks, exhaustive)
