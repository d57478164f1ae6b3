"""
Method dispatch shared by the CLI and the compare suite: loading a spec source
(generator descriptor or PLA path) and running one of the two synthesis methods.
"""
import logging
import os
import time
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from bench.generators import is_generator, make_poly_spec, parse_generator
from bench.pla import load_pla
from circuit.netlist import GateStats, Netlist, gate_stats
from infra.config import SynthOptions
from infra.errors import PolysynthError, SpecError
from infra.observability import record_stats
from infra.prometheus_metrics import Metrics
from logic.boolfn import Isf, PolyFunction
from logic.polybidecomp import poly_design_outputs
from logic.transform import RuleApplication, transform_design_outputs

logger = logging.getLogger("methods")

POLY_BIDEC = "poly-bidec"
XFORM_BIDEC = "xform-bidec"
METHODS = (POLY_BIDEC, XFORM_BIDEC)


@dataclass(frozen=True)
class SynthResult:
    method: str
    netlist: Netlist
    stats: GateStats
    wall_ms: float
    applications: Tuple[RuleApplication, ...] = ()


def load_functions(source: str) -> Tuple[List[Isf], Tuple[str, ...]]:
    """Generator descriptor or PLA path to (output functions, output names).

    A PLA path may end in "@k" to keep only output column k (from 0).
    """
    if is_generator(source):
        fs = parse_generator(source)
        return fs, tuple(f"f{k}" for k in range(len(fs)))
    path, column = source, None
    head, sep, tail = source.rpartition("@")
    if sep and tail.isdigit():
        path, column = head, int(tail)
    if not os.path.exists(path):
        raise SpecError(f"{source!r} is neither a generator nor an existing PLA file")
    pla = load_pla(path)
    fs, names = pla.to_functions(), pla.outputs()
    if column is not None:
        if column >= len(fs):
            raise SpecError(f"{path} has {len(fs)} outputs; column {column} does not exist")
        fs, names = [fs[column]], (names[column],)
    return fs, names


def load_poly_spec(source1: str, source2: str, reverse_outputs: bool = False) -> Tuple[List[PolyFunction], Tuple[str, ...]]:
    f1s, names1 = load_functions(source1)
    f2s, _ = load_functions(source2)
    if reverse_outputs:
        f2s = list(reversed(f2s))
    return make_poly_spec(f1s, f2s, labels=(source1, source2)), names1


def synthesize(
    method: str,
    pfs: Sequence[PolyFunction],
    output_names: Optional[Sequence[str]] = None,
    options: Optional[SynthOptions] = None,
    metrics: Optional[Metrics] = None,
    mode_labels: Sequence[str] = ("mode1", "mode2"),
) -> SynthResult:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")
    options = options or SynthOptions()
    start = time.perf_counter()
    applications: Tuple[RuleApplication, ...] = ()
    try:
        if method == POLY_BIDEC:
            netlist = poly_design_outputs(pfs, output_names, options, metrics, mode_labels)
        else:
            report = transform_design_outputs(pfs, output_names, options, metrics, mode_labels)
            netlist, applications = report.netlist, report.applications
    except PolysynthError:
        if metrics is not None:
            metrics.inc_counter("synth_failures_total")
        raise
    wall_ms = (time.perf_counter() - start) * 1000.0
    stats = gate_stats(netlist)
    record_stats(metrics, method, stats)
    logger.info("%s finished in %.1f ms", method, wall_ms)
    return SynthResult(method, netlist, stats, wall_ms, applications)
