"""
polysynth command line.

  synth    build a polymorphic netlist for a mode-1 / mode-2 spec pair
  verify   check a netlist JSON against a spec pair in both modes
  bench    write a generated benchmark as a PLA file
  compare  run both methods over a benchmark suite and print a CSV report

Exit codes: 0 success, 1 verification failure, 2 spec or input error,
3 resource cap exceeded, 4 internal invariant violated.

Run: python main.py synth --method poly-bidec --gen1 parity:4 --gen2 majority:4
"""
import argparse
import logging
import signal
import sys
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from bench.generators import parse_generator
from bench.pla import write_pla
from circuit.serialize import from_json, to_dot, to_json
from circuit.verify import DEFAULT_SAMPLES, verify
from infra import config
from infra.config import SynthLimits, SynthOptions
from infra.errors import (
    NetlistFormatError,
    PolysynthError,
    ResourceLimitExceeded,
    SpecError,
    TransformInvariantError,
)
from infra.observability import record_verification
from infra.prometheus_metrics import Metrics
from runner.methods import METHODS, POLY_BIDEC, load_poly_spec, synthesize

logger = logging.getLogger("polysynth")

EXIT_OK, EXIT_VERIFY, EXIT_SPEC, EXIT_RESOURCE, EXIT_INTERNAL = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    method: str
    source1: str
    source2: str
    g2_distinct: bool = False
    exhaustive_limit: int = config.DEFAULT_EXHAUSTIVE_LIMIT
    samples: int = DEFAULT_SAMPLES
    seed: int = 0
    limits: SynthLimits = SynthLimits()
    reverse_outputs: bool = False
    mode_labels: Tuple[str, str] = ("mode1", "mode2")
    out: Optional[str] = None
    dot: Optional[str] = None

    @property
    def options(self) -> SynthOptions:
        return SynthOptions(g2_distinct=self.g2_distinct, limits=self.limits)


def _source(args, mode: int) -> str:
    gen = getattr(args, f"gen{mode}")
    pla = getattr(args, f"pla{mode}")
    if (gen is None) == (pla is None):
        raise SpecError(f"give exactly one of --gen{mode} and --pla{mode}")
    return gen if gen is not None else pla


def _mode_labels(text: Optional[str]) -> Tuple[str, str]:
    if not text:
        return ("mode1", "mode2")
    labels = tuple(s.strip() for s in text.split(","))
    if len(labels) != 2 or not all(labels):
        raise SpecError(f"--mode-labels takes two comma-separated names, got {text!r}")
    return labels


def build_config(args) -> RunConfig:
    limits = SynthLimits.from_env()
    limits = SynthLimits(
        max_depth=args.max_depth or limits.max_depth,
        max_cells=args.max_cells or limits.max_cells,
    )
    return RunConfig(
        method=getattr(args, "method", POLY_BIDEC),
        source1=_source(args, 1),
        source2=_source(args, 2),
        g2_distinct=getattr(args, "g2_distinct", False),
        exhaustive_limit=args.exhaustive_limit if args.exhaustive_limit is not None else config.exhaustive_limit(),
        samples=args.samples,
        seed=args.seed,
        limits=limits,
        reverse_outputs=args.reverse_outputs,
        mode_labels=_mode_labels(getattr(args, "mode_labels", None)),
        out=getattr(args, "out", None),
        dot=getattr(args, "dot", None),
    )


def _write(path: Optional[str], text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def cmd_synth(args, metrics: Metrics) -> int:
    cfg = build_config(args)
    pfs, names = load_poly_spec(cfg.source1, cfg.source2, cfg.reverse_outputs)
    result = synthesize(cfg.method, pfs, names, cfg.options, metrics, cfg.mode_labels)
    if cfg.out:
        _write(cfg.out, to_json(result.netlist))
    if cfg.dot:
        _write(cfg.dot, to_dot(result.netlist))
    print(result.stats.line())
    if not args.skip_verify:
        report = verify(result.netlist, pfs, cfg.exhaustive_limit, cfg.samples, cfg.seed)
        record_verification(metrics, report)
        if not report.passed:
            print("FAIL " + report.counterexample.describe(result.netlist.inputs), file=sys.stderr)
            return EXIT_VERIFY
    return EXIT_OK


def cmd_verify(args, metrics: Metrics) -> int:
    cfg = build_config(args)
    with open(args.netlist, "r", encoding="utf-8") as fh:
        netlist = from_json(fh.read())
    pfs, _ = load_poly_spec(cfg.source1, cfg.source2, cfg.reverse_outputs)
    report = verify(netlist, pfs, cfg.exhaustive_limit, cfg.samples, cfg.seed)
    record_verification(metrics, report)
    kind = "exhaustive" if report.exhaustive else "sampled"
    if report.passed:
        print(f"PASS checks={report.checks} ({kind})")
        return EXIT_OK
    print(f"FAIL checks={report.checks} ({kind})")
    print(report.counterexample.describe(netlist.inputs))
    return EXIT_VERIFY


def cmd_bench(args, metrics: Metrics) -> int:
    fs = parse_generator(args.descriptor)
    _write(args.out, write_pla(fs))
    return EXIT_OK


def _store(path: Optional[str]):
    if path:
        from memory.sql_session import SQLiteRunStore

        return SQLiteRunStore(path)
    from memory.session_memory import InMemoryRunStore

    return InMemoryRunStore()


def cmd_compare(args, metrics: Metrics) -> int:
    from runner.suite import FAILED, SuiteCoordinator, load_suite, rows_to_csv

    entries = load_suite(args.suite)
    methods = args.methods.split(",") if args.methods else list(METHODS)
    for m in methods:
        if m not in METHODS:
            raise SpecError(f"unknown method {m!r}; expected one of {', '.join(METHODS)}")
    limits = SynthLimits(
        max_depth=args.max_depth or SynthLimits.from_env().max_depth,
        max_cells=args.max_cells or SynthLimits.from_env().max_cells,
    )
    coordinator = SuiteCoordinator(
        session=_store(args.record_db or config.record_db()),
        metrics=metrics,
        options=SynthOptions(g2_distinct=args.g2_distinct, limits=limits),
        threads=args.threads or config.thread_count(),
        exhaustive_limit=args.exhaustive_limit if args.exhaustive_limit is not None else config.exhaustive_limit(),
        samples=args.samples,
        seed=args.seed,
        timing=not args.no_timing,
        max_inputs=args.max_inputs,
        netlist_dir=args.netlist_dir,
    )
    if args.serve_metrics:
        from infra.webapp import create_app, serve_in_background

        serve_in_background(create_app(metrics, coordinator.status), args.serve_metrics)
    rows = coordinator.run(entries, methods)
    _write(args.out, rows_to_csv(rows))
    return EXIT_VERIFY if any(r.status == FAILED for r in rows) else EXIT_OK


def _spec_args(p: argparse.ArgumentParser):
    p.add_argument("--gen1", help="mode-1 generator: parity:N, majority:N, mul:AxB, sort:K")
    p.add_argument("--gen2", help="mode-2 generator")
    p.add_argument("--pla1", help="mode-1 PLA file (append @k to keep output k)")
    p.add_argument("--pla2", help="mode-2 PLA file")
    p.add_argument("--reverse-outputs", action="store_true", help="pair mode-2 outputs in reverse order")


def _verify_args(p: argparse.ArgumentParser):
    p.add_argument("--exhaustive-limit", type=int, default=None,
                   help="verify exhaustively up to this many inputs (default 14, env POLYSYNTH_EXHAUSTIVE_LIMIT)")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES, help="random samples beyond the limit")
    p.add_argument("--seed", type=int, default=0)


def _limit_args(p: argparse.ArgumentParser):
    p.add_argument("--max-depth", type=int, default=None, help="decomposition depth cap")
    p.add_argument("--max-cells", type=int, default=None, help="counted-cell cap")
    p.add_argument("--g2-distinct", action="store_true", help="require the mode-2 gate to differ from the mode-1 gate")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polysynth", description="Polymorphic circuit synthesis by bi-decomposition")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING (default, env POLYSYNTH_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a polymorphic netlist")
    p.add_argument("--method", choices=METHODS, default=POLY_BIDEC)
    _spec_args(p)
    _verify_args(p)
    _limit_args(p)
    p.add_argument("--out", help="netlist JSON path")
    p.add_argument("--dot", help="Graphviz DOT path")
    p.add_argument("--mode-labels", help="two comma-separated mode names, e.g. VDD3.3,VDD1.8")
    p.add_argument("--skip-verify", action="store_true", help="do not verify the result")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="verify a netlist JSON against a spec pair")
    p.add_argument("netlist")
    _spec_args(p)
    _verify_args(p)
    p.set_defaults(func=cmd_verify, max_depth=None, max_cells=None)

    p = sub.add_parser("bench", help="write a generated benchmark as PLA")
    p.add_argument("descriptor", help="parity:N, majority:N, mul:AxB or sort:K")
    p.add_argument("--out", help="PLA path (default stdout)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("compare", help="run both methods over a suite and print CSV")
    p.add_argument("--suite", default="smoke", help="table2, table3, table4, trend, smoke or a JSON suite file")
    p.add_argument("--methods", help=f"comma-separated subset of {','.join(METHODS)}")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--threads", type=int, default=None, help="worker threads (env POLYSYNTH_THREADS)")
    p.add_argument("--no-timing", action="store_true", help="leave wall_ms blank for byte-identical reports")
    p.add_argument("--max-inputs", type=int, default=None, help="skip entries wider than this")
    p.add_argument("--netlist-dir", help="also write each verified netlist as JSON here")
    p.add_argument("--record-db", help="SQLite file for run records (env POLYSYNTH_RECORD_DB)")
    p.add_argument("--serve-metrics", type=int, default=None, metavar="PORT", help="serve /health and /metrics while running")
    _verify_args(p)
    _limit_args(p)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: Optional[Sequence[str]] = None, metrics: Optional[Metrics] = None) -> int:
    config.load_environment()
    args = build_parser().parse_args(argv)
    level = (args.log_level or config.log_level()).upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    metrics = metrics or Metrics()
    try:
        return args.func(args, metrics)
    except ResourceLimitExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (SpecError, NetlistFormatError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SPEC
    except TransformInvariantError as e:
        logger.exception("internal error: %s", e)
        return EXIT_INTERNAL
    except PolysynthError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SPEC


def _shutdown_handler(signum, frame):
    logger.info("Shutdown signal received: %s", signum)
    raise SystemExit(130)


if __name__ == "__main__":
    signal.signal(signal.SIGTERM, _shutdown_handler)
    sys.exit(main())
