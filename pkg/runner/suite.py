"""
Compare coordinator: runs both methods over a suite of benchmark pairs, verifies
every netlist before reporting it, and writes one CSV row per (entry, method).

Entries run on worker threads capped by POLYSYNTH_THREADS; rows keep suite
order whatever the completion order. A failing entry is logged and reported as
FAILED without stopping the others.
"""
import csv
import io
import json
import logging
import os
import threading
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from circuit.serialize import to_json
from circuit.verify import DEFAULT_SAMPLES, verify
from infra.config import DEFAULT_EXHAUSTIVE_LIMIT, SynthOptions, mcnc_dir, thread_count
from infra.errors import SpecError
from infra.observability import record_verification
from infra.prometheus_metrics import Metrics
from runner.methods import METHODS, POLY_BIDEC, XFORM_BIDEC, load_poly_spec, synthesize

logger = logging.getLogger("suite")

CSV_COLUMNS = (
    "benchmark", "method", "gates", "poly_gates", "poly_percent", "wall_ms",
    "paper_ref_gates", "paper_ref_poly", "status",
)

OK, FAILED, SKIPPED = "OK", "FAILED", "SKIPPED"


@dataclass(frozen=True)
class SuiteEntry:
    name: str
    mode1: str
    mode2: str
    reverse_outputs: bool = False
    paper_ref: Dict[str, Tuple[str, str]] = field(default_factory=dict, hash=False, compare=False)

    def num_inputs(self) -> Optional[int]:
        """Input width when it can be read off a generator descriptor, else None."""
        head, _, arg = self.mode1.partition(":")
        if head in ("parity", "majority", "sort") and arg.isdigit():
            return int(arg)
        if head == "mul" and "x" in arg:
            a, _, b = arg.partition("x")
            if a.isdigit() and b.isdigit():
                return int(a) + int(b)
        return None


@dataclass
class Row:
    benchmark: str
    method: str
    gates: str = ""
    poly_gates: str = ""
    poly_percent: str = ""
    wall_ms: str = ""
    paper_ref_gates: str = ""
    paper_ref_poly: str = ""
    status: str = OK


def _refs(poly: Tuple[str, str], xform: Tuple[str, str]) -> Dict[str, Tuple[str, str]]:
    return {POLY_BIDEC: poly, XFORM_BIDEC: xform}


def _mcnc(name: str) -> str:
    return os.path.join(mcnc_dir(), f"{name}.pla")


def builtin_suites() -> Dict[str, List[SuiteEntry]]:
    table2 = [
        SuiteEntry("2x3mul/5sort", "mul:2x3", "sort:5", paper_ref=_refs(("49", "8.6%"), ("65", "20.0%"))),
        SuiteEntry("3x3mul/6sort", "mul:3x3", "sort:6", paper_ref=_refs(("145", "35.8%"), ("170", "22.3%"))),
        SuiteEntry("3x4mul/7sort", "mul:3x4", "sort:7", paper_ref=_refs(("248", "27.0%"), ("263", "11.0%"))),
        SuiteEntry("4x4mul/8sort", "mul:4x4", "sort:8", paper_ref=_refs(("570", "43.8%"), ("630", "13.5%"))),
        SuiteEntry("5x5mul/10sort", "mul:5x5", "sort:10", paper_ref=_refs(("2507", "36.5%"), ("2667", "7.7%"))),
        SuiteEntry("6x6mul/12sort", "mul:6x6", "sort:12", paper_ref=_refs(("10130", "25.1%"), ("10329", "5.1%"))),
    ]
    table3_refs = {
        7: (("41", "1"), ("64", "5")),
        9: (("59", "2"), ("71", "2")),
        11: (("90", "1"), ("181", "5")),
        13: (("128", "2"), ("144", "2")),
        15: (("186", "1"), ("999", "126")),
    }
    table3 = [
        SuiteEntry(f"parity{n}/majority{n}", f"parity:{n}", f"majority:{n}", paper_ref=_refs(*refs))
        for n, refs in table3_refs.items()
    ]
    table4 = [
        SuiteEntry("majority10/sao24", "majority:10", _mcnc("sao2") + "@3", paper_ref=_refs(("206", "10.6%"), ("208", "5.7%"))),
        SuiteEntry("parity10/sao24", "parity:10", _mcnc("sao2") + "@3", paper_ref=_refs(("54", "40.7%"), ("119", "11.7%"))),
        SuiteEntry("4x4mul/f51m", "mul:4x4", _mcnc("f51m"), paper_ref=_refs(("354", "16.1%"), ("375", "5.3%"))),
        SuiteEntry("8sort/f51m", "sort:8", _mcnc("f51m"), paper_ref=_refs(("175", "25.1%"), ("235", "8.0%"))),
        SuiteEntry("ex1010/10sort", _mcnc("ex1010"), "sort:10", paper_ref=_refs(("2789", "23.8%"), ("3022", "6.1%"))),
        SuiteEntry("5xp1/z5xp1", _mcnc("5xp1"), _mcnc("z5xp1"), paper_ref=_refs(("98", "60.2%"), ("152", "13.8%"))),
        SuiteEntry("5x5mul/ex1010", "mul:5x5", _mcnc("ex1010"), paper_ref=_refs(("3587", "40.2%"), ("3716", "9.1%"))),
        SuiteEntry("misex3/misex3c", _mcnc("misex3"), _mcnc("misex3c"), paper_ref=_refs(("4571", "48.5%"), ("4682", "7.5%"))),
    ]
    trend = [
        table2[0],
        table2[1],
        table2[3],
        SuiteEntry("parity10/majority10", "parity:10", "majority:10"),
        SuiteEntry("4x4mul/8sort-reversed", "mul:4x4", "sort:8", reverse_outputs=True),
    ]
    smoke = [
        SuiteEntry("parity4/majority4", "parity:4", "majority:4"),
        table2[0],
    ]
    return {"table2": table2, "table3": table3, "table4": table4, "trend": trend, "smoke": smoke}


def load_suite(descriptor: str) -> List[SuiteEntry]:
    """A built-in suite name or a JSON file of {name, mode1, mode2[, reverse_outputs, paper_ref]}."""
    suites = builtin_suites()
    if descriptor in suites:
        return suites[descriptor]
    try:
        with open(descriptor, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise SpecError(f"suite file {descriptor}: {e.msg}", e.lineno) from e
    except FileNotFoundError:
        raise SpecError(f"unknown suite {descriptor!r}; built-in suites are {', '.join(suites)}") from None
    entries = []
    for item in doc:
        try:
            refs = {m: (str(r.get("gates", "")), str(r.get("poly", ""))) for m, r in item.get("paper_ref", {}).items()}
            entries.append(SuiteEntry(item["name"], item["mode1"], item["mode2"], bool(item.get("reverse_outputs", False)), refs))
        except (KeyError, TypeError, AttributeError) as e:
            raise SpecError(f"suite file {descriptor}: malformed entry {item!r} ({e})") from e
    return entries


def _missing_fixture(entry: SuiteEntry) -> Optional[str]:
    for source in (entry.mode1, entry.mode2):
        path = source.rsplit("@", 1)[0]
        if path.endswith(".pla") and not os.path.exists(path):
            return path
    return None


class SuiteCoordinator:
    def __init__(
        self,
        session,
        metrics: Optional[Metrics] = None,
        options: Optional[SynthOptions] = None,
        threads: Optional[int] = None,
        exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
        samples: int = DEFAULT_SAMPLES,
        seed: int = 0,
        timing: bool = True,
        max_inputs: Optional[int] = None,
        netlist_dir: Optional[str] = None,
    ):
        self.session = session
        self.metrics = metrics
        self.options = options or SynthOptions()
        self.threads = max(1, threads or thread_count())
        self.exhaustive_limit = exhaustive_limit
        self.samples = samples
        self.seed = seed
        self.timing = timing
        self.max_inputs = max_inputs
        self.netlist_dir = netlist_dir
        self.progress = {"done": 0, "total": 0}
        self._lock = threading.Lock()

    def status(self) -> Dict[str, int]:
        with self._lock:
            return dict(self.progress)

    def run(self, entries: Sequence[SuiteEntry], methods: Sequence[str] = METHODS) -> List[Row]:
        tasks = [(e, m) for e in entries for m in methods]
        rows: List[Optional[Row]] = [None] * len(tasks)
        with self._lock:
            self.progress = {"done": 0, "total": len(tasks)}
        gate = threading.BoundedSemaphore(self.threads)

        def worker(slot: int, entry: SuiteEntry, method: str):
            with gate:
                row = self.run_one(entry, method)
            rows[slot] = row
            with self._lock:
                self.progress["done"] += 1

        threads: List[threading.Thread] = []
        for slot, (entry, method) in enumerate(tasks):
            t = threading.Thread(target=worker, args=(slot, entry, method), name=f"suite-{slot}")
            threads.append(t)
            t.start()
        for t in threads:
            t.join()
        return [r for r in rows if r is not None]

    def run_one(self, entry: SuiteEntry, method: str) -> Row:
        ref = entry.paper_ref.get(method, ("", ""))
        row = Row(entry.name, method, paper_ref_gates=ref[0], paper_ref_poly=ref[1])
        width = entry.num_inputs()
        missing = _missing_fixture(entry)
        if missing is not None or (self.max_inputs is not None and width is not None and width > self.max_inputs):
            logger.info("skipping %s/%s (%s)", entry.name, method, missing or f"{width} inputs")
            row.status = SKIPPED
            return self._record(row)
        try:
            pfs, names = load_poly_spec(entry.mode1, entry.mode2, entry.reverse_outputs)
            if self.max_inputs is not None and pfs[0].num_vars > self.max_inputs:
                row.status = SKIPPED
                return self._record(row)
            result = synthesize(method, pfs, names, self.options, self.metrics)
            report = verify(result.netlist, pfs, self.exhaustive_limit, self.samples, self.seed)
            record_verification(self.metrics, report)
            if not report.passed:
                logger.warning("%s/%s failed verification: %s", entry.name, method,
                               report.counterexample.describe(result.netlist.inputs))
                row.status = FAILED
                return self._record(row)
            row.gates = str(result.stats.total_counted)
            row.poly_gates = str(result.stats.poly_count)
            row.poly_percent = f"{result.stats.poly_percent:.1f}"
            row.wall_ms = f"{result.wall_ms:.0f}" if self.timing else ""
            if self.netlist_dir:
                self._dump(entry, method, result.netlist)
            logger.info("%s/%s: %s", entry.name, method, result.stats.line())
        except Exception as e:
            logger.exception("%s/%s failed: %s", entry.name, method, e)
            row.status = FAILED
            if self.metrics is not None:
                self.metrics.inc_counter("synth_failures_total")
        return self._record(row)

    def _dump(self, entry: SuiteEntry, method: str, netlist):
        os.makedirs(self.netlist_dir, exist_ok=True)
        safe = entry.name.replace("/", "_")
        with open(os.path.join(self.netlist_dir, f"{safe}.{method}.json"), "w", encoding="utf-8") as fh:
            fh.write(to_json(netlist))

    def _record(self, row: Row) -> Row:
        if self.metrics is not None:
            self.metrics.inc_counter("suite_entries_total")
        self.session.write(f"run:{row.benchmark}:{row.method}", asdict(row))
        return row


def rows_to_csv(rows: Sequence[Row]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        d = asdict(row)
        writer.writerow([d[c] for c in CSV_COLUMNS])
    return buf.getvalue()
