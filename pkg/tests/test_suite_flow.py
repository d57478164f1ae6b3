import json
import os

import pytest

from circuit.verify import verify
from infra.errors import SpecError
from infra.prometheus_metrics import Metrics
from memory.session_memory import InMemoryRunStore
from memory.sql_session import SQLiteRunStore
from runner.methods import METHODS, POLY_BIDEC, XFORM_BIDEC, load_poly_spec, synthesize
from runner.suite import (
    CSV_COLUMNS,
    OK,
    SKIPPED,
    SuiteCoordinator,
    SuiteEntry,
    builtin_suites,
    load_suite,
    rows_to_csv,
)


def test_flow():
    session = InMemoryRunStore()
    metrics = Metrics()
    coord = SuiteCoordinator(session=session, metrics=metrics, threads=2, timing=False)
    rows = coord.run(load_suite("smoke"))
    assert [(r.benchmark, r.method) for r in rows] == [
        ("parity4/majority4", POLY_BIDEC),
        ("parity4/majority4", XFORM_BIDEC),
        ("2x3mul/5sort", POLY_BIDEC),
        ("2x3mul/5sort", XFORM_BIDEC),
    ]
    assert all(r.status == OK for r in rows)
    assert all(int(r.gates) >= int(r.poly_gates) >= 1 for r in rows)
    assert rows[2].paper_ref_gates == "49"
    assert session.keys("run:") == sorted(f"run:{r.benchmark}:{r.method}" for r in rows)
    assert session.read("run:2x3mul/5sort:poly-bidec")["status"] == OK
    assert metrics.counter_value("suite_entries_total") == 4
    assert metrics.counter_value("verify_failures_total") == 0
    assert coord.status() == {"done": 4, "total": 4}


def test_report_is_reproducible_without_timing():
    entries = load_suite("smoke")[:1]
    first = rows_to_csv(SuiteCoordinator(InMemoryRunStore(), threads=1, timing=False).run(entries))
    second = rows_to_csv(SuiteCoordinator(InMemoryRunStore(), threads=3, timing=False).run(entries))
    assert first == second
    assert first.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert {"paper_ref_gates", "paper_ref_poly"} <= set(CSV_COLUMNS)
    assert len(first.splitlines()) == 1 + len(METHODS)


def test_wide_and_missing_entries_are_skipped():
    entries = [
        SuiteEntry("parity9/majority9", "parity:9", "majority:9"),
        SuiteEntry("sort3/missing", "sort:3", os.path.join("no", "such", "dir", "x.pla")),
    ]
    rows = SuiteCoordinator(InMemoryRunStore(), max_inputs=6, timing=False).run(entries, [POLY_BIDEC])
    assert [r.status for r in rows] == [SKIPPED, SKIPPED]
    assert rows[0].gates == ""


def test_netlists_are_written_when_asked(tmp_path):
    coord = SuiteCoordinator(InMemoryRunStore(), timing=False, netlist_dir=str(tmp_path))
    coord.run(load_suite("smoke")[:1], [XFORM_BIDEC])
    assert (tmp_path / "parity4_majority4.xform-bidec.json").exists()


def test_builtin_suites():
    suites = builtin_suites()
    assert set(suites) == {"table2", "table3", "table4", "trend", "smoke"}
    assert len(suites["table2"]) == 6
    assert [e.num_inputs() for e in suites["table3"]] == [7, 9, 11, 13, 15]
    assert suites["trend"][-1].reverse_outputs
    assert all(e.mode2.endswith("@3") for e in suites["table4"][:2])


def test_suite_file(tmp_path):
    path = tmp_path / "suite.json"
    path.write_text(json.dumps([
        {"name": "p3/m3", "mode1": "parity:3", "mode2": "majority:3",
         "paper_ref": {"poly-bidec": {"gates": 4, "poly": "25%"}}},
    ]))
    (entry,) = load_suite(str(path))
    assert entry.paper_ref[POLY_BIDEC] == ("4", "25%")
    assert not entry.reverse_outputs


def test_bad_suites_are_spec_errors(tmp_path):
    with pytest.raises(SpecError):
        load_suite("no-such-suite")
    bad = tmp_path / "bad.json"
    bad.write_text('[{"name": "x"}]')
    with pytest.raises(SpecError):
        load_suite(str(bad))


def test_sqlite_store(tmp_path):
    store = SQLiteRunStore(str(tmp_path / "runs.sqlite3"))
    store.write("run:a:poly-bidec", {"gates": "3"})
    store.write("run:a:poly-bidec", {"gates": "4"})
    store.write("other", 1)
    assert store.read("run:a:poly-bidec") == {"gates": "4"}
    assert store.read("missing", "d") == "d"
    assert store.keys("run:") == ["run:a:poly-bidec"]
    assert store.all() == {"other": 1, "run:a:poly-bidec": {"gates": "4"}}


@pytest.mark.parametrize(
    "n",
    [4, pytest.param(7, marks=pytest.mark.slow), pytest.param(9, marks=pytest.mark.slow)],
)
@pytest.mark.parametrize("method", METHODS)
def test_parity_majority_verify_exhaustively(n, method):
    pfs, names = load_poly_spec(f"parity:{n}", f"majority:{n}")
    result = synthesize(method, pfs, names)
    report = verify(result.netlist, pfs)
    assert report.passed
    assert report.exhaustive
    assert report.checks == (1 << n) * 2


@pytest.mark.slow
def test_trend_suite_tracks_published_results():
    entries = builtin_suites()["trend"]
    rows = SuiteCoordinator(InMemoryRunStore(), timing=False).run(entries)
    assert all(r.status == OK for r in rows)
    by_key = {(r.benchmark, r.method): r for r in rows}
    for name in ("2x3mul/5sort", "3x3mul/6sort", "4x4mul/8sort"):
        for method in METHODS:
            row = by_key[(name, method)]
            assert int(row.gates) <= 2 * int(row.paper_ref_gates), (name, method, row.gates)
    wins = sum(
        float(by_key[(e.name, POLY_BIDEC)].poly_percent) > float(by_key[(e.name, XFORM_BIDEC)].poly_percent)
        for e in entries
    )
    assert wins >= 4
