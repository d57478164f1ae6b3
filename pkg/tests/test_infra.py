import pytest

from infra import config
from infra.config import SynthLimits, env_int
from infra.errors import NetlistFormatError, PlaFormatError, SpecError
from infra.observability import record_decomposition, record_rule
from infra.webapp import create_app


def test_counters(metrics):
    assert metrics.counter_value("synth_runs_total") == 0
    metrics.inc_counter("synth_runs_total")
    metrics.inc_counter("verify_checks_total", 32)
    assert metrics.counter_value("synth_runs") == 1
    assert metrics.counter_value("verify_checks_total") == 32
    assert metrics.counter_value("never_created_total") == 0


def test_event_helpers(metrics):
    record_decomposition(metrics, "mode-split")
    record_rule(metrics, "3.1")
    record_rule(None, "3.1")
    assert metrics.counter_value("decompositions_total") == 1
    assert metrics.counter_value("decompositions_mode_split_total") == 1
    assert metrics.counter_value("rule_3_1_total") == 1
    assert metrics.counter_value("rule_applications_total") == 1


def test_health_and_metrics_endpoints(metrics):
    metrics.inc_counter("synth_runs_total")
    client = create_app(metrics, lambda: {"done": 3, "total": 8}).test_client()
    health = client.get("/health")
    assert health.status_code == 200
    assert health.get_json() == {"status": "ok", "done": 3, "total": 8}
    body = client.get("/metrics").get_data(as_text=True)
    assert "synth_runs_total 1.0" in body


def test_env_int(monkeypatch):
    monkeypatch.setenv("POLYSYNTH_THREADS", "3")
    assert config.thread_count() == 3
    monkeypatch.setenv("POLYSYNTH_THREADS", "lots")
    assert env_int("POLYSYNTH_THREADS", 5) == 5
    monkeypatch.setenv("POLYSYNTH_THREADS", "-2")
    assert env_int("POLYSYNTH_THREADS", 5) == 1
    monkeypatch.setenv("POLYSYNTH_EXHAUSTIVE_LIMIT", "0")
    assert config.exhaustive_limit() == 0
    monkeypatch.delenv("POLYSYNTH_EXHAUSTIVE_LIMIT")
    assert config.exhaustive_limit() == config.DEFAULT_EXHAUSTIVE_LIMIT


def test_paths_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("POLYSYNTH_MCNC_DIR", str(tmp_path))
    monkeypatch.delenv("POLYSYNTH_RECORD_DB", raising=False)
    assert config.mcnc_dir() == str(tmp_path)
    assert config.record_db() is None


def test_limits(monkeypatch):
    monkeypatch.setenv("POLYSYNTH_MAX_CELLS", "500")
    assert SynthLimits.from_env().max_cells == 500
    with pytest.raises(ValueError):
        SynthLimits(max_depth=0)
    with pytest.raises(ValueError):
        SynthLimits(max_cells=-1)


def test_error_messages():
    assert str(SpecError("bad cube", 7)) == "line 7: bad cube"
    assert str(SpecError("arity mismatch")) == "arity mismatch"
    assert isinstance(PlaFormatError("x", 1), SpecError)
    err = NetlistFormatError("Expecting value", 2, 5)
    assert (err.line, err.column) == (2, 5)
    assert str(err) == "Expecting value (line 2, column 5)"
