"""
Maps synthesis events onto metric names so the algorithms never spell
Prometheus names themselves. Every helper accepts metrics=None and then only logs.
"""
import logging
from typing import Optional

from infra.prometheus_metrics import Metrics

log = logging.getLogger("observability")


def record_decomposition(metrics: Optional[Metrics], kind: str):
    """kind is one of strong, weak, shannon, poly-strong, merged, mode-split."""
    if metrics is None:
        return
    metrics.inc_counter("decompositions_total")
    metrics.inc_counter(f"decompositions_{kind.replace('-', '_')}_total")


def record_rule(metrics: Optional[Metrics], rule: str):
    if metrics is None:
        return
    metrics.inc_counter("rule_applications_total")
    metrics.inc_counter(f"rule_{rule.replace('.', '_')}_total")


def record_stats(metrics: Optional[Metrics], label: str, stats) -> None:
    """Publish the gate statistics of a finished synthesis run."""
    log.info("%s: total=%d poly=%d percent=%.1f", label, stats.total_counted, stats.poly_count, stats.poly_percent)
    if metrics is None:
        return
    metrics.inc_counter("synth_runs_total")
    metrics.set_gauge("last_gate_total", stats.total_counted)
    metrics.set_gauge("last_poly_percent", stats.poly_percent)


def record_verification(metrics: Optional[Metrics], report) -> None:
    if metrics is None:
        return
    metrics.inc_counter("verify_checks_total", report.checks)
    if not report.passed:
        metrics.inc_counter("verify_failures_total")
