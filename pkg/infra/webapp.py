"""
Health and metrics endpoint for long suite runs (compare --serve-metrics PORT).
The server runs in a daemon thread and dies with the process.
"""
import logging
import threading
from typing import Callable, Dict, Optional

from flask import Flask, Response, jsonify

from infra.prometheus_metrics import Metrics

logger = logging.getLogger("http")


def create_app(metrics: Metrics, status: Optional[Callable[[], Dict]] = None) -> Flask:
    app = Flask("polysynth")

    @app.route("/health")
    def health():
        body = {"status": "ok"}
        if status is not None:
            body.update(status())
        return jsonify(body)

    @app.route("/metrics")
    def metrics_endpoint():
        return Response(metrics.metrics_response(), mimetype="text/plain; version=0.0.4")

    return app


def serve_in_background(app: Flask, port: int, host: str = "127.0.0.1") -> threading.Thread:
    def run():
        app.run(host=host, port=port, debug=False, use_reloader=False)

    thread = threading.Thread(target=run, name="metrics-http", daemon=True)
    thread.start()
    logger.info("metrics server running on %s:%d", host, port)
    return thread
