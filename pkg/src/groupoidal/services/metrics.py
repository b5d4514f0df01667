"""Prometheus metrics for suite runs."""

from __future__ import annotations

import logging
from pathlib import Path

from prometheus_client import CollectorRegistry, Counter, Histogram, generate_latest, write_to_textfile

from groupoidal.core.constants import CheckStatus

logger = logging.getLogger(__name__)

REGISTRY = CollectorRegistry()

CHECKS_TOTAL = Counter(
    "groupoidal_checks_total",
    "Count of executed checks by suite and outcome.",
    ["suite", "status"],
    registry=REGISTRY,
)

CHECK_SECONDS = Histogram(
    "groupoidal_check_seconds",
    "Wall-clock time spent in a single check.",
    ["suite"],
    registry=REGISTRY,
    buckets=(0.001, 0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0),
)


def observe_check(suite: str, status: CheckStatus, seconds: float) -> None:
    CHECKS_TOTAL.labels(suite=suite, status=status.value).inc()
    CHECK_SECONDS.labels(suite=suite).observe(seconds)


def render_metrics() -> bytes:
    return generate_latest(REGISTRY)


def write_metrics(path: str | Path) -> None:
    """Write the registry in text exposition format (node-exporter textfile collector)."""
    try:
        write_to_textfile(str(path), REGISTRY)
    except OSError:
        logger.exception("Failed to write metrics textfile %s", path)
