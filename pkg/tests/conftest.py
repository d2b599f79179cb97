"""Shared fixtures.  The full scenario grid is the expensive part of the
suite, so it runs once per session and every module reads from it."""
from __future__ import annotations

import pytest

from discopace import harness


@pytest.fixture(scope="session")
def benchmark_sweep():
    """Baseline/paced pairs for both layouts at seed 1 over a 20 s horizon."""
    return harness.sweep(seed=1, sim_time=20.0)


def pair_for(reports, layout, clients, cross_size):
    """Pick one comparison report out of a sweep by its grid cell."""
    for report in reports:
        base = report.baseline
        if (base.layout == layout and base.clients == clients
                and base.cross_size == cross_size):
            return report
    raise AssertionError(f"no pair for {layout}/{clients}/{cross_size}")
