"""Trace measurements: discovery rates, phase windows, utilization bins, CSV."""
from __future__ import annotations

import numpy as np
import pytest

from discopace.metrics import (
    DISCOVERY_COLUMNS,
    DROPS_COLUMNS,
    REPLY_PHASE,
    REQUEST_PHASE,
    UTILIZATION_COLUMNS,
    build_bundle,
    discovery_rate,
    drop_rate,
    link_bits_per_bin,
    phase_stats,
    reply_window,
    utilization_series,
    write_csv_files,
)
from discopace.simcore import (
    DELIVERED,
    DROPPED,
    Packet,
    PacketKind,
    PacketRecord,
    Trace,
)
from discopace.harness import Scenario, run_scenario, run_trace
from discopace.topology import Layout, build_benchmark_network


@pytest.fixture(scope="module")
def dec_net():
    return build_benchmark_network(Layout.DECENTRALISED)


def empty_trace(net, end_time=20.0):
    trace = Trace(net, seed=0)
    trace.end_time = end_time
    return trace


def add_record(trace, pid, kind, created_at, status=DELIVERED,
               terminal_time=None, delivered_to=None, service=None,
               client=None, drop_at=None, drop_link=None):
    packet = Packet(kind=kind, size=128, src=0, dst=delivered_to or 0,
                    created_at=created_at, service=service, client=client)
    packet.id = pid
    record = PacketRecord(packet, status=status, terminal_time=terminal_time,
                          delivered_to=delivered_to)
    trace.records[pid] = record
    if status == DROPPED:
        trace.drops.append((drop_at, drop_link or (0, 1), pid))
    return record


# -- discovery rate -----------------------------------------------------------

@pytest.mark.parametrize("heard,expected", [(9, 1.0), (7, 7 / 9), (2, 2 / 9)])
def test_discovery_rate_fractions(dec_net, heard, expected):
    trace = empty_trace(dec_net)
    client = dec_net.clients[0]
    for i, service in enumerate(dec_net.services[:heard]):
        add_record(trace, i, PacketKind.REPLY, 10.0, terminal_time=10.1,
                   delivered_to=client, service=service, client=client)
    assert discovery_rate(trace, client) == pytest.approx(expected)


def test_discovery_rate_counts_distinct_services(dec_net):
    trace = empty_trace(dec_net)
    client = dec_net.clients[0]
    service = dec_net.services[0]
    for pid in range(3):    # duplicate replies from one service
        add_record(trace, pid, PacketKind.REPLY, 10.0, terminal_time=10.1,
                   delivered_to=client, service=service, client=client)
    assert discovery_rate(trace, client) == pytest.approx(1 / 9)


# -- windows and drop rates ---------------------------------------------------

def test_reply_window_bounds(dec_net):
    trace = empty_trace(dec_net)
    add_record(trace, 0, PacketKind.REPLY, 10.2, terminal_time=10.6)
    add_record(trace, 1, PacketKind.REPLY, 10.1, terminal_time=10.4)
    assert reply_window(trace) == (10.1, 10.6)


def test_reply_window_empty_and_inflight(dec_net):
    assert reply_window(empty_trace(dec_net)) is None
    trace = empty_trace(dec_net, end_time=15.0)
    add_record(trace, 0, PacketKind.REPLY, 10.0, status="inflight",
               terminal_time=None)
    assert reply_window(trace) == (10.0, 15.0)


def test_drop_rate_zero_and_empty(dec_net):
    trace = empty_trace(dec_net)
    add_record(trace, 0, PacketKind.REPLY, 10.0, terminal_time=10.1)
    assert drop_rate(trace, (10.0, 11.0)) == 0.0
    assert drop_rate(trace, (50.0, 60.0)) == 0.0    # nothing sent: convention


def test_drop_rate_counts_all_kinds(dec_net):
    trace = empty_trace(dec_net)
    add_record(trace, 0, PacketKind.REPLY, 10.0, terminal_time=10.1)
    add_record(trace, 1, PacketKind.CROSS, 10.05, status=DROPPED,
               drop_at=10.05)
    add_record(trace, 2, PacketKind.CROSS, 10.1, terminal_time=10.2)
    add_record(trace, 3, PacketKind.CROSS, 20.0, terminal_time=20.1)  # outside
    assert drop_rate(trace, (10.0, 11.0)) == pytest.approx(1 / 3)


def test_phase_boundary_is_half_open(dec_net):
    trace = empty_trace(dec_net)
    add_record(trace, 0, PacketKind.MSEARCH, 10.0, terminal_time=10.01)
    add_record(trace, 1, PacketKind.REPLY, 10.5, terminal_time=10.9)
    # A drop exactly at the first reply instant belongs to the reply phase.
    add_record(trace, 2, PacketKind.CROSS, 10.5, status=DROPPED, drop_at=10.5)
    stats = phase_stats(trace, request_time=10.0)
    assert stats[REQUEST_PHASE].sent == 1
    assert stats[REQUEST_PHASE].dropped == 0
    assert stats[REPLY_PHASE].dropped == 1
    assert stats[REPLY_PHASE].rate == pytest.approx(1 / 2)


def test_phase_stats_without_traffic(dec_net):
    stats = phase_stats(empty_trace(dec_net), request_time=10.0)
    assert stats[REQUEST_PHASE] == stats[REPLY_PHASE]
    assert stats[REQUEST_PHASE].sent == 0
    assert stats[REQUEST_PHASE].rate == 0.0


# -- utilization --------------------------------------------------------------

def test_idle_link_is_all_zero(dec_net):
    series = utilization_series(empty_trace(dec_net), (1, 2), 0.25)
    assert series.shape == (80,)
    assert not series.any()


def test_transmission_split_across_bin_edge(dec_net):
    trace = empty_trace(dec_net, end_time=1.0)
    trace.transmissions.append(((1, 2), 0.248, 0.252, 1024))
    series = utilization_series(trace, (1, 2), 0.25)
    capacity = 512_000.0 * 0.25
    assert series[0] == pytest.approx(512 / capacity)
    assert series[1] == pytest.approx(512 / capacity)
    assert series[2:].sum() == 0.0


def test_saturated_link_hits_exactly_one():
    scenario = Scenario(layout="decentralised", cross_size=300, sim_time=8.0,
                        discovery=False)
    trace, _ = run_trace(scenario)
    series = utilization_series(trace, (1, 2), 0.25)
    assert float(series.max()) <= 1.0 + 1e-9
    # 93.75% offered load: interior bins sit at the label value.
    assert float(series[10]) == pytest.approx(0.9375, abs=0.02)


def test_link_bits_cover_every_link(dec_net):
    scenario = Scenario(layout="decentralised", cross_size=100, sim_time=5.0,
                        discovery=False)
    trace, _ = run_trace(scenario)
    per_link = link_bits_per_bin(trace, 0.25)
    assert set(per_link) == set(dec_net.links)


# -- bundles and CSV ----------------------------------------------------------

@pytest.fixture(scope="module")
def small_bundle():
    return run_scenario(Scenario(layout="decentralised", cross_size=100,
                                 sim_time=14.0))


def test_bundle_basic_shape(small_bundle):
    assert small_bundle.name == "dec_c6_x100_baseline"
    assert set(small_bundle.discovery) == {f"C{i}" for i in range(6)}
    injected, delivered, dropped, inflight = small_bundle.totals
    assert injected == delivered + dropped + inflight
    assert small_bundle.min_discovery() <= small_bundle.max_discovery()
    series = small_bundle.utilization("R1->R2")
    assert series.shape == small_bundle.bin_starts.shape
    assert float(series.max()) <= 1.0 + 1e-9


def test_csv_files_schema_and_determinism(small_bundle, tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    paths = write_csv_files([small_bundle], str(out_a))
    write_csv_files([small_bundle], str(out_b))
    names = [p.split("/")[-1] for p in paths]
    assert names == ["utilization.csv", "discovery.csv", "drops.csv"]
    for name in names:
        a = (out_a / name).read_bytes()
        b = (out_b / name).read_bytes()
        assert a == b
    header = (out_a / "utilization.csv").read_text().splitlines()[0]
    assert header.split(",") == UTILIZATION_COLUMNS
    header = (out_a / "discovery.csv").read_text().splitlines()[0]
    assert header.split(",") == DISCOVERY_COLUMNS
    header = (out_a / "drops.csv").read_text().splitlines()[0]
    assert header.split(",") == DROPS_COLUMNS


def test_discovery_csv_rows(small_bundle, tmp_path):
    write_csv_files([small_bundle], str(tmp_path))
    lines = (tmp_path / "discovery.csv").read_text().splitlines()
    assert len(lines) == 1 + 6
    first = lines[1].split(",")
    assert first[0] == "dec_c6_x100_baseline"
    assert first[1] == "C0"
    assert first[3] == "9"
    assert float(first[4]) == pytest.approx(int(first[2]) / 9)


def test_drops_csv_rows(small_bundle, tmp_path):
    write_csv_files([small_bundle], str(tmp_path))
    lines = (tmp_path / "drops.csv").read_text().splitlines()
    phases = [line.split(",")[1] for line in lines[1:]]
    assert phases == [REQUEST_PHASE, REPLY_PHASE]
    request = lines[1].split(",")
    assert request[3] == "0"        # lossless request phase
