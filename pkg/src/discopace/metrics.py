"""Measurements over simulation traces plus the CSV export schemas.

Part of the experiment harness: discovery rate per client, windowed drop
rates per phase, and binned link utilization.
"""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .planner import PacingPlan
from .simcore import DELIVERED, DROPPED, INFLIGHT, PacketKind, Trace
from .topology import LinkKey, Network, NodeId

REQUEST_PHASE = "request"
REPLY_PHASE = "reply"


@dataclass(frozen=True)
class PhaseStats:
    sent: int
    dropped: int

    @property
    def rate(self) -> float:
        return self.dropped / self.sent if self.sent else 0.0


def discovery_rate(trace: Trace, client: NodeId) -> float:
    """Fraction of all services this client heard at least one reply from."""
    total = len(trace.net.services)
    if total == 0:
        return 0.0
    return len(trace.replies_heard(client)) / total


def reply_window(trace: Trace) -> Optional[Tuple[float, float]]:
    """[first reply injection, last reply terminal event], or None."""
    start = None
    end = None
    for record in trace.records.values():
        if record.packet.kind is not PacketKind.REPLY:
            continue
        created = record.packet.created_at
        terminal = record.terminal_time
        if terminal is None:  # still in flight when the run ended
            terminal = trace.end_time
        start = created if start is None else min(start, created)
        end = terminal if end is None else max(end, terminal)
    if start is None:
        return None
    return (start, end)


def drop_rate(trace: Trace, window: Tuple[float, float]) -> float:
    """Drops within [a, b] over packets of any kind sent within [a, b].

    Returns 0.0 for an empty window (nothing sent)."""
    a, b = window
    sent = sum(1 for r in trace.records.values()
               if a <= r.packet.created_at <= b)
    if sent == 0:
        return 0.0
    dropped = sum(1 for t, _, _ in trace.drops if a <= t <= b)
    return dropped / sent


def _window_stats(trace: Trace, a: float, b: float,
                  closed_end: bool) -> PhaseStats:
    def inside(t: float) -> bool:
        return a <= t <= b if closed_end else a <= t < b

    sent = sum(1 for r in trace.records.values()
               if inside(r.packet.created_at))
    dropped = sum(1 for t, _, _ in trace.drops if inside(t))
    return PhaseStats(sent, dropped)


def phase_stats(trace: Trace, request_time: float) -> Dict[str, PhaseStats]:
    """Request phase [request_time, first reply injection) and reply phase
    [first injection, last reply terminal], each counting every traffic kind."""
    stats: Dict[str, PhaseStats] = {}
    window = reply_window(trace)
    saw_requests = any(r.packet.kind is PacketKind.MSEARCH
                       for r in trace.records.values())
    if saw_requests:
        request_end = window[0] if window else trace.end_time
        stats[REQUEST_PHASE] = _window_stats(trace, request_time, request_end,
                                             closed_end=False)
    else:
        stats[REQUEST_PHASE] = PhaseStats(0, 0)
    if window:
        stats[REPLY_PHASE] = _window_stats(trace, window[0], window[1],
                                           closed_end=True)
    else:
        stats[REPLY_PHASE] = PhaseStats(0, 0)
    return stats


def utilization_series(trace: Trace, link: LinkKey,
                       bin_width: float) -> np.ndarray:
    """Fraction of link capacity used per time bin over [0, end_time].

    Bits of a transmission spanning a bin edge are split proportionally,
    so every bin value stays within [0, 1]."""
    if bin_width <= 0:
        raise ValueError("bin width must be positive")
    bins = max(1, math.ceil(trace.end_time / bin_width))
    bits = np.zeros(bins)
    for key, start, end, size_bits in trace.transmissions:
        if key != link:
            continue
        _spread(bits, start, end, size_bits, bin_width)
    capacity = trace.net.links[link].bandwidth * bin_width
    return bits / capacity


def _spread(out: np.ndarray, start: float, end: float, size_bits: int,
            bin_width: float) -> None:
    duration = end - start
    if duration <= 0:
        return
    first = int(start // bin_width)
    last = int(end // bin_width)
    for b in range(first, min(last, len(out) - 1) + 1):
        lo = max(start, b * bin_width)
        hi = min(end, (b + 1) * bin_width)
        if hi > lo:
            out[b] += size_bits * (hi - lo) / duration


def link_bits_per_bin(trace: Trace, bin_width: float) -> Dict[LinkKey, np.ndarray]:
    """Bits serialized per bin for every link in one pass."""
    bins = max(1, math.ceil(trace.end_time / bin_width))
    per_link: Dict[LinkKey, np.ndarray] = {
        key: np.zeros(bins) for key in trace.net.links}
    for key, start, end, size_bits in trace.transmissions:
        _spread(per_link[key], start, end, size_bits, bin_width)
    return per_link


@dataclass
class MetricsBundle:
    """All measurements of one scenario run, ready for export."""
    name: str
    layout: str
    clients: int
    cross_size: int
    policy: str
    queue_mode: str
    seed: int
    bin_width: float
    bin_starts: np.ndarray
    link_bits: Dict[str, np.ndarray]        # link label -> bits per bin
    link_bandwidth: Dict[str, float]        # link label -> bit/s
    discovery: Dict[str, Tuple[int, int]]   # client label -> (heard, total)
    phases: Dict[str, PhaseStats]
    window: Optional[Tuple[float, float]]
    totals: Tuple[int, int, int, int]       # injected/delivered/dropped/inflight
    reply_drops: int
    plan: Optional[PacingPlan] = None

    def utilization(self, label: str) -> np.ndarray:
        return self.link_bits[label] / (self.link_bandwidth[label] * self.bin_width)

    def discovery_rates(self) -> Dict[str, float]:
        return {c: heard / total if total else 0.0
                for c, (heard, total) in self.discovery.items()}

    def min_discovery(self) -> float:
        rates = self.discovery_rates()
        return min(rates.values()) if rates else 0.0

    def max_discovery(self) -> float:
        rates = self.discovery_rates()
        return max(rates.values()) if rates else 0.0

    def reply_drop_rate(self) -> float:
        return self.phases[REPLY_PHASE].rate

    def total_drops(self) -> int:
        return self.totals[2]


def build_bundle(trace: Trace, name: str, layout: str, clients: int,
                 cross_size: int, policy: str, queue_mode: str, seed: int,
                 request_time: float, bin_width: float,
                 plan: Optional[PacingPlan] = None) -> MetricsBundle:
    net = trace.net
    per_link = link_bits_per_bin(trace, bin_width)
    link_bits = {net.link_label(key): series
                 for key, series in sorted(per_link.items())}
    link_bandwidth = {net.link_label(key): link.bandwidth
                      for key, link in sorted(net.links.items())}
    bins = next(iter(per_link.values())).shape[0] if per_link else 0
    discovery = {}
    for client in net.clients:
        discovery[net.nodes[client].label] = (
            len(trace.replies_heard(client)), len(net.services))
    reply_drops = sum(
        1 for r in trace.records.values()
        if r.packet.kind is PacketKind.REPLY and r.status == DROPPED)
    totals = (trace.injected_count(),
              trace.count_by_status(DELIVERED),
              trace.count_by_status(DROPPED),
              trace.count_by_status(INFLIGHT))
    return MetricsBundle(name=name, layout=layout, clients=clients,
                         cross_size=cross_size, policy=policy,
                         queue_mode=queue_mode, seed=seed,
                         bin_width=bin_width,
                         bin_starts=np.arange(bins) * bin_width,
                         link_bits=link_bits,
                         link_bandwidth=link_bandwidth,
                         discovery=discovery,
                         phases=phase_stats(trace, request_time),
                         window=reply_window(trace),
                         totals=totals,
                         reply_drops=reply_drops,
                         plan=plan)


# -- CSV export ---------------------------------------------------------------

UTILIZATION_COLUMNS = ["scenario", "link", "bin_start_s", "bits", "utilization"]
DISCOVERY_COLUMNS = ["scenario", "client", "services_heard", "services_total",
                     "rate"]
DROPS_COLUMNS = ["scenario", "phase", "sent", "dropped", "rate"]


def write_csv_files(bundles: List[MetricsBundle], out_dir: str) -> List[str]:
    """Write utilization.csv, discovery.csv and drops.csv under out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    path = os.path.join(out_dir, "utilization.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(UTILIZATION_COLUMNS)
        for bundle in bundles:
            for label in sorted(bundle.link_bits):
                bits = bundle.link_bits[label]
                util = bundle.utilization(label)
                for i, start in enumerate(bundle.bin_starts):
                    writer.writerow([bundle.name, label, f"{start:.4f}",
                                     f"{bits[i]:.3f}", f"{util[i]:.6f}"])
    paths.append(path)
    path = os.path.join(out_dir, "discovery.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(DISCOVERY_COLUMNS)
        for bundle in bundles:
            for client in sorted(bundle.discovery):
                heard, total = bundle.discovery[client]
                rate = heard / total if total else 0.0
                writer.writerow([bundle.name, client, heard, total,
                                 f"{rate:.6f}"])
    paths.append(path)
    path = os.path.join(out_dir, "drops.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(DROPS_COLUMNS)
        for bundle in bundles:
            for phase in (REQUEST_PHASE, REPLY_PHASE):
                stats = bundle.phases[phase]
                writer.writerow([bundle.name, phase, stats.sent, stats.dropped,
                                 f"{stats.rate:.6f}"])
    paths.append(path)
    return paths
