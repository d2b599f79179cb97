"""Deterministic store-and-forward event engine.

One heap of (time, ordinal) events drives per-link drop-tail queues with
work-conserving transmission.  Routers forward with zero processing delay;
multicast discovery requests are replicated along service-bearing links.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from .topology import Link, LinkKey, Network, NodeId, NodeKind

MULTICAST: NodeId = -1

DELIVERED = "delivered"
DROPPED = "dropped"
INFLIGHT = "inflight"

ENQUEUE = "enqueue"
TRANSMIT_DONE = "transmit_done"
DELIVER = "deliver"


class SimulationError(RuntimeError):
    """Raised for impossible schedules (e.g. events in the past)."""


class PacketKind(Enum):
    MSEARCH = "msearch"
    REPLY = "reply"
    CROSS = "cross"


@dataclass
class Packet:
    """One message in flight.  Unicast packets carry their full route."""
    kind: PacketKind
    size: int                 # bytes
    src: NodeId
    dst: NodeId               # MULTICAST for discovery requests
    created_at: float
    route: Optional[Tuple[LinkKey, ...]] = None
    hop: int = 0              # links already entered
    service: Optional[NodeId] = None   # replying service (REPLY)
    client: Optional[NodeId] = None    # requesting client (REPLY)
    copy_of: Optional[int] = None      # original packet id for flood copies
    id: Optional[int] = None


@dataclass(frozen=True)
class SimEvent:
    time: float
    action: str                         # ENQUEUE | TRANSMIT_DONE | DELIVER
    link: Optional[LinkKey] = None
    node: Optional[NodeId] = None
    packet: Optional[Packet] = None


@dataclass
class PacketRecord:
    packet: Packet
    status: str = INFLIGHT
    terminal_time: Optional[float] = None
    delivered_to: Optional[NodeId] = None
    drop_link: Optional[LinkKey] = None
    hops: List[Tuple[float, LinkKey]] = field(default_factory=list)


class Trace:
    """Everything a run produced: per-packet fates plus wire activity."""

    def __init__(self, net: Network, seed: int) -> None:
        self.net = net
        self.seed = seed
        self.end_time = 0.0
        self.records: Dict[int, PacketRecord] = {}
        self.transmissions: List[Tuple[LinkKey, float, float, int]] = []
        self.drops: List[Tuple[float, LinkKey, int]] = []
        self.deliveries: List[Tuple[float, NodeId, int]] = []

    def injected_count(self) -> int:
        return len(self.records)

    def count_by_status(self, status: str) -> int:
        return sum(1 for r in self.records.values() if r.status == status)

    def service_delivery_count(self, kind: PacketKind = PacketKind.MSEARCH) -> int:
        total = 0
        for _, node, pid in self.deliveries:
            if (self.net.nodes[node].kind is NodeKind.SERVICE
                    and self.records[pid].packet.kind is kind):
                total += 1
        return total

    def replies_heard(self, client: NodeId) -> List[NodeId]:
        """Distinct services whose reply reached this client, sorted."""
        heard = set()
        for record in self.records.values():
            if (record.packet.kind is PacketKind.REPLY
                    and record.status == DELIVERED
                    and record.delivered_to == client
                    and record.packet.service is not None):
                heard.add(record.packet.service)
        return sorted(heard)


class _EgressQueue:
    __slots__ = ("link", "pending", "serving")

    def __init__(self, link: Link) -> None:
        self.link = link
        self.pending: List[Packet] = []
        self.serving: Optional[Packet] = None


Handler = Callable[[Packet, float, "Engine"], None]


class Engine:
    """Event loop bound to one network.  Handlers run on leaf deliveries."""

    def __init__(self, net: Network, seed: int = 0,
                 handlers: Optional[Dict[NodeId, Handler]] = None) -> None:
        self.net = net
        self.handlers = handlers or {}
        self.trace = Trace(net, seed)
        self.now = 0.0
        self._heap: List[Tuple[float, int, SimEvent]] = []
        self._ordinal = 0
        self._next_packet_id = 0
        self._queues: Dict[LinkKey, _EgressQueue] = {
            key: _EgressQueue(link) for key, link in sorted(net.links.items())}

    # -- scheduling -----------------------------------------------------------

    def schedule(self, event: SimEvent) -> None:
        if event.time < self.now:
            raise SimulationError(
                f"event at t={event.time} is in the past (now={self.now})")
        heapq.heappush(self._heap, (event.time, self._ordinal, event))
        self._ordinal += 1

    def inject(self, packet: Packet, at: float) -> None:
        """Schedule a unicast packet onto the first link of its route."""
        if not packet.route:
            raise SimulationError("inject needs a routed packet")
        self.schedule(SimEvent(at, ENQUEUE, link=packet.route[0], packet=packet))

    # -- queue mechanics ------------------------------------------------------

    def _register(self, packet: Packet) -> PacketRecord:
        if packet.id is None:
            packet.id = self._next_packet_id
            self._next_packet_id += 1
            record = PacketRecord(packet)
            self.trace.records[packet.id] = record
            return record
        return self.trace.records[packet.id]

    def enqueue(self, key: LinkKey, packet: Packet, now: float) -> bool:
        """Drop-tail enqueue; returns False when the packet was dropped."""
        queue = self._queues[key]
        record = self._register(packet)
        record.hops.append((now, key))
        if packet.route is not None:
            packet.hop += 1
        if queue.serving is None:
            self._start_transmit(queue, packet, now)
            return True
        if len(queue.pending) < queue.link.queue_capacity:
            queue.pending.append(packet)
            return True
        record.status = DROPPED
        record.terminal_time = now
        record.drop_link = key
        self.trace.drops.append((now, key, packet.id))
        return False

    def _start_transmit(self, queue: _EgressQueue, packet: Packet,
                        now: float) -> None:
        queue.serving = packet
        duration = packet.size * 8.0 / queue.link.bandwidth
        self.trace.transmissions.append(
            (queue.link.key, now, now + duration, packet.size * 8))
        self.schedule(SimEvent(now + duration, TRANSMIT_DONE,
                               link=queue.link.key))

    def _transmit_done(self, key: LinkKey, now: float) -> None:
        queue = self._queues[key]
        packet = queue.serving
        assert packet is not None
        queue.serving = None
        self.schedule(SimEvent(now + queue.link.delay, DELIVER,
                               node=queue.link.dst, packet=packet))
        if queue.pending:
            self._start_transmit(queue, queue.pending.pop(0), now)

    # -- arrivals -------------------------------------------------------------

    def _deliver(self, node: NodeId, packet: Packet, now: float) -> None:
        record = self.trace.records[packet.id]
        record.status = DELIVERED
        record.terminal_time = now
        record.delivered_to = node
        self.trace.deliveries.append((now, node, packet.id))

    def _fanout(self, router: NodeId, packet: Packet, now: float) -> None:
        # The packet arrived over some directed link (u, router); never send
        # a copy back out over that link's twin.
        arrival_src: Optional[NodeId] = None
        record = self.trace.records[packet.id]
        if record.hops:
            arrival_src = record.hops[-1][1][0]
        for link in self.net.out_links(router):
            if link.dst == arrival_src:
                continue
            if not self.net.leads_to_service(link):
                continue
            copy = Packet(kind=packet.kind, size=packet.size, src=packet.src,
                          dst=MULTICAST, created_at=now, copy_of=packet.id)
            self.enqueue(link.key, copy, now)

    def _arrive(self, node: NodeId, packet: Packet, now: float) -> None:
        kind = self.net.nodes[node].kind
        if kind is NodeKind.ROUTER and packet.dst != node:
            if packet.dst == MULTICAST:
                self._fanout(node, packet, now)
                self._deliver(node, packet, now)  # copy consumed by fanout
                return
            assert packet.route is not None
            self.enqueue(packet.route[packet.hop], packet, now)
            return
        self._deliver(node, packet, now)
        handler = self.handlers.get(node)
        if handler is not None:
            handler(packet, now, self)

    # -- main loop ------------------------------------------------------------

    def run(self, initial_events: Iterable[SimEvent], end_time: float) -> Trace:
        for event in initial_events:
            self.schedule(event)
        while self._heap and self._heap[0][0] <= end_time:
            time, _, event = heapq.heappop(self._heap)
            self.now = time
            if event.action == ENQUEUE:
                assert event.link is not None and event.packet is not None
                self.enqueue(event.link, event.packet, time)
            elif event.action == TRANSMIT_DONE:
                assert event.link is not None
                self._transmit_done(event.link, time)
            elif event.action == DELIVER:
                assert event.node is not None and event.packet is not None
                self._arrive(event.node, event.packet, time)
            else:
                raise SimulationError(f"unknown event action {event.action!r}")
        self.trace.end_time = end_time
        return self.trace


def run(net: Network, initial_events: Iterable[SimEvent], end_time: float,
        seed: int = 0, handlers: Optional[Dict[NodeId, Handler]] = None) -> Trace:
    """Run one simulation to end_time and return its trace."""
    return Engine(net, seed=seed, handlers=handlers).run(initial_events, end_time)
