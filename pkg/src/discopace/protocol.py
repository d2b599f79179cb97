"""Discovery traffic model: multicast search, unicast replies, cross flows.

Clients multicast a fixed-size search message; every service answers each
client with one unicast reply, either immediately (optionally jittered) or
paced on a fixed-interval ladder.  Cross traffic is a constant packet
stream between service pairs.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence

from .simcore import ENQUEUE, MULTICAST, Engine, Packet, PacketKind, SimEvent
from .topology import Network, NodeId, NodeKind, TopologyError, route

MSEARCH_SIZE = 64   # bytes
REPLY_SIZE = 128    # bytes
CROSS_SEND_INTERVAL = 0.01  # seconds between packets of one stream


class ProtocolError(ValueError):
    """Raised for traffic definitions the network cannot satisfy."""


class ReplyMode(Enum):
    BASELINE = "baseline"
    PACED = "paced"


@dataclass(frozen=True)
class ReplyPolicy:
    """How a service times its replies.

    Baseline: reply after a uniform jitter on [0, mx] (immediate when mx=0).
    Paced: replies climb a ladder spaced `interval` seconds apart.
    """
    mode: ReplyMode
    mx: float = 0.0
    interval: float = 0.0


@dataclass(frozen=True)
class DiscoverySchedule:
    request_time: float
    clients: Sequence[NodeId]


@dataclass(frozen=True)
class CrossFlow:
    src: NodeId
    dst: NodeId
    packet_size: int
    send_interval: float = CROSS_SEND_INTERVAL
    start: float = 0.5
    stop: float = 100.0
    bidirectional: bool = True


def reply_delay(policy: ReplyPolicy, reply_index: int,
                rng: random.Random) -> float:
    """Injection delay of the reply_index-th reply relative to its request."""
    if reply_index < 0:
        raise ProtocolError("reply index must be >= 0")
    if policy.mode is ReplyMode.PACED:
        return reply_index * policy.interval
    if policy.mx > 0:
        return rng.uniform(0.0, policy.mx)
    return 0.0


def emit_msearch(net: Network, schedule: DiscoverySchedule) -> List[SimEvent]:
    """One multicast search per client, all injected at the request time."""
    if schedule.request_time < 0:
        raise ProtocolError("request time must be >= 0")
    events: List[SimEvent] = []
    for client in sorted(schedule.clients):
        if net.node(client).kind is not NodeKind.CLIENT:
            raise ProtocolError(f"node {client} is not a client")
        packet = Packet(kind=PacketKind.MSEARCH, size=MSEARCH_SIZE, src=client,
                        dst=MULTICAST, created_at=schedule.request_time)
        uplink = (client, net.router_of(client))
        events.append(SimEvent(schedule.request_time, ENQUEUE, link=uplink,
                               packet=packet))
    return events


class ServiceAgent:
    """Per-service reply behaviour, attached to the engine as a handler.

    The paced ladder anchors at the first request heard, so consecutive
    reply injections are spaced exactly `interval` apart even though the
    requests themselves arrive a few serialization times apart.
    """

    def __init__(self, net: Network, node: NodeId, policy: ReplyPolicy,
                 rng: random.Random) -> None:
        if net.node(node).kind is not NodeKind.SERVICE:
            raise ProtocolError(f"node {node} is not a service")
        self.net = net
        self.node = node
        self.policy = policy
        self.rng = rng
        self.reply_index = 0
        self._next_slot: Optional[float] = None

    def __call__(self, packet: Packet, now: float, engine: Engine) -> None:
        if packet.kind is not PacketKind.MSEARCH:
            return
        client = packet.src
        if self.policy.mode is ReplyMode.PACED:
            at = now if self._next_slot is None else max(now, self._next_slot)
            self._next_slot = at + self.policy.interval
        else:
            at = now + reply_delay(self.policy, self.reply_index, self.rng)
        self.reply_index += 1
        hops = tuple(l.key for l in route(self.net, self.node, client))
        reply = Packet(kind=PacketKind.REPLY, size=REPLY_SIZE, src=self.node,
                       dst=client, created_at=at, route=hops,
                       service=self.node, client=client)
        engine.inject(reply, at)


def emit_cross_traffic(net: Network, flow: CrossFlow) -> List[SimEvent]:
    """Constant-interval packet stream(s) for one flow, routes precomputed."""
    if flow.send_interval <= 0:
        raise ProtocolError("cross traffic send interval must be positive")
    if flow.packet_size <= 0:
        raise ProtocolError("cross traffic packet size must be positive")
    if flow.src == flow.dst:
        raise ProtocolError("cross traffic needs two distinct endpoints")
    directions = [(flow.src, flow.dst)]
    if flow.bidirectional:
        directions.append((flow.dst, flow.src))
    events: List[SimEvent] = []
    for src, dst in directions:
        hops = tuple(l.key for l in route(net, src, dst))
        k = 0
        while True:
            at = flow.start + k * flow.send_interval
            if at >= flow.stop:
                break
            packet = Packet(kind=PacketKind.CROSS, size=flow.packet_size,
                            src=src, dst=dst, created_at=at, route=hops)
            events.append(SimEvent(at, ENQUEUE, link=hops[0], packet=packet))
            k += 1
    return events


def benchmark_cross_flows(net: Network, packet_size: int,
                          send_interval: float = CROSS_SEND_INTERVAL,
                          start: float = 0.5, stop: float = 100.0,
                          ) -> List[CrossFlow]:
    """The benchmark's two bidirectional flows: S0<->S8 and S1<->S7."""
    pairs = (("S0", "S8"), ("S1", "S7"))
    flows = []
    for a, b in pairs:
        try:
            src, dst = net.id_of(a), net.id_of(b)
        except TopologyError as exc:
            raise ProtocolError(f"network lacks cross endpoints: {exc}") from exc
        flows.append(CrossFlow(src=src, dst=dst, packet_size=packet_size,
                               send_interval=send_interval, start=start,
                               stop=stop))
    return flows
