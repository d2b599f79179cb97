"""Reply-burst pacing planner.

Sizes router sending queues from the reply pairs that transit them and
computes the best interval (BI): the spacing between one service's
consecutive replies that lets the bottleneck router drain a full burst
before the next one lands.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

from .topology import (Layout, Link, LinkKey, LinkKind, Network, NodeId,
                       NodeKind, client_count, route, service_count,
                       split_at_router)


class PlannerError(ValueError):
    """Raised when a plan is requested for a network it cannot cover."""


@dataclass(frozen=True)
class MessageSpec:
    """A message size paired with the bandwidth it would be sent over."""
    size_bytes: int
    bandwidth_bps: float

    def __post_init__(self) -> None:
        if self.size_bytes <= 0 or self.bandwidth_bps <= 0:
            raise PlannerError("message size and bandwidth must be positive")


def serialization_time(size_bytes: int, bandwidth_bps: float) -> float:
    """Seconds to put size_bytes on the wire at bandwidth_bps."""
    if size_bytes < 0 or bandwidth_bps <= 0:
        raise PlannerError("message size must be >= 0 and bandwidth > 0")
    return size_bytes * 8.0 / bandwidth_bps


def message_time(spec: MessageSpec) -> float:
    """Serialization time of one message per its own bandwidth."""
    return serialization_time(spec.size_bytes, spec.bandwidth_bps)


# -- queue sizing -------------------------------------------------------------

def reply_pair_link_counts(net: Network) -> Dict[LinkKey, int]:
    """Per directed link: how many (service, client) reply routes use it."""
    counts: Dict[LinkKey, int] = {key: 0 for key in net.links}
    for service in net.services:
        for client in net.clients:
            for link in route(net, service, client):
                counts[link.key] += 1
    return counts


def queue_sizes(net: Network) -> Dict[NodeId, int]:
    """Required sending-queue slots per router: every reply pair it forwards.

    A route crosses at most one egress link of each router, so the transit
    count is the sum of that router's per-link pair counts.  Floored at one
    slot so even an idle router has a well-formed queue.
    """
    per_link = reply_pair_link_counts(net)
    sizes: Dict[NodeId, int] = {}
    for router in net.routers:
        transits = sum(per_link[l.key] for l in net.out_links(router))
        sizes[router] = max(1, transits)
    return sizes


def msearch_flood_link_counts(net: Network) -> Dict[LinkKey, int]:
    """Per directed link: discovery-request copies it carries (one flood per
    client, pruned to subtrees that contain a service)."""
    counts: Dict[LinkKey, int] = {key: 0 for key in net.links}
    for client in net.clients:
        origin = net.router_of(client)
        counts[(client, origin)] += 1
        frontier = deque([(origin, client)])
        while frontier:
            router, came_from = frontier.popleft()
            for link in net.out_links(router):
                if link.dst == came_from:
                    continue
                if not net.leads_to_service(link):
                    continue
                counts[link.key] += 1
                if net.nodes[link.dst].kind is NodeKind.ROUTER:
                    frontier.append((link.dst, router))
    return counts


def plan_link_capacities(net: Network) -> Dict[LinkKey, int]:
    """Drop-tail capacity per directed link under the plan: a full reply
    burst plus the request flood, so neither phase can overflow."""
    pairs = reply_pair_link_counts(net)
    flood = msearch_flood_link_counts(net)
    return {key: max(1, pairs[key] + flood[key]) for key in net.links}


# -- burst profile ------------------------------------------------------------

@dataclass(frozen=True)
class BurstProfile:
    """Everything the interval formula needs about one candidate router."""
    router: NodeId
    reply_count: int          # replies in a full burst through this router
    reply_time_total: float   # sum of their egress serialization times
    idle_slots: int           # pipeline gaps between consecutive bursts
    max_message_time: float   # slowest single reply on any egress link
    avg_message_time: float   # reply time at the mean of main and sub rates
    overlap_slots: int        # queue slots already free when a burst lands


def _mean_band(net: Network, kind: LinkKind) -> Optional[float]:
    bands = [l.bandwidth for l in net.links.values() if l.kind is kind]
    return sum(bands) / len(bands) if bands else None


def _router_hops(net: Network, start: NodeId) -> Dict[NodeId, int]:
    """Main-link hop count from start to every router."""
    dist = {start: 0}
    frontier = deque([start])
    while frontier:
        cur = frontier.popleft()
        for link in net.out_links(cur):
            if link.kind is LinkKind.MAIN and link.dst not in dist:
                dist[link.dst] = dist[cur] + 1
                frontier.append(link.dst)
    return dist


def overlapped_space(net: Network, router: NodeId, qsize: int) -> int:
    """Queue slots at `router` not consumed by the largest one-router reply
    wave: qsize minus (largest per-router service count x local clients).

    A lone client still receives back-to-back bursts, so it counts twice.
    """
    if qsize < 0:
        raise PlannerError("queue size must be >= 0")
    receivers = client_count(net, router)
    if receivers == 0:
        return 0
    if receivers == 1:
        receivers = 2
    largest = max((service_count(net, r) for r in net.routers), default=0)
    return max(0, qsize - largest * receivers)


def burst_profile(net: Network, router: NodeId,
                  reply: MessageSpec) -> BurstProfile:
    """Measure the full reply burst as seen from one candidate router."""
    if net.node(router).kind is not NodeKind.ROUTER:
        raise PlannerError(f"node {router} is not a router")
    local_clients = net.attached(router, NodeKind.CLIENT)
    if not local_clients:
        raise PlannerError(f"router {router} has no clients to receive bursts")
    total_services = len(net.services)

    reply_count = len(local_clients) * total_services
    reply_time_total = 0.0
    for client in local_clients:
        egress = net.links[(router, client)]
        reply_time_total += total_services * serialization_time(
            reply.size_bytes, egress.bandwidth)

    hosting = [r for r in net.routers if service_count(net, r) > 0]
    remote = [r for r in hosting if r != router]
    if remote:
        hops = _router_hops(net, router)
        idle_slots = 1 + min(hops[r] for r in remote)
    else:
        idle_slots = 0

    max_message_time = max(
        serialization_time(reply.size_bytes, l.bandwidth)
        for l in net.out_links(router))

    means = [m for m in (_mean_band(net, LinkKind.MAIN),
                         _mean_band(net, LinkKind.SUB)) if m is not None]
    avg_message_time = serialization_time(reply.size_bytes,
                                          sum(means) / len(means))

    overlap = overlapped_space(net, router, queue_sizes(net)[router])
    return BurstProfile(router=router,
                        reply_count=reply_count,
                        reply_time_total=reply_time_total,
                        idle_slots=idle_slots,
                        max_message_time=max_message_time,
                        avg_message_time=avg_message_time,
                        overlap_slots=overlap)


# -- candidate selection ------------------------------------------------------

@dataclass(frozen=True)
class CandidateSet:
    routers: Tuple[NodeId, ...]

    @property
    def z(self) -> int:
        return len(self.routers)


def _client_routers(net: Network) -> List[NodeId]:
    routers = [r for r in net.routers if client_count(net, r) > 0]
    if not routers:
        raise PlannerError("network has no clients")
    return routers


def candidates_decentralised(net: Network) -> CandidateSet:
    """Chain-layout candidate routers: the union of four selection rules."""
    if net.layout is not Layout.DECENTRALISED:
        raise PlannerError("decentralised candidate rules need a chain layout")
    client_routers = _client_routers(net)
    chain = net.router_chain()
    picked: List[NodeId] = []

    # 1. Router of the client at the end of the longest service-to-client path.
    if net.services:
        best: Optional[Tuple[int, int]] = None  # (-hops, router id)
        for service in net.services:
            for client in net.clients:
                hops = len(route(net, service, client))
                key = (-hops, net.router_of(client))
                if best is None or key < best:
                    best = key
        assert best is not None
        picked.append(best[1])

    # 2. Largest client count, then most services reachable from one side.
    def one_side_services(r: NodeId) -> int:
        left, right = split_at_router(net, r)
        count_left = sum(1 for n in left if net.nodes[n].kind is NodeKind.SERVICE)
        count_right = sum(1 for n in right if net.nodes[n].kind is NodeKind.SERVICE)
        return max(count_left, count_right)

    picked.append(min(client_routers,
                      key=lambda r: (-client_count(net, r),
                                     -one_side_services(r), r)))

    # 3. Client-attached router nearest either end of the chain.
    picked.append(min(client_routers,
                      key=lambda r: (min(chain.index(r),
                                         len(chain) - 1 - chain.index(r)), r)))

    # 4. A selected router serving a single client pulls in the nearest other
    #    client-attached router.
    for r in list(picked):
        if client_count(net, r) == 1:
            others = [o for o in client_routers if o != r]
            if others:
                picked.append(min(
                    others,
                    key=lambda o: (abs(chain.index(o) - chain.index(r)), o)))

    ordered = tuple(sorted(set(picked)))
    return CandidateSet(routers=ordered)


def candidate_centralised(net: Network) -> CandidateSet:
    """Star-layout candidate: most clients, then fewest services, then id."""
    if net.layout is not Layout.CENTRALISED:
        raise PlannerError("centralised candidate rule needs a star layout")
    _client_routers(net)
    winner = min(net.routers,
                 key=lambda r: (-client_count(net, r), service_count(net, r), r))
    return CandidateSet(routers=(winner,))


# -- best interval ------------------------------------------------------------

@dataclass(frozen=True)
class PacingPlan:
    best_interval: float
    queue_sizes: Dict[NodeId, int]
    candidates: CandidateSet
    per_candidate: Dict[NodeId, BurstProfile]
    intervals: Dict[NodeId, float]
    use_overlap: bool


def candidate_interval(profile: BurstProfile, use_overlap: bool = True) -> float:
    """Interval for one candidate: burst drain time plus pipeline idle gaps,
    minus the slot freed by the reply in flight, minus any spare queue space
    (when use_overlap).  Clamped at zero."""
    value = profile.reply_time_total
    value += profile.idle_slots * profile.avg_message_time
    value -= profile.max_message_time
    if use_overlap:
        value -= profile.overlap_slots * profile.avg_message_time
    return max(0.0, value)


def best_interval(net: Network, reply: MessageSpec,
                  use_overlap: bool = True) -> PacingPlan:
    """Full pacing plan: queue sizes plus the max interval over candidates."""
    if net.layout is Layout.DECENTRALISED:
        candidates = candidates_decentralised(net)
    else:
        candidates = candidate_centralised(net)
    profiles: Dict[NodeId, BurstProfile] = {}
    intervals: Dict[NodeId, float] = {}
    for router in candidates.routers:
        profile = burst_profile(net, router, reply)
        profiles[router] = profile
        intervals[router] = candidate_interval(profile, use_overlap)
    best = max(intervals.values())
    return PacingPlan(best_interval=best,
                      queue_sizes=queue_sizes(net),
                      candidates=candidates,
                      per_candidate=profiles,
                      intervals=intervals,
                      use_overlap=use_overlap)
