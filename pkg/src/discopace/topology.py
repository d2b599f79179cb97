"""Network model: routers, service/client leaves, directed drop-tail links.

Networks are trees (a router chain or a star with one root), so every
unicast route is unique and static.  Links are directed: one duplex cable
is two Link records with independent queues.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

NodeId = int
LinkKey = Tuple[NodeId, NodeId]

MAIN_BANDWIDTH = 512_000.0  # bit/s, router-to-router
SUB_BANDWIDTH = 256_000.0   # bit/s, router-to-leaf
LINK_DELAY = 0.0            # seconds, both classes

# Drop-tail defaults per link class.  Small enough that a synchronized reply
# burst overflows the shared links, large enough that the discovery request
# flood itself is never dropped (8 clients with 300-byte cross traffic is the
# binding case for the main class).
DEFAULT_MAIN_QUEUE = 8
DEFAULT_SERVICE_QUEUE = 8
DEFAULT_CLIENT_QUEUE = 5


class TopologyError(ValueError):
    """Raised for malformed networks or impossible route requests."""


class Layout(Enum):
    DECENTRALISED = "decentralised"
    CENTRALISED = "centralised"


class NodeKind(Enum):
    ROUTER = "router"
    SERVICE = "service"
    CLIENT = "client"


class LinkKind(Enum):
    MAIN = "main"
    SUB = "sub"


@dataclass(frozen=True)
class Node:
    id: NodeId
    kind: NodeKind
    label: str


@dataclass(frozen=True)
class Link:
    src: NodeId
    dst: NodeId
    bandwidth: float
    delay: float
    queue_capacity: int
    kind: LinkKind

    @property
    def key(self) -> LinkKey:
        return (self.src, self.dst)


@dataclass(frozen=True)
class QueueDefaults:
    """Per-class drop-tail capacities used when no explicit override is given."""
    main: int = DEFAULT_MAIN_QUEUE
    service_sub: int = DEFAULT_SERVICE_QUEUE
    client_sub: int = DEFAULT_CLIENT_QUEUE


class Network:
    """Immutable-after-construction node/link graph with route caching."""

    def __init__(self, nodes: Iterable[Node], links: Iterable[Link],
                 layout: Layout, cross_message_size: int = 0) -> None:
        self.layout = layout
        self.cross_message_size = cross_message_size
        self.nodes: Dict[NodeId, Node] = {}
        for node in nodes:
            if node.id in self.nodes:
                raise TopologyError(f"duplicate node id {node.id}")
            self.nodes[node.id] = node
        self.links: Dict[LinkKey, Link] = {}
        self._out: Dict[NodeId, List[Link]] = {n: [] for n in self.nodes}
        for link in links:
            if link.key in self.links:
                raise TopologyError(f"duplicate link {link.key}")
            if link.src not in self.nodes or link.dst not in self.nodes:
                raise TopologyError(f"link {link.key} references unknown node")
            self.links[link.key] = link
            self._out[link.src].append(link)
        for out in self._out.values():
            out.sort(key=lambda l: l.dst)
        self.by_label: Dict[str, NodeId] = {n.label: n.id for n in self.nodes.values()}
        self.routers: List[NodeId] = sorted(
            n.id for n in self.nodes.values() if n.kind is NodeKind.ROUTER)
        self.services: List[NodeId] = sorted(
            n.id for n in self.nodes.values() if n.kind is NodeKind.SERVICE)
        self.clients: List[NodeId] = sorted(
            n.id for n in self.nodes.values() if n.kind is NodeKind.CLIENT)
        self._leaf_router: Dict[NodeId, NodeId] = {}
        self._attached: Dict[NodeId, Dict[NodeKind, List[NodeId]]] = {
            r: {NodeKind.SERVICE: [], NodeKind.CLIENT: []} for r in self.routers}
        self._validate_leaves()
        self._check_connected()
        self._route_cache: Dict[Tuple[NodeId, NodeId], Tuple[Link, ...]] = {}
        self._service_ward: Dict[LinkKey, bool] = {}
        self._chain: Optional[List[NodeId]] = None

    # -- construction helpers -------------------------------------------------

    def _validate_leaves(self) -> None:
        for node in self.nodes.values():
            if node.kind is NodeKind.ROUTER:
                continue
            neighbours = {l.dst for l in self._out[node.id]}
            neighbours |= {k[0] for k in self.links if k[1] == node.id}
            routers = {n for n in neighbours if self.nodes[n].kind is NodeKind.ROUTER}
            if len(neighbours) != 1 or len(routers) != 1:
                raise TopologyError(
                    f"leaf {node.label} must attach to exactly one router")
            router = routers.pop()
            self._leaf_router[node.id] = router
            self._attached[router][node.kind].append(node.id)
        for slots in self._attached.values():
            slots[NodeKind.SERVICE].sort()
            slots[NodeKind.CLIENT].sort()

    def _check_connected(self) -> None:
        if not self.nodes:
            raise TopologyError("empty network")
        seen: Set[NodeId] = set()
        frontier = deque([next(iter(self.nodes))])
        while frontier:
            cur = frontier.popleft()
            if cur in seen:
                continue
            seen.add(cur)
            for link in self._out[cur]:
                frontier.append(link.dst)
        if seen != set(self.nodes):
            raise TopologyError("network is not connected")

    # -- queries --------------------------------------------------------------

    def node(self, node_id: NodeId) -> Node:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise TopologyError(f"unknown node id {node_id}") from None

    def id_of(self, label: str) -> NodeId:
        try:
            return self.by_label[label]
        except KeyError:
            raise TopologyError(f"unknown node label {label!r}") from None

    def out_links(self, node_id: NodeId) -> List[Link]:
        return self._out[node_id]

    def router_of(self, leaf: NodeId) -> NodeId:
        return self._leaf_router[leaf]

    def attached(self, router: NodeId, kind: NodeKind) -> List[NodeId]:
        return self._attached[router][kind]

    def main_links(self) -> List[Link]:
        return [l for _, l in sorted(self.links.items()) if l.kind is LinkKind.MAIN]

    def sub_links(self) -> List[Link]:
        return [l for _, l in sorted(self.links.items()) if l.kind is LinkKind.SUB]

    def link_label(self, key: LinkKey) -> str:
        return f"{self.nodes[key[0]].label}->{self.nodes[key[1]].label}"

    def router_chain(self) -> List[NodeId]:
        """Routers in chain order (decentralised layouts only)."""
        if self._chain is not None:
            return self._chain
        adj: Dict[NodeId, List[NodeId]] = {r: [] for r in self.routers}
        for link in self.links.values():
            if link.kind is LinkKind.MAIN:
                adj[link.src].append(link.dst)
        if len(self.routers) == 1:
            self._chain = list(self.routers)
            return self._chain
        ends = sorted(r for r, ns in adj.items() if len(ns) == 1)
        if not ends or any(len(ns) > 2 for ns in adj.values()):
            raise TopologyError("router graph is not a chain")
        order = [ends[0]]
        prev: Optional[NodeId] = None
        while True:
            nxt = [n for n in adj[order[-1]] if n != prev]
            if not nxt:
                break
            prev = order[-1]
            order.append(nxt[0])
        if len(order) != len(self.routers):
            raise TopologyError("router graph is not a chain")
        self._chain = order
        return order

    def leads_to_service(self, link: Link) -> bool:
        """True when the subtree past this directed link holds >= 1 service."""
        key = link.key
        if key in self._service_ward:
            return self._service_ward[key]
        found = False
        seen = {link.src}
        frontier = deque([link.dst])
        while frontier:
            cur = frontier.popleft()
            if cur in seen:
                continue
            seen.add(cur)
            if self.nodes[cur].kind is NodeKind.SERVICE:
                found = True
                break
            for nxt in self._out[cur]:
                frontier.append(nxt.dst)
        self._service_ward[key] = found
        return found


# -- operations ---------------------------------------------------------------

Route = Tuple[Link, ...]


def route(net: Network, src: NodeId, dst: NodeId) -> Route:
    """Unique shortest path from src to dst as an ordered tuple of links."""
    if src == dst:
        raise TopologyError(f"route requested from node {src} to itself")
    net.node(src)
    net.node(dst)
    cached = net._route_cache.get((src, dst))
    if cached is not None:
        return cached
    prev: Dict[NodeId, Link] = {}
    frontier = deque([src])
    seen = {src}
    while frontier:
        cur = frontier.popleft()
        if cur == dst:
            break
        for link in net.out_links(cur):
            if link.dst not in seen:
                seen.add(link.dst)
                prev[link.dst] = link
                frontier.append(link.dst)
    if dst not in prev:
        raise TopologyError(f"no route from node {src} to node {dst}")
    hops: List[Link] = []
    cur = dst
    while cur != src:
        link = prev[cur]
        hops.append(link)
        cur = link.src
    path = tuple(reversed(hops))
    net._route_cache[(src, dst)] = path
    return path


def split_at_router(net: Network, router: NodeId) -> Tuple[Set[NodeId], Set[NodeId]]:
    """Partition a chain network around one router (excluded, with its leaves)."""
    if net.layout is not Layout.DECENTRALISED:
        raise TopologyError("split_at_router applies to chain layouts only")
    if net.node(router).kind is not NodeKind.ROUTER:
        raise TopologyError(f"node {router} is not a router")
    chain = net.router_chain()
    pos = chain.index(router)

    def side(routers: Sequence[NodeId]) -> Set[NodeId]:
        out: Set[NodeId] = set()
        for r in routers:
            out.add(r)
            out.update(net.attached(r, NodeKind.SERVICE))
            out.update(net.attached(r, NodeKind.CLIENT))
        return out

    return side(chain[:pos]), side(chain[pos + 1:])


def client_count(net: Network, router: NodeId) -> int:
    if net.node(router).kind is not NodeKind.ROUTER:
        raise TopologyError(f"node {router} is not a router")
    return len(net.attached(router, NodeKind.CLIENT))


def service_count(net: Network, router: NodeId) -> int:
    if net.node(router).kind is not NodeKind.ROUTER:
        raise TopologyError(f"node {router} is not a router")
    return len(net.attached(router, NodeKind.SERVICE))


# -- builders -----------------------------------------------------------------

def _leaf_capacity(kind: NodeKind, defaults: QueueDefaults) -> int:
    return defaults.service_sub if kind is NodeKind.SERVICE else defaults.client_sub


def _assemble(layout: Layout,
              router_labels: List[str],
              main_pairs: List[Tuple[int, int]],
              services: Mapping[int, int],
              clients: Mapping[int, int],
              defaults: QueueDefaults,
              capacity_overrides: Optional[Mapping[LinkKey, int]],
              cross_message_size: int) -> Network:
    nodes: List[Node] = [Node(i, NodeKind.ROUTER, label)
                         for i, label in enumerate(router_labels)]
    next_id = len(router_labels)
    leaves: List[Tuple[NodeId, NodeId, NodeKind]] = []  # (leaf, router, kind)
    serial = {NodeKind.SERVICE: 0, NodeKind.CLIENT: 0}
    for kind, prefix, per_router in ((NodeKind.SERVICE, "S", services),
                                     (NodeKind.CLIENT, "C", clients)):
        for r_index in sorted(per_router):
            if r_index >= len(router_labels):
                raise TopologyError(f"no router index {r_index}")
            for _ in range(per_router[r_index]):
                nodes.append(Node(next_id, kind, f"{prefix}{serial[kind]}"))
                leaves.append((next_id, r_index, kind))
                serial[kind] += 1
                next_id += 1

    overrides = dict(capacity_overrides or {})

    def capacity(key: LinkKey, fallback: int) -> int:
        return overrides.get(key, fallback)

    links: List[Link] = []
    for a, b in main_pairs:
        for s, d in ((a, b), (b, a)):
            links.append(Link(s, d, MAIN_BANDWIDTH, LINK_DELAY,
                              capacity((s, d), defaults.main), LinkKind.MAIN))
    for leaf, router, kind in leaves:
        cap = _leaf_capacity(kind, defaults)
        links.append(Link(leaf, router, SUB_BANDWIDTH, LINK_DELAY,
                          capacity((leaf, router), cap), LinkKind.SUB))
        links.append(Link(router, leaf, SUB_BANDWIDTH, LINK_DELAY,
                          capacity((router, leaf), cap), LinkKind.SUB))
    return Network(nodes, links, layout, cross_message_size)


def build_chain_network(routers: int,
                        services: Mapping[int, int],
                        clients: Mapping[int, int],
                        defaults: QueueDefaults = QueueDefaults(),
                        capacity_overrides: Optional[Mapping[LinkKey, int]] = None,
                        cross_message_size: int = 0) -> Network:
    """Chain of `routers` routers with leaves placed by router index."""
    if routers < 1:
        raise TopologyError("need at least one router")
    labels = [f"R{i}" for i in range(routers)]
    mains = [(i, i + 1) for i in range(routers - 1)]
    return _assemble(Layout.DECENTRALISED, labels, mains, services, clients,
                     defaults, capacity_overrides, cross_message_size)


def build_star_network(edge_routers: int,
                       services: Mapping[int, int],
                       clients: Mapping[int, int],
                       defaults: QueueDefaults = QueueDefaults(),
                       capacity_overrides: Optional[Mapping[LinkKey, int]] = None,
                       cross_message_size: int = 0) -> Network:
    """Star: edge routers all linked to one added root (highest router id)."""
    if edge_routers < 1:
        raise TopologyError("need at least one edge router")
    labels = [f"R{i}" for i in range(edge_routers + 1)]  # root is last
    root = edge_routers
    mains = [(i, root) for i in range(edge_routers)]
    return _assemble(Layout.CENTRALISED, labels, mains, services, clients,
                     defaults, capacity_overrides, cross_message_size)


def build_benchmark_network(layout: Layout,
                            clients: int = 6,
                            cross_message_size: int = 100,
                            defaults: QueueDefaults = QueueDefaults(),
                            capacity_overrides: Optional[Mapping[LinkKey, int]] = None,
                            ) -> Network:
    """Reference benchmark network: R0..R3 (+root R4 in the star layout),
    three services on each of R0/R1/R3, all clients on R2."""
    if clients < 1:
        raise TopologyError("need at least one client")
    services = {0: 3, 1: 3, 3: 3}
    client_map = {2: clients}
    if layout is Layout.DECENTRALISED:
        return build_chain_network(4, services, client_map, defaults,
                                   capacity_overrides, cross_message_size)
    if layout is Layout.CENTRALISED:
        return build_star_network(4, services, client_map, defaults,
                                  capacity_overrides, cross_message_size)
    raise TopologyError(f"unknown layout {layout!r}")
