"""Event engine: serialization timing, drop-tail queues, multicast fanout."""
from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discopace.simcore import (
    DELIVERED,
    DROPPED,
    ENQUEUE,
    INFLIGHT,
    MULTICAST,
    Engine,
    Packet,
    PacketKind,
    SimEvent,
    SimulationError,
    run,
)
from discopace.topology import (
    Layout,
    NodeKind,
    build_chain_network,
    build_benchmark_network,
    route,
)


def two_router_net(**overrides):
    """R0 -- R1 with a service on R0 and a client on R1."""
    return build_chain_network(2, services={0: 1}, clients={1: 1}, **overrides)


def routed_packet(net, src, dst, size=128, at=0.0, kind=PacketKind.REPLY):
    hops = tuple(l.key for l in route(net, src, dst))
    return Packet(kind=kind, size=size, src=src, dst=dst, created_at=at,
                  route=hops)


def inject_events(net, packets):
    return [SimEvent(p.created_at, ENQUEUE, link=p.route[0], packet=p)
            for p in packets]


# -- basic runs ---------------------------------------------------------------

def test_empty_run_is_empty():
    trace = run(two_router_net(), [], end_time=1.0)
    assert trace.injected_count() == 0
    assert not trace.transmissions and not trace.drops and not trace.deliveries


def test_single_packet_serialization_time():
    net = two_router_net()
    service, client = net.services[0], net.clients[0]
    p = routed_packet(net, service, client, size=128, at=0.5)
    trace = run(net, inject_events(net, [p]), end_time=2.0)
    record = trace.records[p.id]
    assert record.status == DELIVERED
    assert record.delivered_to == client
    # 3 hops: two subs at 0.004 each plus one main at 0.002.
    assert record.terminal_time == pytest.approx(0.5 + 0.004 + 0.002 + 0.004)


def test_transmit_occupancy_times():
    net = two_router_net()
    p64 = routed_packet(net, 0, 1, size=64, at=0.0)
    trace = run(net, inject_events(net, [p64]), end_time=1.0)
    (key, start, end, bits) = trace.transmissions[0]
    assert key == (0, 1)
    assert end - start == pytest.approx(64 * 8 / 512_000.0)  # 0.001 s
    assert bits == 64 * 8

    net = two_router_net()
    p300 = routed_packet(net, 0, 1, size=300, at=0.0, kind=PacketKind.CROSS)
    trace = run(net, inject_events(net, [p300]), end_time=1.0)
    (_, start, end, _) = trace.transmissions[0]
    assert end - start == pytest.approx(0.0046875)


def test_back_to_back_transmissions_are_work_conserving():
    net = two_router_net()
    packets = [routed_packet(net, 0, 1, at=0.0) for _ in range(4)]
    trace = run(net, inject_events(net, packets), end_time=1.0)
    spans = sorted((s, e) for key, s, e, _ in trace.transmissions
                   if key == (0, 1))
    for (_, prev_end), (next_start, _) in zip(spans, spans[1:]):
        assert next_start == pytest.approx(prev_end)


def test_fifo_delivery_order():
    net = two_router_net()
    packets = [routed_packet(net, 0, 1, at=0.001 * i) for i in range(5)]
    trace = run(net, inject_events(net, packets), end_time=1.0)
    order = [pid for _, node, pid in trace.deliveries if node == 1]
    assert order == [p.id for p in packets]


# -- drop tail ----------------------------------------------------------------

def test_drop_tail_capacity_one():
    net = two_router_net(capacity_overrides={(0, 1): 1})
    first = routed_packet(net, 0, 1, at=0.0)
    second = routed_packet(net, 0, 1, at=0.0005)
    third = routed_packet(net, 0, 1, at=0.0005)
    trace = run(net, inject_events(net, [first, second, third]), end_time=1.0)
    assert trace.records[first.id].status == DELIVERED
    assert trace.records[second.id].status == DELIVERED   # took the free slot
    assert trace.records[third.id].status == DROPPED
    assert trace.records[third.id].drop_link == (0, 1)
    assert trace.drops == [(0.0005, (0, 1), third.id)]


def test_capacity_covers_full_burst():
    # 54 simultaneous replies into a 54-slot queue: one serves, 53 wait.
    net = two_router_net(capacity_overrides={(0, 1): 54})
    packets = [routed_packet(net, 0, 1, at=0.0) for _ in range(54)]
    trace = run(net, inject_events(net, packets), end_time=5.0)
    assert trace.count_by_status(DROPPED) == 0
    assert trace.count_by_status(DELIVERED) == 54


def test_pending_never_exceeds_capacity():
    cap = 3
    net = two_router_net(capacity_overrides={(0, 1): cap})
    packets = [routed_packet(net, 0, 1, at=0.0) for _ in range(10)]
    trace = run(net, inject_events(net, packets), end_time=5.0)
    # One in service plus `cap` pending can survive; the rest must drop.
    assert trace.count_by_status(DELIVERED) == cap + 1
    assert trace.count_by_status(DROPPED) == 10 - (cap + 1)


# -- multicast fanout ---------------------------------------------------------

def test_multicast_reaches_every_service_once():
    net = build_benchmark_network(Layout.DECENTRALISED)
    c0 = net.id_of("C0")
    request = Packet(kind=PacketKind.MSEARCH, size=64, src=c0, dst=MULTICAST,
                     created_at=0.0)
    events = [SimEvent(0.0, ENQUEUE, link=(c0, 2), packet=request)]
    trace = run(net, events, end_time=2.0)
    assert trace.service_delivery_count() == 9
    # Exactly one copy per service.
    seen = [node for _, node, pid in trace.deliveries
            if net.nodes[node].kind is NodeKind.SERVICE]
    assert sorted(seen) == sorted(net.services)


def test_multicast_never_reaches_other_clients():
    net = build_benchmark_network(Layout.DECENTRALISED)
    c0 = net.id_of("C0")
    request = Packet(kind=PacketKind.MSEARCH, size=64, src=c0, dst=MULTICAST,
                     created_at=0.0)
    events = [SimEvent(0.0, ENQUEUE, link=(c0, 2), packet=request)]
    trace = run(net, events, end_time=2.0)
    client_hits = [node for _, node, pid in trace.deliveries
                   if net.nodes[node].kind is NodeKind.CLIENT]
    assert client_hits == []


def test_two_multicasts_are_linear():
    net = build_benchmark_network(Layout.DECENTRALISED)
    events = []
    for label in ("C0", "C1"):
        c = net.id_of(label)
        p = Packet(kind=PacketKind.MSEARCH, size=64, src=c, dst=MULTICAST,
                   created_at=0.0)
        events.append(SimEvent(0.0, ENQUEUE, link=(c, 2), packet=p))
    trace = run(net, events, end_time=2.0)
    assert trace.service_delivery_count() == 18


def test_multicast_conservation_with_copies():
    net = build_benchmark_network(Layout.CENTRALISED)
    c0 = net.id_of("C0")
    request = Packet(kind=PacketKind.MSEARCH, size=64, src=c0, dst=MULTICAST,
                     created_at=0.0)
    events = [SimEvent(0.0, ENQUEUE, link=(c0, 2), packet=request)]
    trace = run(net, events, end_time=2.0)
    total = trace.injected_count()
    done = trace.count_by_status(DELIVERED) + trace.count_by_status(DROPPED)
    assert total == done  # everything settled well before end_time


# -- scheduling ---------------------------------------------------------------

def test_past_event_is_an_error():
    net = two_router_net()
    engine = Engine(net)
    engine.now = 5.0
    with pytest.raises(SimulationError):
        engine.schedule(SimEvent(1.0, ENQUEUE, link=(0, 1),
                                 packet=routed_packet(net, 0, 1)))


def test_inject_requires_route():
    net = two_router_net()
    engine = Engine(net)
    bare = Packet(kind=PacketKind.REPLY, size=128, src=0, dst=1,
                  created_at=0.0)
    with pytest.raises(SimulationError):
        engine.inject(bare, 0.0)


def test_identical_runs_produce_identical_traces():
    def one_run():
        net = build_benchmark_network(Layout.DECENTRALISED)
        packets = [routed_packet(net, s, c, at=0.01 * i)
                   for i, (s, c) in enumerate(zip(net.services, net.clients * 2))]
        return run(net, inject_events(net, packets), end_time=3.0, seed=7)

    a, b = one_run(), one_run()
    assert a.transmissions == b.transmissions
    assert a.drops == b.drops
    assert a.deliveries == b.deliveries


# -- conservation property ----------------------------------------------------

batch = st.lists(
    st.tuples(st.integers(min_value=0, max_value=8),    # service index
              st.integers(min_value=0, max_value=5),    # client index
              st.floats(min_value=0.0, max_value=0.05)),
    min_size=1, max_size=40)


@settings(max_examples=25, deadline=None)
@given(batch)
def test_conservation_property(entries):
    net = build_benchmark_network(Layout.DECENTRALISED)
    packets = [routed_packet(net, net.services[s], net.clients[c], at=t)
               for s, c, t in entries]
    trace = run(net, inject_events(net, packets), end_time=0.06)
    settled = (trace.count_by_status(DELIVERED)
               + trace.count_by_status(DROPPED)
               + trace.count_by_status(INFLIGHT))
    assert trace.injected_count() == settled
    # Terminal records carry a terminal time inside the run.
    for record in trace.records.values():
        if record.status != INFLIGHT:
            assert record.terminal_time is not None
            assert 0.0 <= record.terminal_time <= 0.06
