#!/usr/bin/env python3
"""Walk through the reply-pacing arithmetic for the six-client chain.

Every number the planner produces can be checked by hand.  This script
prints the reasoning next to the planner's answers:

  1. count the reply paths crossing each link (9 services x 6 clients),
  2. size each router's egress queues for a simultaneous worst-case burst,
  3. time one reply hop by hop to get the drain and idle-slot terms,
  4. shorten the interval by the queue space the burst leaves spare,
  5. keep the largest interval over the client-facing candidate routers.

Run:  python3 demos/pacing_math.py
"""
from discopace import (
    Layout,
    MessageSpec,
    best_interval,
    build_benchmark_network,
    burst_profile,
    message_time,
    queue_sizes,
    reply_pair_link_counts,
)
from discopace.protocol import REPLY_SIZE
from discopace.topology import MAIN_BANDWIDTH, SUB_BANDWIDTH


def main() -> None:
    net = build_benchmark_network(Layout.DECENTRALISED)
    reply = MessageSpec(REPLY_SIZE, SUB_BANDWIDTH)

    print("network: chain R0-R1-R2-R3, 3 services each on R0/R1/R3,")
    print("         6 clients on R2; mains 512 kb/s, subs 256 kb/s\n")

    # 1. Reply paths per link.  Each of the 9 services answers each of the
    # 6 clients once, so a link carries (services behind it) x 6 replies.
    counts = reply_pair_link_counts(net)
    print("replies crossing each backbone link (toward the clients):")
    for key in ((0, 1), (1, 2), (3, 2)):
        print(f"  {net.link_label(key):8s} {counts[key]:3d}")

    # 2. Queue sizes: each router must hold every reply that can be queued
    # on its egress links at once.
    sizes = queue_sizes(net)
    print("\nrouter queue sizes for a lossless worst-case burst:")
    for router in net.router_chain():
        label = net.nodes[router].label
        print(f"  {label}: {sizes[router]}")

    # 3. One reply is 1024 bits.  A sub hop takes 4 ms, a main hop 2 ms;
    # the planner pads idle pipeline slots with the average over the two
    # link classes (1024 bits at 384 kb/s).
    t_sub = message_time(reply)
    t_main = message_time(MessageSpec(REPLY_SIZE, MAIN_BANDWIDTH))
    t_avg = REPLY_SIZE * 8 / ((SUB_BANDWIDTH + MAIN_BANDWIDTH) / 2.0)
    print(f"\nserialization: sub {t_sub * 1e3:.1f} ms, "
          f"main {t_main * 1e3:.1f} ms, class average {t_avg * 1e3:.4f} ms")

    # The interval must let R2 drain a full 54-reply burst, padded by one
    # average slot per idle pipeline stage, minus the reply in flight.
    profile = burst_profile(net, 2, reply)
    plain = (profile.reply_count * profile.max_message_time
             + profile.idle_slots * profile.avg_message_time
             - profile.max_message_time)
    print(f"\nburst at R2: {profile.reply_count} replies, "
          f"{profile.idle_slots} idle slots, {profile.overlap_slots} spare"
          f" queue slots behind it")
    print(f"plain interval: 54 x {profile.max_message_time * 1e3:.0f} ms"
          f" + {profile.idle_slots} x {profile.avg_message_time * 1e3:.4f} ms"
          f" - {profile.max_message_time * 1e3:.0f} ms = {plain:.7f} s")

    # 4./5. The planner agrees, and overlapping the next sub-burst into the
    # spare queue space shortens the spacing by 36 average slots.
    for use_overlap in (False, True):
        plan = best_interval(net, reply, use_overlap=use_overlap)
        tag = "overlap" if use_overlap else "plain  "
        routers = ",".join(net.nodes[r].label for r in plan.candidates.routers)
        print(f"planner {tag}: {plan.best_interval:.7f} s"
              f"  (candidate routers: {routers})")


if __name__ == "__main__":
    main()
