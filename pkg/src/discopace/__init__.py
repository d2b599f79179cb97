"""discopace: reply-burst pacing for multicast service discovery.

A deterministic store-and-forward network simulator plus the planner that
sizes router queues and spaces service replies so discovery bursts stop
overflowing drop-tail queues.
"""
from .harness import (ComparisonReport, ConfigError, QueueMode, Scenario,
                      compare, load_config, min_zero_drop_spacing,
                      parse_config, run_pair, run_scenario, run_trace, sweep)
from .metrics import (MetricsBundle, discovery_rate, drop_rate,
                      utilization_series, write_csv_files)
from .planner import (BurstProfile, CandidateSet, MessageSpec, PacingPlan,
                      PlannerError, best_interval, burst_profile,
                      candidate_centralised, candidate_interval,
                      candidates_decentralised, message_time,
                      overlapped_space, plan_link_capacities, queue_sizes,
                      reply_pair_link_counts)
from .protocol import (CrossFlow, DiscoverySchedule, ReplyMode, ReplyPolicy,
                       ServiceAgent, benchmark_cross_flows, emit_cross_traffic,
                       emit_msearch, reply_delay)
from .simcore import (MULTICAST, Engine, Packet, PacketKind, SimEvent,
                      SimulationError, Trace, run)
from .topology import (Layout, Link, Network, Node, NodeKind, QueueDefaults,
                       TopologyError, build_benchmark_network,
                       build_chain_network, build_star_network, client_count,
                       route, service_count, split_at_router)

__version__ = "0.1.0"

__all__ = [
    "BurstProfile", "CandidateSet", "ComparisonReport", "ConfigError",
    "CrossFlow", "DiscoverySchedule", "Engine", "Layout", "Link",
    "MessageSpec", "MetricsBundle", "MULTICAST", "Network", "Node",
    "NodeKind", "Packet", "PacketKind", "PacingPlan", "PlannerError",
    "QueueDefaults", "QueueMode", "ReplyMode", "ReplyPolicy", "Scenario",
    "ServiceAgent", "SimEvent", "SimulationError", "Trace", "TopologyError",
    "benchmark_cross_flows", "best_interval", "build_benchmark_network",
    "build_chain_network", "build_star_network", "burst_profile",
    "candidate_centralised", "candidate_interval", "candidates_decentralised",
    "client_count", "compare", "discovery_rate", "drop_rate",
    "emit_cross_traffic", "emit_msearch", "load_config", "message_time",
    "min_zero_drop_spacing", "overlapped_space", "parse_config",
    "plan_link_capacities", "queue_sizes", "reply_delay",
    "reply_pair_link_counts", "route", "run", "run_pair", "run_scenario",
    "run_trace", "service_count", "split_at_router", "sweep",
    "utilization_series", "write_csv_files",
]
