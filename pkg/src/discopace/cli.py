"""Command line front end: plan, simulate, compare, sweep.

Exit codes: 0 on success, 1 for configuration errors, 2 when `compare
--check` finds a threshold failure.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import List, Optional

from . import harness, metrics, planner
from .harness import ConfigError, Scenario
from .planner import MessageSpec
from .protocol import REPLY_SIZE, ProtocolError
from .topology import SUB_BANDWIDTH, TopologyError, build_benchmark_network


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discopace",
        description="Reply-burst pacing planner and discovery-storm simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="print queue sizes and the best interval")
    plan.add_argument("--layout", default="decentralised",
                      help="decentralised|centralised (default: decentralised)")
    plan.add_argument("--clients", type=int, default=6)
    plan.add_argument("--no-overlap", action="store_true",
                      help="ignore spare queue space when shortening the interval")

    sim = sub.add_parser("simulate", help="run one scenario and export CSVs")
    sim.add_argument("--config", help="key=value scenario file")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--out", default="out", help="output directory")

    cmp_ = sub.add_parser("compare",
                          help="run a baseline/paced pair and report")
    cmp_.add_argument("--config", help="key=value scenario file (policy ignored)")
    cmp_.add_argument("--seed", type=int, default=None)
    cmp_.add_argument("--out", default="out", help="output directory")
    cmp_.add_argument("--check", action="store_true",
                      help="exit 2 when a comparison threshold fails")

    swp = sub.add_parser("sweep", help="run the full scenario grid")
    swp.add_argument("--layout", default="both",
                     help="decentralised|centralised|both (default: both)")
    swp.add_argument("--seed", type=int, default=1)
    swp.add_argument("--sim-time", type=float, default=100.0)
    swp.add_argument("--out", default="out", help="output directory")
    return parser


def _load_scenario(path: Optional[str], seed: Optional[int]) -> Scenario:
    scenario = harness.load_config(path) if path else Scenario()
    if seed is not None:
        scenario.seed = seed
    scenario.validate()
    return scenario


def _cmd_plan(args: argparse.Namespace) -> int:
    scenario = Scenario(layout=args.layout, clients=args.clients)
    layout = scenario.layout_enum()
    net = build_benchmark_network(layout, clients=args.clients)
    plan = planner.best_interval(net, MessageSpec(REPLY_SIZE, SUB_BANDWIDTH),
                                 use_overlap=not args.no_overlap)
    candidates = ",".join(net.nodes[r].label for r in plan.candidates.routers)
    print(f"# pacing plan for the {layout.value} layout, "
          f"{args.clients} clients, {len(net.services)} services")
    print(f"bi_seconds={plan.best_interval:.7f}")
    for router in sorted(plan.queue_sizes):
        label = net.nodes[router].label
        print(f"queue_size_{label}={plan.queue_sizes[router]}")
    print(f"candidates={candidates}")
    for router, profile in sorted(plan.per_candidate.items()):
        label = net.nodes[router].label
        print(f"burst_replies_{label}={profile.reply_count}")
        print(f"idle_slots_{label}={profile.idle_slots}")
        print(f"overlap_slots_{label}={profile.overlap_slots}")
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args.config, args.seed)
    bundle = harness.run_scenario(scenario)
    paths = metrics.write_csv_files([bundle], args.out)
    rates = bundle.discovery_rates()
    print(f"scenario {bundle.name}: "
          f"discovery min {bundle.min_discovery():.4f} "
          f"max {bundle.max_discovery():.4f}, "
          f"reply drop rate {bundle.reply_drop_rate():.4f}, "
          f"total drops {bundle.total_drops()}")
    for client in sorted(rates):
        heard, total = bundle.discovery[client]
        print(f"  {client}: {heard}/{total}")
    for path in paths:
        print(f"wrote {path}")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args.config, args.seed)
    report = harness.run_pair(scenario)
    paths = metrics.write_csv_files([report.baseline, report.paced], args.out)
    text = report.to_text()
    print(text)
    os.makedirs(args.out, exist_ok=True)
    report_path = os.path.join(args.out, "report.txt")
    with open(report_path, "w") as fh:
        fh.write(text + "\n")
    for path in paths + [report_path]:
        print(f"wrote {path}")
    if args.check and not report.passed():
        return 2
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    if args.layout == "both":
        layouts = ["decentralised", "centralised"]
    else:
        layouts = [args.layout]
    for layout in layouts:
        Scenario(layout=layout).layout_enum()  # validates the name
    bundles, reports = harness.sweep(layouts, seed=args.seed,
                                     sim_time=args.sim_time)
    paths = metrics.write_csv_files(bundles, args.out)
    for report in reports:
        print(report.to_text())
        print()
    print(f"{len(reports)} scenario pairs")
    for path in paths:
        print(f"wrote {path}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "plan": _cmd_plan,
        "simulate": _cmd_simulate,
        "compare": _cmd_compare,
        "sweep": _cmd_sweep,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, TopologyError, ProtocolError,
            planner.PlannerError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
