"""Experiment harness: scenario configs, runs, comparisons, sweeps.

A Scenario is a flat bag of knobs (parseable from key=value config files);
run_scenario wires the planner, protocol agents and engine together and
returns a MetricsBundle ready for CSV export.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

from . import metrics, planner, simcore
from .metrics import REPLY_PHASE, REQUEST_PHASE, MetricsBundle, build_bundle
from .planner import MessageSpec, PacingPlan
from .protocol import (REPLY_SIZE, CrossFlow, DiscoverySchedule, ReplyMode,
                       ReplyPolicy, ServiceAgent, emit_cross_traffic,
                       emit_msearch, benchmark_cross_flows)
from .simcore import SimEvent, Trace
from .topology import (DEFAULT_CLIENT_QUEUE, DEFAULT_MAIN_QUEUE,
                       DEFAULT_SERVICE_QUEUE, SUB_BANDWIDTH, Layout, Network,
                       QueueDefaults, build_benchmark_network)


class ConfigError(ValueError):
    """Invalid scenario configuration; the message names the offending key."""


class QueueMode:
    DEFAULT = "default"
    PLANNER = "planner"


_LAYOUTS = {
    "decentralised": Layout.DECENTRALISED,
    "decentralized": Layout.DECENTRALISED,
    "dec": Layout.DECENTRALISED,
    "centralised": Layout.CENTRALISED,
    "centralized": Layout.CENTRALISED,
    "cen": Layout.CENTRALISED,
}

CROSS_SIZES = (100, 200, 300)
CLIENT_COUNTS = (6, 8)


@dataclass
class Scenario:
    """One run's worth of knobs.  Defaults mirror the benchmark setup."""
    layout: str = "decentralised"
    clients: int = 6
    cross_size: int = 100
    policy: str = "baseline"
    queue_mode: str = QueueMode.DEFAULT
    seed: int = 1
    sim_time: float = 100.0
    request_time: float = 10.0
    utilization_bin: float = 0.25
    mx: float = 0.015                      # baseline reply jitter bound
    use_overlap: bool = True
    interval: Optional[float] = None       # override the planned spacing
    cross_interval: float = 0.01
    cross_start: float = 0.5
    cross_stop: Optional[float] = None     # defaults to sim_time
    discovery: bool = True
    main_queue: int = DEFAULT_MAIN_QUEUE
    service_queue: int = DEFAULT_SERVICE_QUEUE
    client_queue: int = DEFAULT_CLIENT_QUEUE
    name: Optional[str] = None

    def layout_enum(self) -> Layout:
        try:
            return _LAYOUTS[self.layout.lower()]
        except KeyError:
            raise ConfigError(
                f"config key 'layout': unknown value {self.layout!r}") from None

    def reply_mode(self) -> ReplyMode:
        try:
            return ReplyMode(self.policy.lower())
        except ValueError:
            raise ConfigError(
                f"config key 'policy': unknown value {self.policy!r}") from None

    def validate(self) -> None:
        self.layout_enum()
        self.reply_mode()
        if self.queue_mode not in (QueueMode.DEFAULT, QueueMode.PLANNER):
            raise ConfigError(
                f"config key 'queue_mode': unknown value {self.queue_mode!r}")
        if self.clients < 1:
            raise ConfigError("config key 'clients': must be >= 1")
        if self.cross_size < 0:
            raise ConfigError("config key 'cross_size': must be >= 0")
        if self.sim_time <= 0:
            raise ConfigError("config key 'sim_time': must be positive")
        if self.discovery and not 0 <= self.request_time < self.sim_time:
            raise ConfigError(
                "config key 'request_time': must lie inside the run")
        if self.utilization_bin <= 0:
            raise ConfigError("config key 'utilization_bin': must be positive")
        if self.mx < 0:
            raise ConfigError("config key 'mx': must be >= 0")
        if self.interval is not None and self.interval < 0:
            raise ConfigError("config key 'interval': must be >= 0")
        if self.cross_interval <= 0:
            raise ConfigError("config key 'cross_interval': must be positive")
        for key in ("main_queue", "service_queue", "client_queue"):
            if getattr(self, key) < 1:
                raise ConfigError(f"config key '{key}': must be >= 1")

    def display_name(self) -> str:
        if self.name:
            return self.name
        short = "dec" if self.layout_enum() is Layout.DECENTRALISED else "cen"
        tag = f"{short}_c{self.clients}_x{self.cross_size}_{self.policy.lower()}"
        if self.queue_mode == QueueMode.PLANNER:
            tag += "_planner"
        return tag


_BOOL_VALUES = {"true": True, "yes": True, "1": True, "on": True,
                "false": False, "no": False, "0": False, "off": False}


def _convert(key: str, raw: str, target_type) -> object:
    try:
        if target_type is bool:
            return _BOOL_VALUES[raw.lower()]
        return target_type(raw)
    except (KeyError, ValueError):
        raise ConfigError(
            f"config key {key!r}: cannot parse value {raw!r}") from None


_FIELD_TYPES = {
    "layout": str, "clients": int, "cross_size": int, "policy": str,
    "queue_mode": str, "seed": int, "sim_time": float, "request_time": float,
    "utilization_bin": float, "mx": float, "use_overlap": bool,
    "cross_interval": float, "cross_start": float, "discovery": bool,
    "main_queue": int, "service_queue": int, "client_queue": int,
    "name": str,
}
_OPTIONAL_FLOATS = {"interval", "cross_stop"}


def parse_config(text: str) -> Scenario:
    """Parse flat key=value lines ('#' starts a comment) into a Scenario."""
    values: Dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected key=value, got {body!r}")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key in _OPTIONAL_FLOATS:
            values[key] = (None if raw.lower() == "none"
                           else _convert(key, raw, float))
        elif key in _FIELD_TYPES:
            values[key] = _convert(key, raw, _FIELD_TYPES[key])
        else:
            raise ConfigError(f"config key {key!r}: unknown key")
    scenario = replace(Scenario(), **values)
    scenario.validate()
    return scenario


def load_config(path: str) -> Scenario:
    with open(path) as fh:
        return parse_config(fh.read())


# -- running ------------------------------------------------------------------

def build_network(scenario: Scenario) -> Tuple[Network, Optional[PacingPlan]]:
    """Network for one run plus its pacing plan when one is needed."""
    defaults = QueueDefaults(main=scenario.main_queue,
                             service_sub=scenario.service_queue,
                             client_sub=scenario.client_queue)
    layout = scenario.layout_enum()
    net = build_benchmark_network(layout, scenario.clients, scenario.cross_size,
                              defaults)
    plan = None
    if (scenario.reply_mode() is ReplyMode.PACED
            or scenario.queue_mode == QueueMode.PLANNER):
        plan = planner.best_interval(
            net, MessageSpec(REPLY_SIZE, SUB_BANDWIDTH), scenario.use_overlap)
    if scenario.queue_mode == QueueMode.PLANNER:
        capacities = planner.plan_link_capacities(net)
        net = build_benchmark_network(layout, scenario.clients,
                                  scenario.cross_size, defaults,
                                  capacity_overrides=capacities)
    return net, plan


def run_trace(scenario: Scenario) -> Tuple[Trace, Optional[PacingPlan]]:
    """Run one scenario and return the raw trace (plus the plan, if any)."""
    scenario.validate()
    net, plan = build_network(scenario)
    rng = random.Random(scenario.seed)
    interval = 0.0
    if scenario.interval is not None:
        interval = scenario.interval
    elif plan is not None:
        interval = plan.best_interval
    policy = ReplyPolicy(mode=scenario.reply_mode(), mx=scenario.mx,
                         interval=interval)
    handlers = {service: ServiceAgent(net, service, policy, rng)
                for service in net.services}
    events: List[SimEvent] = []
    if scenario.discovery:
        schedule = DiscoverySchedule(scenario.request_time, net.clients)
        events.extend(emit_msearch(net, schedule))
    if scenario.cross_size > 0:
        stop = scenario.cross_stop
        if stop is None:
            stop = scenario.sim_time
        for flow in benchmark_cross_flows(net, scenario.cross_size,
                                          scenario.cross_interval,
                                          scenario.cross_start, stop):
            events.extend(emit_cross_traffic(net, flow))
    trace = simcore.run(net, events, scenario.sim_time, seed=scenario.seed,
                        handlers=handlers)
    return trace, plan


def run_scenario(scenario: Scenario) -> MetricsBundle:
    """Run one scenario and measure it."""
    trace, plan = run_trace(scenario)
    return build_bundle(trace,
                        name=scenario.display_name(),
                        layout=scenario.layout_enum().value,
                        clients=scenario.clients,
                        cross_size=scenario.cross_size,
                        policy=scenario.reply_mode().value,
                        queue_mode=scenario.queue_mode,
                        seed=scenario.seed,
                        request_time=scenario.request_time,
                        bin_width=scenario.utilization_bin,
                        plan=plan)


# -- comparison ---------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass
class ComparisonReport:
    baseline: MetricsBundle
    paced: MetricsBundle
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def drop_ratio(self) -> float:
        base = self.baseline.reply_drop_rate()
        paced = self.paced.reply_drop_rate()
        if paced == 0.0:
            return float("inf") if base > 0 else 1.0
        return base / paced

    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_text(self) -> str:
        lines = [
            f"pair: {self.baseline.name} vs {self.paced.name}",
            (f"baseline discovery: min {self.baseline.min_discovery():.4f}"
             f" max {self.baseline.max_discovery():.4f}"),
            (f"paced discovery:    min {self.paced.min_discovery():.4f}"
             f" max {self.paced.max_discovery():.4f}"),
            (f"reply drop rate: baseline {self.baseline.reply_drop_rate():.4f}"
             f" paced {self.paced.reply_drop_rate():.4f}"
             f" ratio {self.drop_ratio:.2f}"),
            (f"total drops: baseline {self.baseline.total_drops()}"
             f" paced {self.paced.total_drops()}"),
        ]
        for check in self.checks:
            status = "PASS" if check.passed else "FAIL"
            lines.append(f"[{status}] {check.name}: {check.detail}")
        return "\n".join(lines)


def _pair_scenarios(base: Scenario) -> Tuple[Scenario, Scenario]:
    baseline = replace(base, policy="baseline", name=None)
    paced = replace(base, policy="paced", name=None)
    return baseline, paced


def run_pair(base: Scenario) -> ComparisonReport:
    """Run the baseline/paced pair for one setup and compare the results."""
    baseline_s, paced_s = _pair_scenarios(base)
    return compare(run_scenario(baseline_s), run_scenario(paced_s))


def compare(baseline: MetricsBundle, paced: MetricsBundle) -> ComparisonReport:
    """Compare two runs that differ only in reply policy (or queue mode)."""
    for attr in ("layout", "clients", "cross_size", "seed"):
        if getattr(baseline, attr) != getattr(paced, attr):
            raise ConfigError(
                f"comparison runs disagree on {attr}: "
                f"{getattr(baseline, attr)!r} vs {getattr(paced, attr)!r}")
    report = ComparisonReport(baseline=baseline, paced=paced)
    report.checks = _threshold_checks(report)
    return report


def _bounds_check(name: str, lo: float, hi: float, value: float) -> CheckResult:
    ok = lo - 1e-9 <= value <= hi + 1e-9
    return CheckResult(name, ok, f"{value:.4f} expected in [{lo:.4f}, {hi:.4f}]")


def _threshold_checks(report: ComparisonReport) -> List[CheckResult]:
    """Acceptance thresholds for the benchmark comparisons, keyed by layout
    and client count."""
    base, paced = report.baseline, report.paced
    checks: List[CheckResult] = []
    ninth = 1.0 / 9.0
    if base.layout == Layout.DECENTRALISED.value:
        paced_lo = 7 * ninth if base.clients <= 6 else 6 * ninth
        checks.append(_bounds_check("paced discovery (all clients)",
                                    paced_lo, 1.0, paced.min_discovery()))
        if base.clients <= 6:
            checks.append(_bounds_check("baseline discovery min",
                                        4 * ninth, 8 * ninth,
                                        base.min_discovery()))
            checks.append(_bounds_check("baseline discovery max",
                                        4 * ninth, 8 * ninth,
                                        base.max_discovery()))
        else:
            checks.append(_bounds_check("baseline discovery min",
                                        0.45 - ninth, 0.45 + ninth,
                                        base.min_discovery()))
        ratio = report.drop_ratio
        checks.append(CheckResult(
            "baseline drop rate > 4x paced",
            ratio > 4.0,
            f"ratio {ratio:.2f} expected > 4"))
    else:
        checks.append(_bounds_check("paced discovery (all clients)",
                                    7 * ninth, 1.0, paced.min_discovery()))
        checks.append(_bounds_check("baseline discovery min",
                                    1 * ninth, 6 * ninth, base.min_discovery()))
        checks.append(_bounds_check("baseline discovery max",
                                    1 * ninth, 6 * ninth, base.max_discovery()))
        fewer = paced.reply_drops < base.reply_drops
        checks.append(CheckResult(
            "paced reply drops < baseline",
            fewer,
            f"paced {paced.reply_drops} vs baseline {base.reply_drops}"))
    checks.append(CheckResult(
        "paced min >= baseline min",
        paced.min_discovery() >= base.min_discovery() - 1e-9,
        f"{paced.min_discovery():.4f} vs {base.min_discovery():.4f}"))
    return checks


# -- sweep --------------------------------------------------------------------

def sweep(layouts: Sequence[str] = ("decentralised", "centralised"),
          seed: int = 1, sim_time: float = 100.0,
          ) -> Tuple[List[MetricsBundle], List[ComparisonReport]]:
    """Cross sizes {100,200,300} x clients {6,8} x layouts, paired runs."""
    bundles: List[MetricsBundle] = []
    reports: List[ComparisonReport] = []
    for layout in layouts:
        for clients in CLIENT_COUNTS:
            for size in CROSS_SIZES:
                base = Scenario(layout=layout, clients=clients,
                                cross_size=size, seed=seed, sim_time=sim_time)
                report = run_pair(base)
                bundles.extend([report.baseline, report.paced])
                reports.append(report)
    return bundles, reports


# -- planner sufficiency search -----------------------------------------------

def reply_drop_count(scenario: Scenario) -> int:
    """Reply packets dropped in one run of the scenario."""
    return run_scenario(scenario).reply_drops


def min_zero_drop_spacing(base: Scenario, hi: Optional[float] = None,
                          tolerance: float = 1e-3) -> float:
    """Smallest per-service reply spacing with zero reply drops.

    Bisects on the paced interval; assumes drops are monotone in the
    spacing (true for drop-tail queues fed by a single burst)."""
    scenario = replace(base, policy="paced", cross_size=0)
    if hi is None:
        _, plan = build_network(scenario)
        assert plan is not None
        hi = plan.best_interval
    lo = 0.0
    if reply_drop_count(replace(scenario, interval=lo)) == 0:
        return lo
    if reply_drop_count(replace(scenario, interval=hi)) != 0:
        raise ConfigError("upper bound spacing still drops replies")
    while hi - lo > tolerance:
        mid = (lo + hi) / 2.0
        if reply_drop_count(replace(scenario, interval=mid)) == 0:
            hi = mid
        else:
            lo = mid
    return hi
