#!/usr/bin/env python3
"""One measured baseline run of the six-client chain scenario.

Two cross flows (S0<->S8, S1<->S7, 100-byte messages every 10 ms) load the
backbone from t=0.5 s.  At t=10 s all six clients multicast a discovery
request; all nine services answer every client at once.  The reply burst
overflows the drop-tail queues on the shared links, so some clients never
hear some services.  CSVs land in demos/out/single_run/.

Run:  python3 demos/single_run.py
"""
from discopace import Scenario, run_scenario, write_csv_files

OUT_DIR = "demos/out/single_run"


def main() -> None:
    # The interesting window ends around t=12 s; a 20 s horizon leaves
    # plenty of slack for stragglers while keeping the run fast.
    scenario = Scenario(sim_time=20.0)
    bundle = run_scenario(scenario)

    print(f"scenario: {bundle.name} (seed {bundle.seed})")
    injected, delivered, dropped, inflight = bundle.totals
    print(f"packets: {injected} injected, {delivered} delivered, "
          f"{dropped} dropped, {inflight} still in flight\n")

    print("services heard per client (of 9):")
    for client in sorted(bundle.discovery):
        heard, total = bundle.discovery[client]
        bar = "#" * heard + "." * (total - heard)
        print(f"  {client}: {heard}/{total}  {bar}")

    print("\ndrop rate by phase:")
    for phase, stats in bundle.phases.items():
        print(f"  {phase:8s} sent {stats.sent:4d}  dropped {stats.dropped:3d}"
              f"  rate {stats.rate:.4f}")

    peak = float(bundle.utilization("R1->R2").max())
    print(f"\npeak R1->R2 utilization (250 ms bins): {peak:.1%}")

    for path in write_csv_files([bundle], OUT_DIR):
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
