#!/usr/bin/env python3
"""Side-by-side: immediate replies versus planner-paced replies.

Same network, same seed, same cross traffic.  The baseline answers a
discovery request the moment it arrives, so 54 replies fight for the
backbone at once.  The paced run spreads each service's replies by the
planned interval (121.3 ms here), and nearly every reply survives.

Run:  python3 demos/baseline_vs_paced.py [centralised]
"""
import sys

from discopace import Scenario, run_pair


def main() -> None:
    layout = sys.argv[1] if len(sys.argv) > 1 else "decentralised"
    report = run_pair(Scenario(layout=layout, sim_time=20.0))
    print(report.to_text())
    print()
    verdict = "all checks passed" if report.passed() else "a check FAILED"
    print(f"verdict: {verdict}")


if __name__ == "__main__":
    main()
