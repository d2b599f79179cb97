#!/usr/bin/env python3
"""Check the cross-traffic load levels against their hand-computed values.

The two bidirectional flows send one message every 10 ms in each direction,
so a 512 kb/s main link carries 2 x size x 8 / 0.01 bit/s.  For 100/200/300
byte messages that is 31.25%, 62.5%, and 93.75% of the link.  This script
runs each size with discovery turned off and compares the measured steady
utilization of R1->R2 against those numbers.

Run:  python3 demos/cross_calibration.py
"""
from discopace import Scenario, run_trace, utilization_series


def main() -> None:
    print(f"{'size':>6} {'offered':>9} {'measured':>9}")
    for size in (100, 200, 300):
        scenario = Scenario(cross_size=size, discovery=False, sim_time=20.0)
        trace, _ = run_trace(scenario)
        series = utilization_series(trace, (1, 2), 0.25)
        steady = series[2:78]           # bins fully inside the flow window
        offered = 2 * size * 8 / 0.01 / 512_000.0
        print(f"{size:>5}B {offered:>8.2%} {float(steady.mean()):>8.2%}")


if __name__ == "__main__":
    main()
