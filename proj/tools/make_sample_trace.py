#!/usr/bin/env python3
"""Writes a synthetic flow trace in the probe CSV format.

Three DSCP classes share a 10 Gb/s link. Arrivals are Poisson per class and
flow sizes are log-normal, capped at 30 MB. The end time assumes an idle
link, which is all a probe would see for an unloaded flow.
"""

import argparse
import csv
import math
import random

HEADER = ["start_ns", "end_ns", "src", "dst", "sport", "dport", "dscp", "bytes"]


def generate(seed, span_s, loads_gbps, dscp, capacity_gbps=10.0, rtt_us=20.0):
    rng = random.Random(seed)
    median, sigma, cap = 50_000, 2.0, 30_000_000
    mean = min(median * math.exp(sigma * sigma / 2), cap)
    rows = []
    for cls, (load, code) in enumerate(zip(loads_gbps, dscp)):
        rate = load * 1e9 / 8 / mean  # flows per second
        t, port = rng.expovariate(rate), 10000
        while t < span_s:
            size = max(64, min(cap, int(rng.lognormvariate(math.log(median), sigma))))
            start = int(t * 1e9)
            end = start + int(size * 8 / capacity_gbps + rtt_us * 1e3)
            src = 1 + rng.randrange(8)
            dst = 9 + rng.randrange(8)
            rows.append([start, end, src, dst, port, 5000 + cls, code, size])
            port += 1
            t += rng.expovariate(rate)
    rows.sort()
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out")
    ap.add_argument("--seed", type=int, default=20240611)
    ap.add_argument("--span", type=float, default=1.0, help="seconds of arrivals")
    ap.add_argument("--loads", type=float, nargs=3, default=[1.5, 2.0, 2.5], help="Gb/s per class")
    args = ap.parse_args()
    rows = generate(args.seed, args.span, args.loads, [10, 18, 26])
    with open(args.out, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(HEADER)
        w.writerows(rows)


if __name__ == "__main__":
    main()
