"""Planner/oracle agreement and flight-safety sweep over both bundled cases.

Usage: python scripts/safety_sweep.py [--count 5000] [--seed 0] [--out sweep.json]
"""

import argparse
import json

from loiterlane import load_scenario
from loiterlane.sweep import run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=5000, help="scenarios per case")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None, help="write the combined report as JSON")
    args = ap.parse_args()
    reports = {}
    for name in ("case1", "case2"):
        base = load_scenario(name)
        res = run_sweep(base, args.count, args.seed, max_occupied=base.corridor.n_slots - 1)
        reports[name] = res["report"]
        r = res["report"]
        print(f"{name}: agreement {r['oracle_agreement']}, simulated {r['simulated']}, "
              f"safety violations {r['safety_violations']}, closest pair "
              f"{r['pairwise_min']:.2f} m, hops {r['hop_count_histogram']}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(reports, fh, indent=2)


if __name__ == "__main__":
    main()
