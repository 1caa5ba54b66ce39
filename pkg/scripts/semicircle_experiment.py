#!/usr/bin/env python3
"""Spectrum campaign over a ladder of primes.

Drives the `spectrum` subcommand once per prime, then reads the JSON
reports back and prints how the moment means and the pooled
Kolmogorov-Smirnov distance move with p.

    python3 scripts/semicircle_experiment.py --ladder 11,31,61 --trials 200
"""

import argparse
import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from srip.cli import main as srip_main  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ladder", default="11,31,61")
    ap.add_argument("--epsilon", type=float, default=0.3)
    ap.add_argument("--kmax", type=int, default=6)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--out-dir", default="results")
    args = ap.parse_args()

    ladder = [int(x) for x in args.ladder.split(",")]
    reports = []
    for p in ladder:
        prefix = os.path.join(args.out_dir, f"h{p}")
        code = srip_main([
            "spectrum", "--kind", "heisenberg", "--p", str(p),
            "--epsilon", str(args.epsilon), "--kmax", str(args.kmax),
            "--trials", str(args.trials), "--seed", str(args.seed),
            "--out-prefix", prefix,
        ])
        if code != 0:
            return code
        with open(f"{prefix}.report.json") as fh:
            reports.append((p, json.load(fh)["report"]))

    print(f"\n{'p':>5} {'n':>4} {'m2':>8} {'m4':>8} {'ks_pooled':>10} {'tail':>6}")
    for p, rep in reports:
        moments = {m["k"]: m["mean"] for m in rep["moments"]}
        print(f"{p:>5} {rep['n']:>4} {moments.get(2, float('nan')):>8.4f} "
              f"{moments.get(4, float('nan')):>8.4f} {rep['ks_pooled']:>10.4f} "
              f"{rep['srip_tails'][0]['frequency']:>6.3f}")
    print(f"reports written under {args.out_dir}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
