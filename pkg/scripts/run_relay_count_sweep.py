#!/usr/bin/env python3
"""Sweep destination capacity vs relay count (2..10) at fixed first-phase
power, both budget modes, and write the CSV.

Usage: python scripts/run_relay_count_sweep.py --out relay_count_sweep.csv [--seed 0] [--workers 4]
"""

import argparse

from anbeam.experiments import emit_csv, relay_count_sweep_spec, run_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="relay_count_sweep.csv")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n-instances", type=int, default=100)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()

    spec = relay_count_sweep_spec(seed=args.seed, n_instances=args.n_instances)
    rows = run_sweep(spec, workers=args.workers)
    emit_csv(rows, args.out)
    print(f"{len(rows)} rows -> {args.out}")
    for row in rows:
        print(f"  m={row.m:2d} {row.budget_mode:10s}: mean={row.mean_c_d:.4f}")


if __name__ == "__main__":
    main()
