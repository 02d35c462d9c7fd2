#!/usr/bin/env python3
"""Monte-Carlo validation of the closed-form error curves.

Runs groups of simulated flights for the navigation-grade benchmark gyro
(N = 0.005 deg/sqrt(h), K = 0.01 deg/h^1.5, Tc = 1 h), compares the per-group
standard deviations against the analytic along-track/cross-track curves, and
writes the ensemble CSV, the comparison JSON, and the analytic budget CSV.
"""

import argparse
import pathlib

import numpy as np

from gyrofde.budget import FlightProfile, budget_series_to_csv
from gyrofde.gyro import GyroErrorModel
from gyrofde.montecarlo import compare_to_analytic, run_ensemble


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--groups", type=int, default=10)
    ap.add_argument("--flights", type=int, default=100)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--out", default="outputs/validation")
    args = ap.parse_args()

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    model = GyroErrorModel.from_deg(0.005, ((0.01, 1.0),))
    profile = FlightProfile()  # 900 km/h for 10 h, 1 s steps

    stats = run_ensemble(model, profile, args.flights, args.groups,
                         master_seed=args.seed, stat_stride=900,
                         n_workers=args.workers)
    rep = compare_to_analytic(stats, model, profile)

    stats.to_csv(out / "ensemble.csv")
    rep.to_json(out / "comparison.json")
    budget_series_to_csv(out / "analytic_budget.csv", model, profile,
                         np.linspace(0.0, profile.duration, 201))

    print(f"{args.groups} groups x {args.flights} flights, seed {args.seed}")
    print("time_h  coverage_atrk  coverage_xtrk  pooled_dev_atrk  pooled_dev_xtrk")
    for t in (2.5, 5.0, 10.0):
        print(f"{t:6.1f}  {rep.coverage_at(t, 'ATRK'):13.2f}"
              f"  {rep.coverage_at(t, 'XTRK'):13.2f}"
              f"  {rep.pooled_rel_dev_at(t, 'ATRK'):+15.4f}"
              f"  {rep.pooled_rel_dev_at(t, 'XTRK'):+15.4f}")
    print(f"wrote {out}/ensemble.csv, comparison.json, analytic_budget.csv")


if __name__ == "__main__":
    main()
