#!/usr/bin/env python3
"""Requirement trade-study maps: FDE heat-map grid and required-K contours.

Writes the 95% fix-displacement grid over (N, K) at a fixed Tc, plus the
required-K-versus-N contour for several drift time constants, all against the
10 nmi / 10 h / 900 km/h target.  The CSVs feed any external contour plotter.
"""

import argparse
import pathlib

import numpy as np

from gyrofde.tradestudy import (RequirementTarget, fde_grid, grid_to_csv,
                                solve_K_contour)
from gyrofde.units import DEG


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=60, help="grid points per axis")
    ap.add_argument("--tc", type=float, nargs="+", default=[0.1, 1.0, 10.0],
                    help="drift time constants, h")
    ap.add_argument("--out", default="outputs/tradestudy")
    args = ap.parse_args()

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    target = RequirementTarget()

    N = np.geomspace(1e-4, 1e-1, args.points) * DEG
    K = np.geomspace(1e-3, 1e-1, args.points) * DEG
    grid = fde_grid(N, K, 1.0, target)
    grid_to_csv(out / "fde_grid_tc1h.csv", N, K, grid)
    print(f"grid: {args.points}x{args.points} at Tc=1 h -> fde_grid_tc1h.csv")

    for tc in args.tc:
        cont = solve_K_contour(N, tc, target)
        name = f"required_K_tc{tc:g}h.csv"
        cont.to_csv(out / name)
        feasible = cont.K_values[cont.feasible]
        if len(feasible):
            print(f"Tc={tc:g} h: plateau K ~ {feasible[0] / DEG:.3e} deg/h^1.5, "
                  f"feasible for {cont.feasible.sum()}/{len(N)} noise points "
                  f"-> {name}")
        else:
            print(f"Tc={tc:g} h: infeasible everywhere -> {name}")


if __name__ == "__main__":
    main()
