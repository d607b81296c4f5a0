#!/usr/bin/env python3
"""Sweep two damping rates and write the peak-count / critical-loci map.

Produces a CSV identical in shape to the `phase-diagram` CLI subcommand but
with script-level control of the base model, e.g.

    python3 scripts/phase_diagram_sweep.py --x gamma_m --y gamma_r \
        --n 21 --max 10 --out phase_diagram.csv
"""
import argparse
import csv
from dataclasses import replace

import numpy as np

from twoport_cmt import ModelParams, critical_loci
from twoport_cmt.regimes import count_peaks


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--x", default="gamma_m")
    ap.add_argument("--y", default="gamma_r")
    ap.add_argument("--min", type=float, default=0.0)
    ap.add_argument("--max", type=float, default=10.0)
    ap.add_argument("--n", type=int, default=21)
    ap.add_argument("--omega0", type=float, default=124.5)
    ap.add_argument("--omega-rabi", type=float, default=8.0)
    ap.add_argument("--out", default="phase_diagram.csv")
    args = ap.parse_args()

    base = ModelParams(args.omega0, 3.0, 0.0, 5.0, args.omega_rabi)
    axis = np.linspace(args.min, args.max, args.n)
    loci = critical_loci(base, args.x, axis, args.y, axis)

    with open(args.out, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["x", "y", "n_peaks", "scc_residual", "wcc_residual",
                     "min_abs_detS"])
        for j, yv in enumerate(axis):
            for i, xv in enumerate(axis):
                p = replace(base, **{args.x: float(xv), args.y: float(yv)})
                wr.writerow([f"{xv:.17g}", f"{yv:.17g}", count_peaks(p),
                             f"{loci.scc_residual[j, i]:.17g}",
                             f"{loci.wcc_residual[j, i]:.17g}",
                             f"{loci.min_abs_dets[j, i]:.17g}"])
    n_crit = int(np.sum(loci.min_abs_dets < 1e-6))
    print(f"wrote {args.n * args.n} rows to {args.out}; "
          f"{n_crit} grid points reach |det S| < 1e-6")


if __name__ == "__main__":
    main()
