#!/usr/bin/env python3
"""Print the headline-model summary: poles/zeros, peak absorbances, CPA scan.

Usage: python3 scripts/headline_summary.py [--gamma-r X] [--gamma-m X] ...
"""
import argparse

import numpy as np

from twoport_cmt import (
    Background,
    ModelParams,
    find_cpa,
    joint_extrema,
    poles_zeros,
    scattering_matrix,
    single_beam_spectrum,
)
from twoport_cmt.regimes import classify_regime, scc_residual, wcc_residual


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--omega0", type=float, default=124.5)
    ap.add_argument("--gamma-r", type=float, default=3.0)
    ap.add_argument("--gamma-nr", type=float, default=0.0)
    ap.add_argument("--gamma-m", type=float, default=5.0)
    ap.add_argument("--omega-rabi", type=float, default=8.0)
    args = ap.parse_args()

    p = ModelParams(args.omega0, args.gamma_r, args.gamma_nr, args.gamma_m,
                    args.omega_rabi)
    bg = Background()
    pz = poles_zeros(p)
    print(f"model: {p}")
    print("poles:", ", ".join(f"{z:.6f}" for z in sorted(pz.poles, key=lambda z: z.real)))
    print("zeros:", ", ".join(f"{z:.6f}" for z in sorted(pz.zeros, key=lambda z: z.real)))
    print(f"scc residual: {scc_residual(p):+.4f}   wcc residual: {wcc_residual(p):+.4f}")

    rep = classify_regime(p)
    print(f"absorbance peaks ({rep.n_peaks}):",
          ", ".join(f"{w:.4f}" for w in rep.peak_positions))

    grid = np.linspace(p.omega0 - 20.0, p.omega0 + 20.0, 2001)
    t = single_beam_spectrum(p, bg, grid)
    i = int(np.nanargmax(t.A1))
    print(f"max single-beam A1 = {t.A1[i]:.4f} at {grid[i]:.3f} meV")
    ext = joint_extrema(scattering_matrix(p, bg, grid[i]))
    print(f"joint absorbance there: min {ext.a_min:.2e}  max {ext.a_max:.4f} "
          f"(phi* = {ext.phi_max:+.4f} rad)")

    pts = find_cpa(p)
    for pt in pts:
        tag = "CPA" if pt.dets_min < 1e-6 else "min"
        print(f"|det S| {tag} at {pt.omega:.6f}: {pt.dets_min:.3e} "
              f"(phi* = {pt.phi_star:+.4f})")


if __name__ == "__main__":
    main()
