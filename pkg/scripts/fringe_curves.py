#!/usr/bin/env python3
"""Noiseless conditional fringe curves for the full dephasing grid.

Writes one plot-ready table per fixed signal position (x = 0 and the
anti-fringe point): first column the scanned idler position, then one
column of normalized intensity per dephasing parameter.
"""
import argparse

import numpy as np

from slitsim.experiment import SlitStatePrep, anti_correlated_block, prepare_state
from slitsim.optics import OpticalGeometry, pattern_intensity, x_pi
from slitsim.reports import P_GRID


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--half-span-mm", type=float, default=0.9)
    parser.add_argument("--points", type=int, default=361)
    parser.add_argument("--prefix", default="fringe")
    args = parser.parse_args()

    geom = OpticalGeometry()
    rho0 = anti_correlated_block(prepare_state(SlitStatePrep.uniform(4)))
    xs = np.linspace(-args.half_span_mm, args.half_span_mm, args.points)

    for label, x_fixed in (("x0", 0.0), ("xpi", x_pi(geom))):
        curves = [pattern_intensity(geom, rho0, p, xs, x_fixed) for p in P_GRID]
        top = max(c.max() for c in curves)
        header = "position_mm " + " ".join(f"p{p:.3f}" for p in P_GRID)
        rows = [header]
        for i, x in enumerate(xs):
            rows.append(f"{x:.6f} " + " ".join(f"{c[i] / top:.6f}" for c in curves))
        path = f"{args.prefix}_{label}.txt"
        with open(path, "w") as fh:
            fh.write("\n".join(rows) + "\n")
        print(f"wrote {path} (fixed signal detector at {x_fixed:.4f} mm)")


if __name__ == "__main__":
    main()
