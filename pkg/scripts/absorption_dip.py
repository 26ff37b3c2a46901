"""Absorption at rest versus probe detuning for both signs of the mixing-laser detuning.

Writes results/absorption_dip.csv with columns delta1/G1, R1 (delta2 = -20 G2), R1 (delta2 = +20 G2)
and prints the position of each transparency dip.
"""
import argparse
from pathlib import Path

import numpy as np
from scipy.signal import argrelmin

from cascadecool import LaserConfig, absorption_spectrum, load_species


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--species", default="Mg")
    ap.add_argument("--points", type=int, default=1201)
    ap.add_argument("--out", default="results/absorption_dip.csv")
    args = ap.parse_args()

    sp = load_species(args.species)
    x = np.linspace(-1.5, 1.5, args.points)
    cols = [x]
    for d2 in (-20.0, 20.0):
        r1 = absorption_spectrum(sp, LaserConfig.in_linewidths(sp, 0.01, 10.0, 0.0, d2), x * sp.gamma1).r1
        cols.append(r1)
        print(f"delta2 = {d2:+.0f} G2: dip at delta1 = {x[argrelmin(r1)[0]]} G1")
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(args.out, np.column_stack(cols), delimiter=",",
               header="delta1_over_G1,R1_delta2_minus20G2,R1_delta2_plus20G2", comments="")


if __name__ == "__main__":
    main()
