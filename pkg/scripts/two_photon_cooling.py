"""Two-photon cooling: temperature versus two-photon detuning with the intermediate level far off resonance."""
import argparse
from pathlib import Path

import numpy as np

from cascadecool import LaserConfig, capture_range, load_species
from cascadecool.scan import cooling_curve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--species", default="Mg")
    ap.add_argument("--delta1", type=float, default=-40.0, help="in gamma1")
    ap.add_argument("--omega2", type=float, default=50.0, help="in gamma2")
    ap.add_argument("--points", type=int, default=321)
    ap.add_argument("--out", default="results/two_photon.csv")
    args = ap.parse_args()

    sp = load_species(args.species)
    fixed = LaserConfig.in_linewidths(sp, 0.01, args.omega2, args.delta1)
    x = np.linspace(-4, 4, args.points)
    c = cooling_curve(sp, fixed, "two_photon", x * sp.gamma2)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(args.out, np.column_stack([x, c["alpha"], c["temperature"]]), delimiter=",",
               header="two_photon_over_G2,alpha_per_s,T_kelvin", comments="")
    i = int(np.nanargmin(c["temperature"]))
    t = c["temperature"][i]
    best = LaserConfig(fixed.omega_rabi1, fixed.omega_rabi2, fixed.delta1, x[i] * sp.gamma2 - fixed.delta1)
    cr = capture_range(sp, best)
    print(f"min T {t * 1e6:.1f} uK at two-photon detuning {x[i]:+.3f} G2 "
          f"= {t / sp.doppler_limit2:.2f} T_D2 = T_D1/{sp.doppler_limit1 / t:.1f}")
    print(f"capture range {cr.velocity:.3f} m/s = {cr.velocity * sp.k2 / sp.gamma2:.3f} G2/k2")


if __name__ == "__main__":
    main()
