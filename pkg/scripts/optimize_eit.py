"""Grid search for the lowest temperature over the mixing-laser detuning and strength."""
import argparse
from pathlib import Path

from cascadecool.scan import load_optimize_spec, optimize_summary, run_optimize

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "optimize_eit.cfg"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("config", nargs="?", default=str(CONFIG))
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--frontier", default="results/optimize_frontier.csv")
    args = ap.parse_args()

    result = run_optimize(load_optimize_spec(args.config), threads=args.threads)
    Path(args.frontier).parent.mkdir(parents=True, exist_ok=True)
    Path(args.frontier).write_text(result.frontier)
    print(optimize_summary(result), end="")
    if result.found:
        sp = result.best.species
        print(f"T_D1 / T = {sp.doppler_limit1 / result.best.temperature:.2f}")


if __name__ == "__main__":
    main()
