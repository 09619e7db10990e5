"""Truncation convergence: tracked populations for growing Fock cutoffs,
compared kick by kick against the largest cutoff."""

import argparse

import numpy as np

from kerrnqs.diagnostics import simulate
from kerrnqs.scenario import parse_config


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--preset", default="fig1", choices=["fig1", "fig3"])
    parser.add_argument("--dims", type=int, nargs="+", default=[4, 6, 8, 10, 12, 14, 18])
    parser.add_argument("--n-kicks", type=int, default=1000)
    args = parser.parse_args()

    scenario = parse_config(preset=args.preset, overrides={"n_kicks": str(args.n_kicks)})
    runs = {}
    for dim in sorted(args.dims):
        cfg = scenario.cfg.replace(dim_a=dim, dim_b=dim)
        runs[dim] = simulate(cfg, tracked=scenario.tracked).tracked_probabilities()
    reference = runs[max(runs)]
    print(f"{'dim':>4}  max |dP| vs dim={max(runs)}")
    for dim, probs in runs.items():
        print(f"{dim:>4}  {np.max(np.abs(probs - reference)):.3e}")


if __name__ == "__main__":
    main()
