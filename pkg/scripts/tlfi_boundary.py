"""Syndrome cost along g_x at g_z = 0, trained deep in the ordered phase."""

import argparse

import numpy as np

from vqad.grid import GridSpec
from vqad.hamiltonians import TLFIParams
from vqad.phasemap import SyndromeSettings, anomaly_sweep, oracle_states
from vqad.variational import SPSAConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--L", type=int, default=8)
    ap.add_argument("--points", type=int, default=20)
    ap.add_argument("--train", type=float, default=0.3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--restarts", type=int, default=4)
    ap.add_argument("--symmetry-break", choices=["+", "-"], default=None)
    args = ap.parse_args()

    grid = GridSpec(("g_x", tuple(np.round(np.linspace(0.1, 2.0, args.points), 12))), ("g_z", (0.0,)))
    states = oracle_states(TLFIParams(args.L), grid, args.symmetry_break, 1e-2 if args.symmetry_break else 0.0)
    pm = anomaly_sweep(
        TLFIParams(args.L), grid, grid.nearest((args.train, 0.0)), settings=SyndromeSettings(restarts=args.restarts),
        cfg=SPSAConfig(max_iter=500), master_seed=args.seed, states=states,
    )
    x = np.array(grid.axis1[1])
    cost = pm.cost_array()[:, 0]
    k = int(np.argmax(np.diff(cost)))
    print("g_x,cost,S")
    for gx, c in zip(x, cost):
        print(f"{gx:.3f},{c:.4f},{pm.S[(gx, 0.0)]:.4f}")
    print(f"# training cost {pm.records[0].converged_cost:.4f}; steepest rise at g_x={(x[k] + x[k + 1]) / 2:.2f}")


if __name__ == "__main__":
    main()
