"""Noisy syndrome training in the MI phase and the resulting cost contrast between DEBHM phases."""

import argparse

import numpy as np

from vqad.grid import GridSpec
from vqad.hamiltonians import DEBHMParams
from vqad.noise import NoiseModel
from vqad.observables import debhm_phase, ground_truth_row
from vqad.oracle import grid_ground_states
from vqad.phasemap import SyndromeSettings, anomaly_sweep, boundary_points
from vqad.variational import SPSAConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p1", type=float, default=0.001)
    ap.add_argument("--p2", type=float, nargs="+", default=[0.01, 0.07])
    ap.add_argument("--shots", type=int, default=1000)
    ap.add_argument("--restarts", type=int, default=1)
    args = ap.parse_args()

    L = 8
    grid = GridSpec.linspace("dJ", -0.9, 0.9, 9, "V", 0.0, 4.0, 9)
    states = {p: s.state for p, s in grid_ground_states(DEBHMParams(L), grid).items()}
    truth = {p: debhm_phase(ground_truth_row(states[p]), L) for p in grid.points()}
    inner = [p for p in grid.points() if p not in boundary_points(truth, grid)]
    settings = SyndromeSettings(n_trash=2, train_shots=args.shots, eval_shots=args.shots, restarts=args.restarts)
    print("p2,train_cost,MI,TMI,CDW")
    for p2 in args.p2:
        pm = anomaly_sweep(DEBHMParams(L), grid, (-0.675, 0.5), settings=settings,
                           noise=NoiseModel(args.p1, p2), cfg=SPSAConfig(max_iter=500), states=states)
        means = [np.mean([pm.cost[p] for p in inner if truth[p] == ph]) for ph in ("MI", "TMI", "CDW")]
        print(f"{p2},{pm.records[0].converged_cost:.3f}," + ",".join(f"{m:.3f}" for m in means), flush=True)


if __name__ == "__main__":
    main()
