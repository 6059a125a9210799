"""How the number of discovered DEBHM phases and their agreement depend on the discovery threshold."""

import argparse

import numpy as np

from vqad.grid import GridSpec
from vqad.hamiltonians import DEBHMParams
from vqad.observables import debhm_phase, ground_truth_row
from vqad.oracle import grid_ground_states
from vqad.phasemap import SyndromeSettings, boundary_points, discover_phases, label_agreement
from vqad.variational import SPSAConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--L", type=int, default=8)
    ap.add_argument("--thresholds", type=float, nargs="+", default=list(np.round(np.arange(0.1, 0.75, 0.05), 2)))
    ap.add_argument("--restarts", type=int, default=4)
    args = ap.parse_args()

    grid = GridSpec.linspace("dJ", -0.9, 0.9, 9, "V", 0.0, 4.0, 9)
    states = {p: s.state for p, s in grid_ground_states(DEBHMParams(args.L), grid).items()}
    truth = {p: debhm_phase(ground_truth_row(states[p]), args.L) for p in grid.points()}
    inner = [p for p in grid.points() if p not in boundary_points(truth, grid)]
    settings = SyndromeSettings(n_trash=2, restarts=args.restarts)
    print("threshold,labels,agreement,rounds")
    for th in args.thresholds:
        pm = discover_phases(DEBHMParams(args.L), grid, (-0.675, 0.5), th, settings=settings,
                             cfg=SPSAConfig(max_iter=500), states=states)
        print(f"{th:.2f},{len(set(pm.labels.values()))},{label_agreement(pm.labels, truth, inner):.3f},"
              f"{len(pm.training_points)}", flush=True)


if __name__ == "__main__":
    main()
