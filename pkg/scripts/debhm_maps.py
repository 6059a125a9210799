"""Ground-truth observables and three trained syndrome maps on the DEBHM (dJ, V) grid."""

import argparse

import numpy as np

from vqad.grid import GridSpec
from vqad.hamiltonians import DEBHMParams
from vqad.observables import debhm_phase, ground_truth_row
from vqad.oracle import grid_ground_states
from vqad.phasemap import SyndromeSettings, anomaly_sweep, boundary_points, discover_phases, label_agreement
from vqad.variational import SPSAConfig

TRAIN = {"MI": (-0.675, 0.5), "CDW": (0.0, 4.0), "TMI": (0.675, 0.5)}


def show(title, arr):
    print(f"\n{title} (rows dJ ascending, columns V ascending)")
    print(np.array2string(np.asarray(arr), precision=3, suppress_small=True, max_line_width=160))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--L", type=int, default=8)
    ap.add_argument("--n", type=int, default=9, help="points per axis")
    ap.add_argument("--n-trash", type=int, default=2)
    ap.add_argument("--restarts", type=int, default=4)
    ap.add_argument("--threshold", type=float, default=None, help="discovery threshold (default 0.3 * n_trash)")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    grid = GridSpec.linspace("dJ", -0.9, 0.9, args.n, "V", 0.0, 4.0, args.n)
    sols = grid_ground_states(DEBHMParams(args.L), grid)
    states = {p: s.state for p, s in sols.items()}
    rows = {p: ground_truth_row(states[p]) for p in grid.points()}
    truth = {p: debhm_phase(rows[p], args.L) for p in grid.points()}
    inner = [p for p in grid.points() if p not in boundary_points(truth, grid)]

    def arr(f):
        return [[f((a, b)) for b in grid.axis2[1]] for a in grid.axis1[1]]

    show("|O_CDW|", arr(lambda p: abs(rows[p]["O_CDW"])))
    show("D_ES", arr(lambda p: rows[p]["D_ES"]))
    print("\nreference partition")
    for line in arr(lambda p: truth[p]):
        print(" ".join(f"{x:>3}" for x in line))

    settings = SyndromeSettings(n_trash=args.n_trash, restarts=args.restarts)
    for phase, point in TRAIN.items():
        pm = anomaly_sweep(DEBHMParams(args.L), grid, point, settings=settings, cfg=SPSAConfig(max_iter=500),
                           master_seed=args.seed, states=states)
        inside = np.mean([pm.cost[p] for p in inner if truth[p] == phase])
        outside = np.mean([pm.cost[p] for p in inner if truth[p] != phase])
        show(f"cost trained in {phase} (training cost {pm.records[0].converged_cost:.3f}, "
             f"in-phase {inside:.3f}, out-of-phase {outside:.3f})", pm.cost_array())

    found = discover_phases(DEBHMParams(args.L), grid, TRAIN["MI"], args.threshold, settings=settings,
                            cfg=SPSAConfig(max_iter=500), master_seed=args.seed, states=states)
    print(f"\ndiscovered labels ({len(set(found.labels.values()))} phases, "
          f"agreement {label_agreement(found.labels, truth, inner):.3f} on interior points)")
    print(found.label_array())


if __name__ == "__main__":
    main()
