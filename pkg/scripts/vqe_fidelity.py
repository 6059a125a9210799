"""Warm-started VQE over the TLFI plane compared with exact diagonalization."""

import argparse

from vqad.grid import GridSpec
from vqad.hamiltonians import TLFIParams
from vqad.observables import staggered_magnetization
from vqad.oracle import solve_model
from vqad.phasemap import vqe_warm_sweep
from vqad.variational import SPSAConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--L", type=int, default=5)
    ap.add_argument("--boundary", choices=["open", "periodic"], default="open")
    ap.add_argument("--seeds", type=int, nargs="+", default=[0])
    args = ap.parse_args()

    template = TLFIParams(args.L, boundary=args.boundary)
    grid = GridSpec(("g_x", (0.1, 0.6, 1.2, 1.8)), ("g_z", (0.0, 0.5, 1.0)))
    print("seed,g_x,g_z,vqe,exact,rel_error,S")
    for seed in args.seeds:
        sweep = vqe_warm_sweep(template, grid, SPSAConfig(), master_seed=seed)
        for p in grid.points():
            e0 = solve_model(grid.model_at(template, p)).energy
            r = sweep[p]
            print(f"{seed},{p[0]},{p[1]},{r.energy:.5f},{e0:.5f},{abs(r.energy - e0) / abs(e0):.4f},"
                  f"{staggered_magnetization(r.state):+.3f}", flush=True)


if __name__ == "__main__":
    main()
