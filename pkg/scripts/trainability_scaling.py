"""Best syndrome training cost on the ordered TLFI ground state versus chain length."""

import argparse
import time

from vqad.hamiltonians import TLFIParams
from vqad.oracle import solve_model
from vqad.phasemap import train_restarts
from vqad.variational import SPSAConfig, default_trash_sites


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--L", type=int, nargs="+", default=[3, 4, 8, 16])
    ap.add_argument("--g-x", type=float, default=0.3)
    ap.add_argument("--iters", type=int, default=500)
    ap.add_argument("--restarts", type=int, default=2)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--cat", action="store_true", help="use the symmetric ground state instead of a symmetry-broken one")
    args = ap.parse_args()

    print("L,n_trash,cost,seconds")
    for L in args.L:
        t = time.perf_counter()
        p = TLFIParams(L, g_x=args.g_x)
        psi = (solve_model(p) if args.cat else solve_model(p, "+", 1e-2)).state
        trash = default_trash_sites(L)
        rec = train_restarts(psi, trash, SPSAConfig(max_iter=args.iters), args.seed, (args.g_x, 0.0), args.restarts)
        print(f"{L},{len(trash)},{rec.converged_cost:.5f},{time.perf_counter() - t:.1f}", flush=True)


if __name__ == "__main__":
    main()
