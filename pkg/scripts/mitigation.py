"""Raw versus readout-mitigated P(00) for a trained syndrome over several sampling seeds."""

import argparse

from vqad.hamiltonians import TLFIParams
from vqad.noise import NoiseModel, build_calibration_matrix, mitigate_counts, noisy_execute
from vqad.oracle import solve_model
from vqad.phasemap import train_restarts
from vqad.variational import SPSAConfig, build_syndrome_circuit


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--flip", type=float, default=0.02)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--shots", type=int, default=1000)
    args = ap.parse_args()

    L, trash = 5, (1, 2)
    psi = solve_model(TLFIParams(L, g_x=0.3, boundary="open"), "+", 1e-2).state
    rec = train_restarts(psi, trash, SPSAConfig(max_iter=300), 0, (0.3, 0.0), 1)
    circuit, _ = build_syndrome_circuit(L, trash)
    noise = NoiseModel.symmetric_readout(args.flip, L)
    print(f"# training cost {rec.converged_cost:.4f}")
    print("seed,raw_P00,mitigated_P00")
    for s in range(args.seeds):
        raw = noisy_execute(psi, circuit, rec.final_params, trash, args.shots, noise, 1000 + s)
        cal = build_calibration_matrix(noise, trash, args.shots, seed=2000 + s, n_qubits=L)
        print(f"{s},{raw.frequencies()[0]:.4f},{mitigate_counts(raw, cal).prob('00'):.4f}")


if __name__ == "__main__":
    main()
