"""Quick self-checks of the core invariants, runnable without pytest (``vqad check``)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonians import DEBHMParams, TLFIParams, build_debhm_spin, build_tlfi
from .noise import NoiseModel, build_calibration_matrix
from .oracle import sector_basis
from .statevector import StateVector, run_circuit, sample_measurements
from .variational import (
    SPSAConfig,
    build_syndrome_circuit,
    cost_from_counts,
    cost_from_expectations,
    spsa_minimize,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _random_state(rng, n) -> StateVector:
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return StateVector(n, v / np.linalg.norm(v))


def check_norm(rng) -> CheckResult:
    worst = 0.0
    for L in (3, 5, 7):
        trash = tuple(sorted(rng.choice(L, size=2, replace=False)))
        circ, _ = build_syndrome_circuit(L, trash)
        out = run_circuit(_random_state(rng, L), circ, rng.uniform(-np.pi, np.pi, circ.n_params))
        worst = max(worst, abs(np.linalg.norm(out.amplitudes) - 1))
    return CheckResult("norm preservation", bool(worst < 1e-10), f"max |norm-1| = {worst:.2e}")


def check_hermitian(rng) -> CheckResult:
    worst = 0.0
    for h in (
        build_tlfi(TLFIParams(5, 1.0, *rng.uniform(0, 2, 2))),
        build_debhm_spin(DEBHMParams(6, 1.0, rng.uniform(-1, 1), rng.uniform(0, 4))),
    ):
        m = h.to_dense()
        worst = max(worst, np.abs(m - m.conj().T).max())
    return CheckResult("hermiticity", bool(worst < 1e-12), f"max |H - H^dag| = {worst:.2e}")


def check_sector(rng) -> CheckResult:
    L = 6
    m = build_debhm_spin(DEBHMParams(L, 1.0, rng.uniform(-1, 1), rng.uniform(0, 4))).to_dense()
    leak = 0.0
    for n in range(L + 1):
        inside = sector_basis(L, n)
        outside = np.setdiff1d(np.arange(2**L), inside)
        leak = max(leak, np.abs(m[np.ix_(outside, inside)]).max(initial=0.0))
    return CheckResult("sector conservation", bool(leak == 0.0), f"max off-sector element = {leak:.2e}")


def check_schedule(rng) -> CheckResult:
    ok = True
    for L in range(3, 11):
        for n_t in range(1, min(L, 5)):
            trash = tuple(sorted(rng.choice(L, size=n_t, replace=False)))
            _, spec = build_syndrome_circuit(L, trash)
            pairs = [p for layer in spec.schedule() for p in layer if p[0] not in trash]
            expected = {(q, t) for q in range(L) if q not in trash for t in trash}
            ok &= len(pairs) == len(expected) and set(pairs) == expected
    return CheckResult("schedule completeness", bool(ok), "every (non-trash, trash) pair exactly once")


def check_spsa_determinism(rng) -> CheckResult:
    target = rng.normal(size=4)

    def cost(x):
        return float(np.sum((x - target) ** 2))

    cfg = SPSAConfig(max_iter=30, seed=int(rng.integers(1 << 31)))
    a = spsa_minimize(cost, np.zeros(4), cfg)
    b = spsa_minimize(cost, np.zeros(4), cfg)
    same = np.array_equal(a.final_params, b.final_params) and a.cost_trace == b.cost_trace
    return CheckResult("SPSA determinism", bool(same), "identical traces for identical seeds")


def check_calibration(rng) -> CheckResult:
    noise = NoiseModel.symmetric_readout(0.05, 4)
    cal = build_calibration_matrix(noise, (1, 2), n_shots=500, seed=int(rng.integers(1 << 31)), n_qubits=4)
    dev = np.abs(cal.matrix.sum(axis=0) - 1).max()
    ok = dev < 1e-12 and (cal.matrix >= 0).all()
    return CheckResult("calibration column-stochastic", bool(ok), f"max |column sum - 1| = {dev:.2e}")


def check_cost_forms(rng) -> CheckResult:
    state = _random_state(rng, 6)
    trash = (2, 3)
    shots = 20000
    exact = cost_from_expectations(state, trash)
    sampled = cost_from_counts(sample_measurements(state, trash, shots, int(rng.integers(1 << 31))))
    tol = 5 * np.sqrt(len(trash) / 4 / shots)
    return CheckResult("cost forms agree", bool(abs(exact - sampled) <= tol), f"|diff| = {abs(exact - sampled):.4f}")


ALL_CHECKS = (
    check_norm,
    check_hermitian,
    check_sector,
    check_schedule,
    check_spsa_determinism,
    check_calibration,
    check_cost_forms,
)


def run_checks(seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [check(rng) for check in ALL_CHECKS]


__all__ = ["CheckResult", "run_checks", "ALL_CHECKS"]
