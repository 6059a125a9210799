"""VQE ansatz, anomaly-syndrome circuit, Hamming-distance cost and SPSA training."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .hamiltonians import PauliHamiltonian
from .statevector import (
    ParamCircuit,
    ShotHistogram,
    StateVector,
    check_qubits,
    cz,
    ry,
    run_circuit,
    sample_measurements,
)

log = logging.getLogger(__name__)


# --------------------------------------------------------------------------
# circuits


def build_vqe_ansatz(L: int) -> ParamCircuit:
    """RY layer, CZ ring, RY layer: ``2L`` parameters."""
    if L < 2:
        raise ValueError("VQE ansatz needs L >= 2")
    gates = [ry(q, param=q) for q in range(L)]
    ring = [(q, (q + 1) % L) for q in range(L)]
    seen = set()
    for a, b in ring:
        key = frozenset((a, b))
        if key not in seen:
            seen.add(key)
            gates.append(cz(a, b))
    gates += [ry(q, param=L + q) for q in range(L)]
    return ParamCircuit(L, gates, 2 * L)


def default_trash_count(L: int) -> int:
    """``floor(log2 L)``."""
    if L < 2:
        raise ValueError("need L >= 2")
    return L.bit_length() - 1


def default_trash_sites(L: int, n_trash: int | None = None) -> tuple[int, ...]:
    """Contiguous block of trash qubits in the middle of the chain."""
    n_trash = default_trash_count(L) if n_trash is None else n_trash
    if not 1 <= n_trash < L:
        raise ValueError(f"need 1 <= n_trash < L, got n_trash={n_trash}, L={L}")
    start = (L - n_trash + 1) // 2
    return tuple(range(start, start + n_trash))


@dataclass(frozen=True)
class SyndromeSpec:
    L: int
    trash: tuple[int, ...]
    n_layers: int
    cross_pairs: tuple[tuple[tuple[int, int], ...], ...]
    trash_pairs: tuple[tuple[int, int], ...]

    @property
    def n_params(self) -> int:
        return self.n_layers * self.L + len(self.trash)

    def schedule(self) -> list[list[tuple[int, int]]]:
        """Per-layer CZ pairs: (non-trash, trash) pairs followed by the trash chain."""
        return [list(layer) + list(self.trash_pairs) for layer in self.cross_pairs]


def build_syndrome_circuit(L: int, trash: Sequence[int]) -> tuple[ParamCircuit, SyndromeSpec]:
    """Layered RY/CZ circuit coupling every non-trash qubit to every trash qubit once.

    In layer ``l`` the ``k``-th non-trash qubit is paired with ``trash[(k + l) % n_t]``;
    consecutive trash qubits are joined by a CZ chain in every layer and a final
    RY acts on each trash qubit.
    """
    trash = check_qubits(trash, L)
    n_t = len(trash)
    if not 1 <= n_t < L:
        raise ValueError(f"need 1 <= n_trash < L, got {n_t}")
    others = [q for q in range(L) if q not in trash]
    trash_pairs = tuple((trash[j], trash[j + 1]) for j in range(n_t - 1))
    cross = []
    gates = []
    slot = 0
    for layer in range(n_t):
        gates += [ry(q, param=slot + q) for q in range(L)]
        slot += L
        pairs = tuple((q, trash[(k + layer) % n_t]) for k, q in enumerate(others))
        cross.append(pairs)
        gates += [cz(a, b) for a, b in pairs + trash_pairs]
    gates += [ry(t, param=slot + j) for j, t in enumerate(trash)]
    spec = SyndromeSpec(L, trash, n_t, tuple(cross), trash_pairs)
    return ParamCircuit(L, gates, spec.n_params), spec


# --------------------------------------------------------------------------
# cost


def cost_from_counts(hist: ShotHistogram) -> float:
    """Mean Hamming weight of the measured bitstrings."""
    if hist.n_shots <= 0:
        raise ValueError("histogram has no shots")
    return sum(c * key.count("1") for key, c in hist.counts.items()) / hist.n_shots


def cost_from_expectations(state: StateVector, trash: Sequence[int]) -> float:
    """``sum_j (1 - <Z_j>)/2`` over the trash qubits, i.e. the summed probabilities of reading 1."""
    trash = check_qubits(trash, state.n_qubits)
    p = state.probabilities.reshape((2,) * state.n_qubits)
    return float(sum(p.sum(axis=tuple(k for k in range(state.n_qubits) if k != t))[1] for t in trash))


# --------------------------------------------------------------------------
# SPSA


class SPSAError(RuntimeError):
    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class SPSAConfig:
    max_iter: int = 100
    a: float | None = None  # None: calibrate so the first step moves each parameter by ~target_step
    c: float = 0.1
    A: float | None = None  # None: 0.1 * max_iter
    alpha: float = 0.602
    gamma: float = 0.101
    seed: int = 0
    target_step: float = 0.1
    calibration_samples: int = 5

    def __post_init__(self):
        if self.c <= 0 or (self.a is not None and self.a <= 0):
            raise ValueError("SPSA gains a, c must be positive")
        if not 0 < self.gamma < self.alpha <= 1:
            raise ValueError("need 0 < gamma < alpha <= 1")
        if self.max_iter < 0:
            raise ValueError("max_iter must be >= 0")

    @property
    def stability(self) -> float:
        return 0.1 * self.max_iter if self.A is None else self.A

    def gains(self, k: int, a: float | None = None) -> tuple[float, float]:
        """``(a_k, c_k)`` for 0-based iteration ``k``."""
        a = self.a if a is None else a
        return a / (k + 1 + self.stability) ** self.alpha, self.c / (k + 1) ** self.gamma


@dataclass
class TrainingRecord:
    final_params: np.ndarray
    cost_trace: list[float]
    n_evaluations: int
    converged_cost: float
    seed: int = 0
    extra: dict = field(default_factory=dict)


def spsa_minimize(cost: Callable[[np.ndarray], float], init, cfg: SPSAConfig) -> TrainingRecord:
    """Simultaneous-perturbation stochastic approximation.

    ``cost_trace[0]`` is the cost at ``init`` and ``cost_trace[k]`` the cost after
    step ``k``; the best-seen parameters are returned.
    """
    rng = np.random.default_rng(cfg.seed)
    theta = np.array(init, dtype=float)
    n_evals = 0

    def f(x):
        nonlocal n_evals
        n_evals += 1
        val = float(cost(x))
        if not np.isfinite(val):
            raise SPSAError(f"non-finite cost {val} at evaluation {n_evals}", trace)
        return val

    trace: list[float] = []
    trace.append(f(theta))
    best, best_theta = trace[0], theta.copy()

    a = cfg.a
    if a is None and cfg.max_iter:
        # average |gradient estimate| along random directions at the start point
        c0 = cfg.c
        mags = []
        for _ in range(cfg.calibration_samples):
            delta = rng.choice((-1.0, 1.0), size=theta.size)
            mags.append(abs(f(theta + c0 * delta) - f(theta - c0 * delta)) / (2 * c0))
        mag = float(np.mean(mags))
        a = cfg.target_step * (1 + cfg.stability) ** cfg.alpha / mag if mag > 1e-12 else cfg.target_step

    for k in range(cfg.max_iter):
        ak, ck = cfg.gains(k, a)
        delta = rng.choice((-1.0, 1.0), size=theta.size)
        g = (f(theta + ck * delta) - f(theta - ck * delta)) / (2 * ck)
        theta = theta - ak * g * delta
        val = f(theta)
        trace.append(val)
        if val < best:
            best, best_theta = val, theta.copy()
    return TrainingRecord(best_theta, trace, n_evals, best, cfg.seed, {"a": a})


def random_init(n_params: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).uniform(-np.pi, np.pi, n_params)


# --------------------------------------------------------------------------
# VQE and syndrome training


def run_vqe(h: PauliHamiltonian, cfg: SPSAConfig, init=None) -> tuple[TrainingRecord, StateVector]:
    """Minimize ``<H>`` over the one-layer ring ansatz applied to ``|0...0>``."""
    L = h.n_qubits
    if L < 2:
        raise ValueError("VQE needs at least two qubits")
    circuit = build_vqe_ansatz(L)
    zero = StateVector.zero(L)
    mat = h.to_sparse()

    def energy(theta):
        psi = run_circuit(zero, circuit, theta).amplitudes
        return float(np.vdot(psi, mat @ psi).real)

    if init is None:
        init = random_init(circuit.n_params, cfg.seed)
    record = spsa_minimize(energy, init, cfg)
    state = run_circuit(zero, circuit, record.final_params)
    return record, state


def train_syndrome(
    training_states: Sequence[StateVector],
    trash: Sequence[int],
    cfg: SPSAConfig,
    shots: int | None = None,
    noise=None,
    init=None,
) -> TrainingRecord:
    """Fit the syndrome circuit so the trash qubits of every training state read ``0``.

    ``shots=None`` uses the exact expectation cost; otherwise each evaluation
    samples ``shots`` outcomes (through the trajectory simulator when ``noise``
    is given).
    """
    states = list(training_states)
    if not states:
        raise ValueError("need at least one training state")
    L = states[0].n_qubits
    if any(s.n_qubits != L for s in states):
        raise ValueError("training states differ in size")
    if noise is not None and shots is None:
        raise ValueError("noisy training needs a shot count")
    circuit, spec = build_syndrome_circuit(L, trash)
    cost = SyndromeCost(circuit, spec.trash, shots, noise, seed=cfg.seed)
    if init is None:
        init = random_init(circuit.n_params, cfg.seed)
    record = spsa_minimize(lambda th: np.mean([cost(s, th) for s in states]), init, cfg)
    record.extra.update({"trash": list(spec.trash), "shots": shots})
    return record


class SyndromeCost:
    """Evaluates the syndrome cost of states; sampled evaluations draw fresh seeds in sequence."""

    def __init__(self, circuit: ParamCircuit, trash, shots=None, noise=None, seed: int = 0):
        self.circuit = circuit
        self.trash = tuple(trash)
        self.shots = shots
        self.noise = noise
        self._seeds = np.random.SeedSequence(seed)

    def next_seed(self) -> int:
        return int(self._seeds.spawn(1)[0].generate_state(1)[0])

    def __call__(self, state: StateVector, params, seed: int | None = None) -> float:
        if self.shots is None:
            return cost_from_expectations(run_circuit(state, self.circuit, params), self.trash)
        seed = self.next_seed() if seed is None else seed
        return cost_from_counts(self.histogram(state, params, seed))

    def histogram(self, state: StateVector, params, seed: int) -> ShotHistogram:
        if self.noise is None:
            return sample_measurements(run_circuit(state, self.circuit, params), self.trash, self.shots, seed)
        from .noise import noisy_execute

        return noisy_execute(state, self.circuit, params, self.trash, self.shots, self.noise, seed)
