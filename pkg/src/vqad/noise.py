"""Depolarizing gate noise by Pauli trajectories, readout error and its mitigation.

Depolarizing convention: with probability ``p`` a uniformly random
*non-identity* Pauli (3 choices on one qubit, 15 on two) follows the gate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .statevector import (
    Gate,
    ParamCircuit,
    ShotHistogram,
    StateVector,
    apply_pauli,
    check_qubits,
    execute_program,
    marginal_probabilities,
)

PAULI_LETTERS = ("I", "X", "Y", "Z")


class SingularCalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseModel:
    p1: float = 0.0
    p2: float = 0.0
    # readout[q] = (P(read 1 | 0), P(read 0 | 1)); qubits beyond the list are ideal
    readout: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        ro = tuple((float(a), float(b)) for a, b in self.readout)
        object.__setattr__(self, "readout", ro)
        for p in (self.p1, self.p2, *(x for pair in ro for x in pair)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability {p} outside [0, 1]")

    @classmethod
    def symmetric_readout(cls, p_flip: float, n_qubits: int, p1: float = 0.0, p2: float = 0.0) -> "NoiseModel":
        return cls(p1, p2, tuple((p_flip, p_flip) for _ in range(n_qubits)))

    def flip_probs(self, q: int) -> tuple[float, float]:
        return self.readout[q] if q < len(self.readout) else (0.0, 0.0)

    def to_json(self) -> dict:
        return {"p1": self.p1, "p2": self.p2, "readout": [list(r) for r in self.readout]}

    @classmethod
    def from_json(cls, obj) -> "NoiseModel":
        return cls(float(obj.get("p1", 0.0)), float(obj.get("p2", 0.0)), tuple(tuple(r) for r in obj.get("readout", [])))


def _draw_errors(circuit: ParamCircuit, noise: NoiseModel, uniforms: np.ndarray) -> np.ndarray:
    """Error code per (shot, gate): -1 for none, else index of the non-identity Pauli."""
    codes = np.full(uniforms.shape, -1, dtype=np.int64)
    for g_idx, g in enumerate(circuit.gates):
        p, n_choices = (noise.p2, 15) if len(g.targets) == 2 else (noise.p1, 3)
        if p <= 0:
            continue
        u = uniforms[:, g_idx]
        hit = u < p
        # conditioned on a hit, u / p is uniform on [0, 1)
        codes[hit, g_idx] = np.minimum((u[hit] / p * n_choices).astype(np.int64), n_choices - 1)
    return codes


def _apply_error(psi_row: np.ndarray, n: int, gate: Gate, code: int) -> None:
    if len(gate.targets) == 1:
        apply_pauli(psi_row, n, gate.targets[0], PAULI_LETTERS[code + 1])
        return
    first, second = divmod(code + 1, 4)
    for q, k in zip(gate.targets, (first, second)):
        if k:
            apply_pauli(psi_row, n, q, PAULI_LETTERS[k])


def noisy_execute(
    initial: StateVector,
    circuit: ParamCircuit,
    params,
    qubits: Sequence[int],
    n_shots: int,
    noise: NoiseModel,
    seed: int,
) -> ShotHistogram:
    """Sample ``n_shots`` independent noisy trajectories and read out ``qubits``.

    Shot ``s`` consumes row ``s`` of a uniform table drawn from ``seed``: one
    number per gate for the error draw, one for the measurement and one per
    measured qubit for readout flips.  Shots with identical error patterns
    share a single simulated state.
    """
    params = np.asarray(params, dtype=float).reshape(-1)
    if params.size != circuit.n_params:
        raise ValueError(f"expected {circuit.n_params} parameters, got {params.size}")
    if circuit.n_qubits != initial.n_qubits:
        raise ValueError(f"circuit has {circuit.n_qubits} qubits, state has {initial.n_qubits}")
    qubits = check_qubits(qubits, initial.n_qubits)
    if n_shots < 1:
        raise ValueError("n_shots must be >= 1")
    n = initial.n_qubits
    n_gates = len(circuit.gates)
    k = len(qubits)
    table = np.random.default_rng(seed).random((n_shots, n_gates + 1 + k))
    codes = _draw_errors(circuit, noise, table[:, :n_gates])
    patterns, which = np.unique(codes, axis=0, return_inverse=True)
    which = which.reshape(-1)

    psi = np.repeat(initial.amplitudes[None, :], len(patterns), axis=0)
    events: dict[int, list[tuple[int, int]]] = {}
    for row, pat in enumerate(patterns):
        for g_idx in np.nonzero(pat >= 0)[0]:
            events.setdefault(int(g_idx), []).append((row, int(pat[g_idx])))

    def hook(step, gate):
        for row, code in events.get(step, ()):
            _apply_error(psi[row : row + 1], n, gate, code)

    execute_program(psi, circuit, params, hook=hook if events else None)

    probs = np.abs(psi) ** 2
    probs /= probs.sum(axis=1, keepdims=True)
    marg = marginal_probabilities(probs, n, qubits)
    cdf = np.cumsum(marg, axis=1)
    cdf /= cdf[:, -1:]
    u_meas = table[:, n_gates]
    outcomes = np.minimum((cdf[which] <= u_meas[:, None]).sum(axis=1), 2**k - 1)

    outcomes = apply_readout(outcomes, qubits, noise, table[:, n_gates + 1 :])
    return ShotHistogram.from_outcomes(qubits, outcomes)


def apply_readout(outcomes: np.ndarray, qubits: Sequence[int], noise: NoiseModel, uniforms: np.ndarray) -> np.ndarray:
    """Flip each measured bit independently with its readout probabilities."""
    k = len(qubits)
    out = outcomes.copy()
    for j, q in enumerate(qubits):
        p01, p10 = noise.flip_probs(q)
        if p01 == 0 and p10 == 0:
            continue
        shift = k - 1 - j
        bit = (outcomes >> shift) & 1
        flip = uniforms[:, j] < np.where(bit == 1, p10, p01)
        out ^= flip.astype(np.int64) << shift
    return out


# --------------------------------------------------------------------------
# calibration and mitigation


@dataclass(frozen=True, eq=False)
class CalibrationMatrix:
    """Column ``j`` is the outcome distribution when basis state ``j`` is prepared."""

    trash: tuple[int, ...]
    matrix: np.ndarray

    @property
    def n_t(self) -> int:
        return len(self.trash)

    def to_json(self) -> dict:
        return {"n_t": self.n_t, "trash": list(self.trash), "matrix": self.matrix.tolist()}

    @classmethod
    def from_json(cls, obj) -> "CalibrationMatrix":
        return cls(tuple(obj["trash"]), np.array(obj["matrix"], dtype=float))


def _preparation_circuit(n: int, bits: str, trash: Sequence[int]) -> ParamCircuit:
    gates = [Gate("X", (t,)) for t, b in zip(trash, bits) if b == "1"]
    return ParamCircuit(n, gates, 0)


def build_calibration_matrix(
    noise: NoiseModel,
    trash: Sequence[int],
    n_shots: int | None = None,
    seed: int = 0,
    n_qubits: int | None = None,
) -> CalibrationMatrix:
    """Readout confusion matrix of the ``trash`` qubits.

    Each basis state is prepared with ideal X gates and measured ``n_shots``
    times under readout error only.  ``n_shots=None`` returns the exact
    (infinite-shot) matrix.
    """
    trash = tuple(int(t) for t in trash)
    k = len(trash)
    if n_shots is None:
        mat = np.ones((1, 1))
        for t in trash:
            p01, p10 = noise.flip_probs(t)
            mat = np.kron(mat, np.array([[1 - p01, p10], [p01, 1 - p10]]))
        return CalibrationMatrix(trash, mat)
    if n_shots < 1:
        raise ValueError("n_shots must be >= 1")
    n = n_qubits if n_qubits is not None else max(trash) + 1
    readout_only = NoiseModel(0.0, 0.0, noise.readout)
    seeds = np.random.SeedSequence(seed).generate_state(2**k)
    zero = StateVector.zero(n)
    mat = np.zeros((2**k, 2**k))
    for j in range(2**k):
        bits = format(j, f"0{k}b")
        hist = noisy_execute(zero, _preparation_circuit(n, bits, trash), [], trash, n_shots, readout_only, int(seeds[j]))
        mat[:, j] = hist.frequencies()
    return CalibrationMatrix(trash, mat)


@dataclass(frozen=True, eq=False)
class MitigatedDistribution:
    probabilities: np.ndarray
    quasi_counts: dict[str, float]
    raw: np.ndarray = field(default=None)

    def prob(self, bits: str) -> float:
        return float(self.probabilities[int(bits, 2)])


def mitigate_counts(raw: ShotHistogram, cal: CalibrationMatrix, max_condition: float = 1e8) -> MitigatedDistribution:
    """Invert the calibration matrix, clip negative weights and renormalize."""
    k = len(raw.measured_qubits)
    if k != cal.n_t:
        raise ValueError(f"histogram has {k} qubits, calibration {cal.n_t}")
    cond = np.linalg.cond(cal.matrix)
    if not np.isfinite(cond) or cond > max_condition:
        raise SingularCalibrationError(
            f"calibration matrix is ill-conditioned (cond={cond:.3g}); use more calibration shots"
        )
    freq = raw.frequencies()
    p = np.linalg.solve(cal.matrix, freq)
    p = np.clip(p, 0.0, None)
    p /= p.sum()
    quasi = {format(j, f"0{k}b"): float(p[j] * raw.n_shots) for j in range(2**k) if p[j] > 0}
    return MitigatedDistribution(p, quasi, freq)
