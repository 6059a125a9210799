"""Dense pure-state simulation for the RY/CZ/Pauli gate set.

Qubit ``q`` (0-based) is lattice site ``q + 1`` and is the most significant bit
of a basis-state label, so ``|10101>`` reads left to right as sites 1..5 and
``amplitudes[0b10101]`` is its amplitude.  ``Z|0> = +|0>``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

MAX_QUBITS = 16
NORM_ATOL = 1e-10
SCHMIDT_CUTOFF = 1e-12

GATE_KINDS = ("RY", "CZ", "X", "Y", "Z")


@dataclass(frozen=True, eq=False)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != 2**self.n_qubits:
            raise ValueError(f"expected {2**self.n_qubits} amplitudes, got {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state is not normalized (norm {norm:.3e})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        amps = np.zeros(2**n_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        """Computational basis state from a bitstring such as ``"10101"``."""
        amps = np.zeros(2 ** len(bits), dtype=np.complex128)
        amps[int(bits, 2)] = 1.0
        return cls(len(bits), amps)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_bytes(self) -> bytes:
        return struct.pack("<I", self.n_qubits) + self.amplitudes.astype("<c16").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "StateVector":
        (n,) = struct.unpack_from("<I", data, 0)
        amps = np.frombuffer(data, dtype="<c16", offset=4)
        return cls(n, amps)

    def to_json(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "StateVector":
        amps = np.array([complex(re, im) for re, im in obj["amplitudes"]])
        return cls(int(obj["n_qubits"]), amps)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "StateVector":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


def inject_state(amplitudes, renormalize: bool = False, tol: float = 1e-8) -> StateVector:
    """Wrap a raw amplitude vector (e.g. an exact eigenvector) as a StateVector."""
    amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    n = amps.size.bit_length() - 1
    if amps.size < 2 or amps.size != 2**n:
        raise ValueError(f"length {amps.size} is not a power of two >= 2")
    norm = np.linalg.norm(amps)
    if norm == 0 or (not renormalize and abs(norm - 1.0) > tol):
        raise ValueError(f"norm {norm:.3e} deviates from 1 beyond {tol:g}; pass renormalize=True")
    return StateVector(n, amps / norm)


# --------------------------------------------------------------------------
# circuits


@dataclass(frozen=True)
class Gate:
    """One gate.  RY angles are either ``angle`` (constant) or ``param`` (slot)."""

    kind: str
    targets: tuple[int, ...]
    param: int | None = None
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        arity = 2 if self.kind == "CZ" else 1
        if len(self.targets) != arity:
            raise ValueError(f"{self.kind} acts on {arity} qubit(s), got {self.targets}")
        if arity == 2 and self.targets[0] == self.targets[1]:
            raise ValueError("CZ targets must differ")
        if self.kind == "RY" and (self.param is None) == (self.angle is None):
            raise ValueError("RY needs exactly one of param / angle")
        if self.kind != "RY" and (self.param is not None or self.angle is not None):
            raise ValueError(f"{self.kind} takes no angle")


def ry(target: int, param: int | None = None, angle: float | None = None) -> Gate:
    return Gate("RY", (target,), param=param, angle=angle)


def cz(a: int, b: int) -> Gate:
    return Gate("CZ", (a, b))


def ry_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True, eq=False)
class ParamCircuit:
    n_qubits: int
    gates: tuple[Gate, ...]
    n_params: int
    _program: list = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        used = set()
        for g in self.gates:
            for t in g.targets:
                if not 0 <= t < self.n_qubits:
                    raise ValueError(f"gate target {t} outside 0..{self.n_qubits - 1}")
            if g.param is not None:
                if not 0 <= g.param < self.n_params:
                    raise ValueError(f"parameter slot {g.param} outside 0..{self.n_params - 1}")
                used.add(g.param)
        if len(used) != self.n_params:
            missing = sorted(set(range(self.n_params)) - used)
            raise ValueError(f"parameter slots never referenced: {missing}")

    @property
    def has_y(self) -> bool:
        return any(g.kind == "Y" for g in self.gates)

    def program(self) -> list:
        """Gates with runs of diagonal gates (CZ, Z) fused into one sign mask."""
        if self._program is None:
            object.__setattr__(self, "_program", _compile(self.gates, self.n_qubits))
        return self._program


def _compile(gates: Sequence[Gate], n: int) -> list:
    prog: list = []
    for g in gates:
        if g.kind in ("CZ", "Z"):
            mask = _diag_sign(g, n)
            if prog and prog[-1][0] == "diag":
                prog[-1] = ("diag", prog[-1][1] * mask)
            else:
                prog.append(("diag", mask))
        else:
            prog.append((g.kind, g.targets[0], g.param, g.angle))
    return prog


@lru_cache(maxsize=None)
def _bits(n: int, q: int) -> np.ndarray:
    idx = np.arange(2**n)
    return (idx >> (n - 1 - q)) & 1


def _diag_sign(g: Gate, n: int) -> np.ndarray:
    if g.kind == "Z":
        return 1.0 - 2.0 * _bits(n, g.targets[0])
    a, b = g.targets
    return 1.0 - 2.0 * (_bits(n, a) & _bits(n, b))


def _split(psi: np.ndarray, n: int, q: int) -> np.ndarray:
    # (batch, left, 2, right) view with axis 2 = qubit q
    return psi.reshape(psi.shape[0], 2**q, 2, 2 ** (n - q - 1))


def apply_ry(psi: np.ndarray, n: int, q: int, theta: float) -> None:
    """In-place RY on a (batch, 2**n) array."""
    v = _split(psi, n, q)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    a0 = v[:, :, 0, :].copy()
    a1 = v[:, :, 1, :]
    v[:, :, 0, :] = c * a0 - s * a1
    v[:, :, 1, :] = s * a0 + c * a1


def apply_x(psi: np.ndarray, n: int, q: int) -> None:
    v = _split(psi, n, q)
    v[:, :, [0, 1], :] = v[:, :, [1, 0], :]


def apply_y(psi: np.ndarray, n: int, q: int) -> None:
    # Y = [[0, -i], [i, 0]]
    v = _split(psi, n, q)
    a0 = v[:, :, 0, :].copy()
    v[:, :, 0, :] = -1j * v[:, :, 1, :]
    v[:, :, 1, :] = 1j * a0


def apply_z(psi: np.ndarray, n: int, q: int) -> None:
    v = _split(psi, n, q)
    v[:, :, 1, :] *= -1


def apply_pauli(psi: np.ndarray, n: int, q: int, letter: str) -> None:
    {"X": apply_x, "Y": apply_y, "Z": apply_z}[letter](psi, n, q)


def execute_program(psi: np.ndarray, circuit: ParamCircuit, params: np.ndarray, hook=None) -> None:
    """Run ``circuit`` in place on a (batch, 2**n) array.

    ``hook(step, gate)`` is called after each original gate when given; it is
    used by the trajectory sampler and forces the unfused gate list.
    """
    n = circuit.n_qubits
    if hook is not None:
        for step, g in enumerate(circuit.gates):
            if g.kind == "RY":
                apply_ry(psi, n, g.targets[0], params[g.param] if g.param is not None else g.angle)
            elif g.kind == "CZ":
                psi *= _diag_sign(g, n)
            else:
                apply_pauli(psi, n, g.targets[0], g.kind)
            hook(step, g)
        return
    for op in circuit.program():
        kind = op[0]
        if kind == "diag":
            psi *= op[1]
        elif kind == "RY":
            _, q, slot, angle = op
            apply_ry(psi, n, q, params[slot] if slot is not None else angle)
        else:
            apply_pauli(psi, n, op[1], kind)


def run_circuit(initial: StateVector, circuit: ParamCircuit, params) -> StateVector:
    """Apply ``circuit`` with parameter vector ``params`` to ``initial``."""
    params = np.asarray(params, dtype=float).reshape(-1)
    if params.size != circuit.n_params:
        raise ValueError(f"expected {circuit.n_params} parameters, got {params.size}")
    if circuit.n_qubits != initial.n_qubits:
        raise ValueError(f"circuit has {circuit.n_qubits} qubits, state has {initial.n_qubits}")
    amps = initial.amplitudes
    # RY/CZ/X/Z are real, so real input stays real and runs at half the cost
    if not circuit.has_y and not np.any(amps.imag):
        psi = amps.real.copy()[None, :]
    else:
        psi = amps.copy()[None, :]
    execute_program(psi, circuit, params)
    out = psi[0].astype(np.complex128)
    out /= np.linalg.norm(out)
    return StateVector(initial.n_qubits, out)


# --------------------------------------------------------------------------
# measurement


@dataclass(frozen=True)
class ShotHistogram:
    """Counts keyed by bitstring; character ``j`` is the outcome of ``measured_qubits[j]``."""

    measured_qubits: tuple[int, ...]
    counts: dict[str, int]
    n_shots: int

    def __post_init__(self):
        object.__setattr__(self, "measured_qubits", tuple(self.measured_qubits))
        k = len(self.measured_qubits)
        for key, c in self.counts.items():
            if len(key) != k or set(key) - {"0", "1"}:
                raise ValueError(f"bad outcome key {key!r} for {k} measured qubits")
            if c < 0:
                raise ValueError("negative count")
        if sum(self.counts.values()) != self.n_shots:
            raise ValueError("counts do not sum to n_shots")

    def frequencies(self) -> np.ndarray:
        """Outcome frequencies as a vector indexed by the integer value of the key."""
        freq = np.zeros(2 ** len(self.measured_qubits))
        for key, c in self.counts.items():
            freq[int(key, 2)] = c
        return freq / self.n_shots

    def to_json(self) -> dict:
        return {"measured_qubits": list(self.measured_qubits), "counts": dict(self.counts), "n_shots": self.n_shots}

    @classmethod
    def from_json(cls, obj: Mapping) -> "ShotHistogram":
        return cls(tuple(obj["measured_qubits"]), {k: int(v) for k, v in obj["counts"].items()}, int(obj["n_shots"]))

    @classmethod
    def from_outcomes(cls, qubits: Sequence[int], outcomes: np.ndarray) -> "ShotHistogram":
        k = len(qubits)
        values, counts = np.unique(np.asarray(outcomes), return_counts=True)
        table = {format(int(v), f"0{k}b"): int(c) for v, c in zip(values, counts)}
        return cls(tuple(qubits), table, int(len(outcomes)))


def check_qubits(qubits: Sequence[int], n: int) -> tuple[int, ...]:
    qubits = tuple(int(q) for q in qubits)
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"duplicate qubit indices in {qubits}")
    for q in qubits:
        if not 0 <= q < n:
            raise ValueError(f"qubit {q} outside 0..{n - 1}")
    return qubits


def marginal_probabilities(probs: np.ndarray, n: int, qubits: Sequence[int]) -> np.ndarray:
    """Marginal over ``qubits`` (in that order) of one or a batch of distributions."""
    batch = probs.ndim == 2
    p = probs.reshape((probs.shape[0] if batch else 1,) + (2,) * n)
    rest = tuple(1 + q for q in range(n) if q not in qubits)
    p = p.sum(axis=rest)
    # remaining axes are in ascending qubit order; permute to the requested order
    order = sorted(qubits)
    p = np.transpose(p, (0,) + tuple(1 + order.index(q) for q in qubits))
    p = p.reshape(p.shape[0], -1)
    return p if batch else p[0]


def sample_indices(marginal: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(marginal)
    cdf /= cdf[-1]
    return np.minimum(np.searchsorted(cdf, uniforms, side="right"), marginal.size - 1)


def sample_measurements(state: StateVector, qubits: Sequence[int], n_shots: int, seed: int) -> ShotHistogram:
    """Draw ``n_shots`` computational-basis outcomes of ``qubits``."""
    qubits = check_qubits(qubits, state.n_qubits)
    if n_shots < 1:
        raise ValueError("n_shots must be >= 1")
    marginal = marginal_probabilities(state.probabilities, state.n_qubits, qubits)
    rng = np.random.default_rng(seed)
    return ShotHistogram.from_outcomes(qubits, sample_indices(marginal, rng.random(n_shots)))


# --------------------------------------------------------------------------
# Pauli expectations and Schmidt spectra


@lru_cache(maxsize=None)
def _index(n: int) -> np.ndarray:
    return np.arange(2**n)


def pauli_masks(letters: Mapping[int, str], n: int) -> tuple[int, int, int]:
    """(flip mask, phase mask, number of Y) for a Pauli string on ``n`` qubits."""
    flip = phase = n_y = 0
    for q, letter in letters.items():
        if not 0 <= q < n:
            raise ValueError(f"Pauli acts on qubit {q} outside 0..{n - 1}")
        bit = 1 << (n - 1 - q)
        if letter in ("X", "Y"):
            flip |= bit
        if letter in ("Z", "Y"):
            phase |= bit
        if letter == "Y":
            n_y += 1
        if letter not in ("X", "Y", "Z"):
            raise ValueError(f"unknown Pauli letter {letter!r}")
    return flip, phase, n_y


def expectation_pauli_string(state: StateVector, pauli) -> float:
    """``<psi|P|psi>`` including the string's coefficient.

    Uses ``P|b> = i^{nY} (-1)^{|b & zy|} |b ^ xy>``.
    """
    n = state.n_qubits
    flip, phase, n_y = pauli_masks(pauli.letters, n)
    psi = state.amplitudes
    idx = _index(n)
    signs = 1.0 - 2.0 * (np.bitwise_count(idx & phase) & 1)
    val = (1j**n_y) * np.vdot(psi[idx ^ flip], signs * psi)
    return float(pauli.coeff * val.real)


@dataclass(frozen=True)
class SchmidtSpectrum:
    squared_coefficients: np.ndarray
    cut_position: int


def schmidt_spectrum(state: StateVector, cut: int) -> SchmidtSpectrum:
    """Squared Schmidt coefficients across the bond after qubit ``cut - 1``.

    ``cut`` counts sites on the left block (1..L-1), so ``cut=1`` separates site 1.
    """
    n = state.n_qubits
    if not 1 <= cut <= n - 1:
        raise ValueError(f"cut must be in 1..{n - 1}, got {cut}")
    m = state.amplitudes.reshape(2**cut, 2 ** (n - cut))
    sv = np.linalg.svd(m, compute_uv=False) ** 2
    sv = np.sort(sv[sv > SCHMIDT_CUTOFF])[::-1]
    return SchmidtSpectrum(sv, cut)
