"""Spin Hamiltonians as Pauli-string sums.

Two models are provided:

* the transverse/longitudinal-field Ising chain
  ``H = J sum Z_i Z_{i+1} - g_x sum X_i - g_z sum Z_i``;
* the dimerized extended Bose-Hubbard chain in the hardcore limit, mapped to
  spin-1/2 with ``n_i = (1 - Z_i)/2`` and ``b_i^+ b_j + h.c. = (X_i X_j + Y_i Y_j)/2``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import scipy.sparse as sp

from .statevector import StateVector, _index, expectation_pauli_string, pauli_masks


@dataclass
class PauliString:
    coeff: float
    letters: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        self.coeff = float(self.coeff)
        if not np.isfinite(self.coeff):
            raise ValueError("coefficient must be finite")
        self.letters = {int(q): str(p) for q, p in self.letters.items()}
        for p in self.letters.values():
            if p not in ("X", "Y", "Z"):
                raise ValueError(f"unknown Pauli letter {p!r}")


@dataclass
class PauliHamiltonian:
    n_qubits: int
    terms: list[PauliString] = field(default_factory=list)

    def __post_init__(self):
        for t in self.terms:
            for q in t.letters:
                if not 0 <= q < self.n_qubits:
                    raise ValueError(f"term acts on qubit {q} outside 0..{self.n_qubits - 1}")
        self._sparse = None

    def norm_bound(self) -> float:
        return float(sum(abs(t.coeff) for t in self.terms))

    def to_sparse(self, basis: np.ndarray | None = None) -> sp.csr_matrix:
        """Sparse matrix in the full space, or restricted to the sorted ``basis`` indices.

        When restricting, the Hamiltonian must leave the span of ``basis`` invariant;
        entries leaking out of it (after summing all terms) raise ``ValueError``.
        """
        if basis is None and self._sparse is not None:
            return self._sparse
        n = self.n_qubits
        cols = _index(n) if basis is None else np.asarray(basis)
        dim = cols.size
        rows_all, cols_all, vals_all = [], [], []
        leak_rows, leak_cols, leak_vals = [], [], []
        for t in self.terms:
            flip, phase, n_y = pauli_masks(t.letters, n)
            vals = t.coeff * (1j**n_y) * (1.0 - 2.0 * (np.bitwise_count(cols & phase) & 1))
            targets = cols ^ flip
            if basis is None:
                rows_all.append(targets)
                cols_all.append(cols)
                vals_all.append(vals)
                continue
            pos = np.searchsorted(cols, targets)
            pos = np.minimum(pos, dim - 1)
            inside = cols[pos] == targets
            rows_all.append(pos[inside])
            cols_all.append(np.nonzero(inside)[0])
            vals_all.append(vals[inside])
            leak_rows.append(targets[~inside])
            leak_cols.append(np.nonzero(~inside)[0])
            leak_vals.append(vals[~inside])
        if rows_all:
            r, c, v = (np.concatenate(x) for x in (rows_all, cols_all, vals_all))
        else:
            r = c = np.zeros(0, dtype=int)
            v = np.zeros(0)
        mat = sp.coo_matrix((v, (r, c)), shape=(dim, dim)).tocsr()
        mat.sum_duplicates()
        if basis is not None and leak_rows:
            lr = np.concatenate(leak_rows)
            if lr.size:
                leak = sp.coo_matrix(
                    (np.concatenate(leak_vals), (lr, np.concatenate(leak_cols))), shape=(2**n, dim)
                ).tocsr()
                leak.sum_duplicates()
                if leak.nnz and np.max(np.abs(leak.data)) > 1e-12:
                    raise ValueError("Hamiltonian does not preserve the requested basis subset")
        if not np.any(mat.data.imag):
            mat = mat.real.tocsr()
        if basis is None:
            self._sparse = mat
        return mat

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()

    def to_json(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "terms": [{"coeff": t.coeff, "paulis": {str(q): p for q, p in sorted(t.letters.items())}} for t in self.terms],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "PauliHamiltonian":
        terms = [PauliString(t["coeff"], {int(q): p for q, p in t["paulis"].items()}) for t in obj["terms"]]
        return cls(int(obj["n_qubits"]), terms)

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def energy_expectation(state: StateVector, h: PauliHamiltonian) -> float:
    """Sum of coefficient-weighted Pauli expectations."""
    if state.n_qubits != h.n_qubits:
        raise ValueError(f"state has {state.n_qubits} qubits, Hamiltonian {h.n_qubits}")
    return float(sum(expectation_pauli_string(state, t) for t in h.terms))


@dataclass(frozen=True)
class TLFIParams:
    L: int
    J: float = 1.0
    g_x: float = 0.0
    g_z: float = 0.0
    boundary: str = "periodic"

    def __post_init__(self):
        if self.L < 2:
            raise ValueError("TLFI needs L >= 2")
        if self.boundary not in ("periodic", "open"):
            raise ValueError(f"boundary must be 'periodic' or 'open', got {self.boundary!r}")


@dataclass(frozen=True)
class DEBHMParams:
    L: int
    J: float = 1.0
    dJ: float = 0.0
    V: float = 0.0
    filling: int | None = None

    def __post_init__(self):
        if self.L < 2:
            raise ValueError("DEBHM needs L >= 2")
        if self.filling is None:
            if self.L % 2:
                raise ValueError("half filling needs even L; pass filling explicitly")
            object.__setattr__(self, "filling", self.L // 2)
        if not 0 <= self.filling <= self.L:
            raise ValueError(f"filling {self.filling} outside 0..{self.L}")


def tlfi_bonds(L: int, boundary: str) -> list[tuple[int, int]]:
    bonds = [(i, i + 1) for i in range(L - 1)]
    if boundary == "periodic" and L > 2:
        bonds.append((L - 1, 0))
    return bonds


def build_tlfi(p: TLFIParams) -> PauliHamiltonian:
    # an L=2 ring would double the single bond; it is kept once
    terms = []
    if p.J:
        terms += [PauliString(p.J, {i: "Z", j: "Z"}) for i, j in tlfi_bonds(p.L, p.boundary)]
    if p.g_x:
        terms += [PauliString(-p.g_x, {i: "X"}) for i in range(p.L)]
    if p.g_z:
        terms += [PauliString(-p.g_z, {i: "Z"}) for i in range(p.L)]
    return PauliHamiltonian(p.L, terms)


def hopping_amplitude(p: DEBHMParams, bond: int) -> float:
    """``J + dJ (-1)^bond`` for the 1-based bond index (bond i joins sites i and i+1)."""
    return p.J + p.dJ * (-1) ** bond


def build_debhm_spin(p: DEBHMParams) -> PauliHamiltonian:
    terms = []
    constant = 0.0
    for bond in range(1, p.L):
        i, j = bond - 1, bond
        t = hopping_amplitude(p, bond)
        if t:
            terms.append(PauliString(-t / 2, {i: "X", j: "X"}))
            terms.append(PauliString(-t / 2, {i: "Y", j: "Y"}))
        if p.V:
            # V n_i n_j with n = (1 - Z)/2
            terms.append(PauliString(p.V / 4, {i: "Z", j: "Z"}))
            terms.append(PauliString(-p.V / 4, {i: "Z"}))
            terms.append(PauliString(-p.V / 4, {j: "Z"}))
            constant += p.V / 4
    if constant:
        terms.append(PauliString(constant, {}))
    return PauliHamiltonian(p.L, terms)


def number_operator(L: int) -> PauliHamiltonian:
    """Total particle number ``sum_i (1 - Z_i)/2``."""
    terms = [PauliString(-0.5, {i: "Z"}) for i in range(L)]
    terms.append(PauliString(L / 2, {}))
    return PauliHamiltonian(L, terms)


def build_model(params) -> PauliHamiltonian:
    if isinstance(params, TLFIParams):
        return build_tlfi(params)
    if isinstance(params, DEBHMParams):
        return build_debhm_spin(params)
    raise TypeError(f"unsupported model parameters {type(params).__name__}")
