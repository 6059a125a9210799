"""Exact ground states by diagonalization, optionally inside a particle-number sector."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np
import scipy.sparse.linalg as spla

from .grid import GridSpec
from .hamiltonians import DEBHMParams, PauliHamiltonian, PauliString, build_model
from .statevector import MAX_QUBITS, StateVector

DENSE_LIMIT = 1024  # matrices up to this dimension are diagonalized densely
SYMMETRY_FIELD = 1e-8


@dataclass(frozen=True, eq=False)
class GroundSolution:
    energy: float
    state: StateVector
    sector: int | None
    degeneracy_gap: float


def sector_basis(L: int, n_particles: int) -> np.ndarray:
    """Sorted basis indices with exactly ``n_particles`` one-bits."""
    if not 0 <= n_particles <= L:
        raise ValueError(f"empty sector: {n_particles} particles on {L} sites")
    idx = [sum(1 << (L - 1 - q) for q in occ) for occ in combinations(range(L), n_particles)]
    return np.array(sorted(idx), dtype=np.int64)


def _staggered_field(L: int, sign: str) -> list[PauliString]:
    # -eps * sum (-1)^i Z_i lowers states with positive staggered magnetization
    s = {"+": 1.0, "-": -1.0}[sign]
    return [PauliString(-s * SYMMETRY_FIELD * (-1) ** (q + 1), {q: "Z"}) for q in range(L)]


def exact_ground_state(
    h: PauliHamiltonian,
    sector: int | None = None,
    symmetry_break: str | None = None,
    degeneracy_tol: float = 0.0,
) -> GroundSolution:
    """Lowest eigenpair of ``h`` and the gap to the next eigenvalue.

    With ``sector`` set, only basis states with that many one-bits are used and
    the eigenvector is embedded back into the full space.

    ``symmetry_break="+"`` / ``"-"`` adds a 1e-8 staggered field favouring the
    requested sign of the staggered magnetization.  If the two lowest levels are
    still closer than ``degeneracy_tol``, the returned state is the combination
    of both with extremal staggered magnetization of that sign (the energy stays
    the lowest eigenvalue; the state's residual is then bounded by the gap).
    """
    L = h.n_qubits
    if L > MAX_QUBITS:
        raise ValueError(f"exact diagonalization limited to L <= {MAX_QUBITS}")
    if symmetry_break not in (None, "none", "+", "-"):
        raise ValueError(f"symmetry_break must be '+', '-' or None, got {symmetry_break!r}")
    breaking = symmetry_break in ("+", "-")
    if breaking:
        h = PauliHamiltonian(L, list(h.terms) + _staggered_field(L, symmetry_break))
    basis = None if sector is None else sector_basis(L, sector)
    mat = h.to_sparse(basis)
    dim = mat.shape[0]
    if dim <= DENSE_LIMIT:
        evals, evecs = np.linalg.eigh(mat.toarray())
        vec = evecs[:, 0]
        gap = evals[1] - evals[0] if dim > 1 else np.inf
    else:
        evals, evecs = spla.eigsh(mat, k=2, which="SA", tol=1e-12, v0=np.ones(dim) / np.sqrt(dim))
        order = np.argsort(evals)
        evals, evecs = evals[order], evecs[:, order]
        vec = evecs[:, 0]
        gap = evals[1] - evals[0]
    if breaking and dim > 1 and gap < degeneracy_tol:
        vec = _select_staggered(evecs[:, :2], L, basis, symmetry_break)
    # fix the arbitrary global phase so results are reproducible
    k = int(np.argmax(np.abs(vec)))
    vec = vec * (abs(vec[k]) / vec[k])
    if basis is None:
        full = vec
    else:
        full = np.zeros(2**L, dtype=vec.dtype)
        full[basis] = vec
    full = full / np.linalg.norm(full)
    return GroundSolution(float(evals[0]), StateVector(L, full), sector, float(gap))


def _select_staggered(pair: np.ndarray, L: int, basis, sign: str) -> np.ndarray:
    idx = np.arange(2**L) if basis is None else basis
    z = np.array([1.0 - 2.0 * ((idx >> (L - 1 - q)) & 1) for q in range(L)])
    stag = ((-1.0) ** np.arange(1, L + 1)) @ z / L
    m = pair.conj().T @ (stag[:, None] * pair)
    w, u = np.linalg.eigh(m)
    pick = u[:, -1] if sign == "+" else u[:, 0]
    return pair @ pick


def model_sector(params) -> int | None:
    return params.filling if isinstance(params, DEBHMParams) else None


def solve_model(params, symmetry_break: str | None = None, degeneracy_tol: float = 0.0) -> GroundSolution:
    return exact_ground_state(build_model(params), model_sector(params), symmetry_break, degeneracy_tol)


def _solve_point(args):
    template, grid, point, symmetry_break, tol = args
    return point, solve_model(grid.model_at(template, point), symmetry_break, tol)


def grid_ground_states(
    template,
    grid: GridSpec,
    symmetry_break: str | None = None,
    degeneracy_tol: float = 0.0,
    workers: int = 1,
) -> dict[tuple[float, float], GroundSolution]:
    """Ground state at every grid point, keyed by ``(axis1 value, axis2 value)``.

    DEBHM models are solved in their ``filling`` sector.
    """
    # validate field names before any work
    grid.model_at(template, grid.points()[0])
    jobs = [(template, grid, p, symmetry_break, degeneracy_tol) for p in grid.points()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_solve_point, jobs))
    else:
        results = [_solve_point(j) for j in jobs]
    return dict(results)


def save_grid_states(solutions: dict, grid: GridSpec, out_dir) -> Path:
    """Write one ``.state`` file per point plus ``index.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    index = {"grid": grid.to_json(), "points": []}
    for k, ((a, b), sol) in enumerate(sorted(solutions.items())):
        name = f"point_{k:04d}.state"
        sol.state.save(out / name)
        index["points"].append(
            {"axis1": a, "axis2": b, "file": name, "energy": sol.energy, "gap": sol.degeneracy_gap, "sector": sol.sector}
        )
    with open(out / "index.json", "w") as fh:
        json.dump(index, fh, indent=1)
    return out / "index.json"


def load_grid_states(index_path) -> tuple[GridSpec, dict]:
    index_path = Path(index_path)
    with open(index_path) as fh:
        index = json.load(fh)
    sols = {}
    for entry in index["points"]:
        state = StateVector.load(index_path.parent / entry["file"])
        sols[(entry["axis1"], entry["axis2"])] = GroundSolution(entry["energy"], state, entry["sector"], entry["gap"])
    return GridSpec.from_json(index["grid"]), sols
