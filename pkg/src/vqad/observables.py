"""Order parameters and entanglement diagnostics of ground states.

Site indices in the formulas below are 1-based (site ``i`` is qubit ``i - 1``).
"""

from __future__ import annotations

import numpy as np

from .statevector import SchmidtSpectrum, StateVector, schmidt_spectrum


def z_expectations(state: StateVector) -> np.ndarray:
    """``<Z_i>`` for every site."""
    n = state.n_qubits
    p = state.probabilities.reshape((2,) * n)
    out = np.empty(n)
    for q in range(n):
        p1 = p.sum(axis=tuple(k for k in range(n) if k != q))[1]
        out[q] = 1.0 - 2.0 * p1
    return out


def staggered_magnetization(state: StateVector) -> float:
    """``sum_i (-1)^i <Z_i> / L``; +1 on ``|1010...>`` and -1 on ``|0101...>``."""
    z = z_expectations(state)
    signs = (-1.0) ** np.arange(1, state.n_qubits + 1)
    return float(signs @ z / state.n_qubits)


def site_densities(state: StateVector) -> np.ndarray:
    """Hardcore-boson occupations ``<n_i> = (1 - <Z_i>)/2``."""
    return (1.0 - z_expectations(state)) / 2.0


def cdw_order_parameter(profile, mean_filling: float | None = None) -> float:
    """Staggered density deviation summed over the left half of the chain.

    ``O = sum_{i=1}^{L/2} (-1)^i (<n_i> - mean_filling)``, where ``mean_filling``
    defaults to ``sum <n_i> / L``.
    """
    n = np.asarray(profile, dtype=float)
    L = n.size
    if L % 2:
        raise ValueError("CDW order parameter needs an even number of sites")
    if mean_filling is None:
        mean_filling = n.sum() / L
    half = np.arange(1, L // 2 + 1)
    return float(np.sum((-1.0) ** half * (n[: L // 2] - mean_filling)))


def es_degeneracy(spectrum: SchmidtSpectrum | np.ndarray) -> float:
    """Alternating sum of the descending entanglement-spectrum weights ``exp(-lambda_i)``."""
    w = getattr(spectrum, "squared_coefficients", spectrum)
    w = np.sort(np.asarray(w, dtype=float))[::-1]
    if w.size == 0:
        raise ValueError("empty Schmidt spectrum")
    return float(np.sum((-1.0) ** np.arange(w.size) * w))


def middle_cut(L: int) -> int:
    return L // 2


def ground_truth_row(state: StateVector, cut: int | None = None) -> dict:
    """Staggered magnetization, CDW order and ES degeneracy of one state."""
    L = state.n_qubits
    cut = middle_cut(L) if cut is None else cut
    row = {"S": staggered_magnetization(state), "D_ES": es_degeneracy(schmidt_spectrum(state, cut))}
    row["O_CDW"] = cdw_order_parameter(site_densities(state)) if L % 2 == 0 else float("nan")
    return row


DEBHM_PHASES = ("MI", "TMI", "CDW")


def debhm_phase(row: dict, L: int) -> str:
    """Reference phase from observables: CDW if ``|O_CDW| >= L/16`` (a quarter of
    the perfect-CDW value ``L/4``), else TMI if ``D_ES <= 0.5``, else MI."""
    if abs(row["O_CDW"]) >= L / 16:
        return "CDW"
    if row["D_ES"] <= 0.5:
        return "TMI"
    return "MI"
