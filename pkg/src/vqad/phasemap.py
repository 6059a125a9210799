"""Anomaly-syndrome sweeps over phase diagrams.

The workflow: pick a training point, obtain its ground state (exact or VQE),
train the syndrome on that single state, then evaluate the trained circuit on
the ground state of every grid point.  ``discover_phases`` repeats this from
the most anomalous unlabeled point until every point carries a label.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field, replace
from itertools import permutations
from typing import Mapping

import numpy as np

from .grid import GridSpec, point_seed
from .hamiltonians import build_model
from .noise import NoiseModel
from .observables import staggered_magnetization
from .oracle import grid_ground_states
from .statevector import StateVector
from .variational import (
    SPSAConfig,
    SyndromeCost,
    TrainingRecord,
    build_syndrome_circuit,
    default_trash_sites,
    random_init,
    run_vqe,
    train_syndrome,
)

log = logging.getLogger(__name__)

Point = tuple[float, float]


@dataclass(frozen=True)
class SyndromeSettings:
    n_trash: int | None = None  # None: floor(log2 L)
    trash: tuple[int, ...] | None = None  # None: middle block
    train_shots: int | None = None  # None: exact cost while training (noiseless only)
    eval_shots: int | None = 1000  # None: exact cost on the grid (noiseless only)
    restarts: int = 4  # independent SPSA runs from random inits; the lowest final cost wins

    def trash_sites(self, L: int) -> tuple[int, ...]:
        if self.trash is not None:
            return tuple(self.trash)
        return default_trash_sites(L, self.n_trash)


@dataclass
class PhaseMap:
    grid: GridSpec
    n_trash: int
    training_points: list[Point] = field(default_factory=list)
    cost: dict[Point, float] = field(default_factory=dict)
    labels: dict[Point, int] | None = None
    S: dict[Point, float] = field(default_factory=dict)
    provenance: dict[Point, str] = field(default_factory=dict)
    seeds: dict[Point, int] = field(default_factory=dict)
    records: list[TrainingRecord] = field(default_factory=list)
    rounds: list[dict[Point, float]] = field(default_factory=list)
    diagnostic: str | None = None

    def cost_array(self) -> np.ndarray:
        n1, n2 = self.grid.shape
        return np.array([[self.cost[(a, b)] for b in self.grid.axis2[1]] for a in self.grid.axis1[1]]).reshape(n1, n2)

    def label_array(self) -> np.ndarray:
        return np.array([[(self.labels or {}).get((a, b), -1) for b in self.grid.axis2[1]] for a in self.grid.axis1[1]])

    CSV_COLUMNS = ("axis1", "axis2", "cost", "label", "S", "provenance", "seed")

    def rows(self) -> list[dict]:
        out = []
        for p in self.grid.points():
            label = (self.labels or {}).get(p)
            out.append(
                {
                    "axis1": p[0],
                    "axis2": p[1],
                    "cost": self.cost.get(p),
                    "label": "" if label is None else label,
                    "S": self.S.get(p),
                    "provenance": self.provenance.get(p, ""),
                    "seed": self.seeds.get(p, ""),
                }
            )
        return out

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=self.CSV_COLUMNS, lineterminator="\n")
            w.writeheader()
            for row in self.rows():
                w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})


def oracle_states(template, grid: GridSpec, symmetry_break=None, degeneracy_tol=0.0, workers=1) -> dict[Point, StateVector]:
    sols = grid_ground_states(template, grid, symmetry_break, degeneracy_tol, workers)
    return {p: s.state for p, s in sols.items()}


def train_restarts(state, trash, cfg: SPSAConfig, master_seed: int, point, restarts: int = 1, shots=None, noise=None):
    """Best of ``restarts`` syndrome trainings on one state, seeded from the training point."""
    best = None
    for k in range(max(1, restarts)):
        tag = "train" if k == 0 else f"train{k}"
        rec = train_syndrome([state], trash, replace(cfg, seed=point_seed(master_seed, point, tag)), shots=shots, noise=noise)
        if best is None or rec.converged_cost < best.converged_cost:
            best = rec
    best.extra["restarts"] = max(1, restarts)
    return best


def anomaly_sweep(
    template,
    grid: GridSpec,
    train_point,
    source: str = "oracle",
    settings: SyndromeSettings = SyndromeSettings(),
    noise: NoiseModel | None = None,
    cfg: SPSAConfig = SPSAConfig(max_iter=500),
    master_seed: int = 0,
    states: Mapping[Point, StateVector] | None = None,
    vqe_cfg: SPSAConfig | None = None,
) -> PhaseMap:
    """Train the syndrome on the ground state at ``train_point`` and evaluate it on the grid.

    ``states`` may supply precomputed ground states; otherwise they are obtained
    from exact diagonalization (``source="oracle"``) or a warm-started VQE sweep
    (``source="vqe"``).
    """
    if source not in ("oracle", "vqe"):
        raise ValueError(f"source must be 'oracle' or 'vqe', got {source!r}")
    train_point = grid.snap(train_point)
    if states is None:
        if source == "oracle":
            states = oracle_states(template, grid)
        else:
            sweep = vqe_warm_sweep(template, grid, vqe_cfg or SPSAConfig(), master_seed=master_seed)
            states = {p: r.state for p, r in sweep.items()}
    L = states[train_point].n_qubits
    trash = settings.trash_sites(L)
    train_shots = settings.train_shots
    eval_shots = settings.eval_shots
    if noise is not None:
        train_shots = train_shots or 1000
        eval_shots = eval_shots or 1000

    record = train_restarts(
        states[train_point], trash, cfg, master_seed, train_point, settings.restarts, train_shots, noise
    )
    circuit, _ = build_syndrome_circuit(L, trash)
    evaluator = SyndromeCost(circuit, trash, eval_shots, noise)

    pm = PhaseMap(grid, len(trash), training_points=[train_point], records=[record])
    for p in grid.points():
        seed = point_seed(master_seed, p, "eval")
        pm.cost[p] = evaluator(states[p], record.final_params, seed=seed)
        pm.S[p] = staggered_magnetization(states[p])
        pm.provenance[p] = source
        pm.seeds[p] = seed
    return pm


def discover_phases(
    template,
    grid: GridSpec,
    seed_point,
    anomaly_threshold: float | None = None,
    max_rounds: int = 5,
    settings: SyndromeSettings = SyndromeSettings(),
    noise: NoiseModel | None = None,
    cfg: SPSAConfig = SPSAConfig(max_iter=500),
    master_seed: int = 0,
    states: Mapping[Point, StateVector] | None = None,
) -> PhaseMap:
    """Label the grid by repeatedly training in the most anomalous unlabeled region.

    Round ``r`` labels every unlabeled point with cost below the threshold as
    phase ``r``; the next round trains at the unlabeled point of maximal cost.
    Stops when everything is labeled, after ``max_rounds``, or when a round
    labels nothing (recorded in ``diagnostic``).  The threshold defaults to
    ``0.3 * n_trash``.
    """
    if states is None:
        states = oracle_states(template, grid)
    L = next(iter(states.values())).n_qubits
    n_trash = len(settings.trash_sites(L))
    threshold = 0.3 * n_trash if anomaly_threshold is None else anomaly_threshold
    if threshold <= 0:
        raise ValueError("anomaly threshold must be positive")

    result = PhaseMap(grid, n_trash, labels={})
    current = grid.snap(seed_point)
    for r in range(max_rounds):
        pm = anomaly_sweep(template, grid, current, "oracle", settings, noise, cfg, master_seed, states)
        result.training_points.append(current)
        result.records += pm.records
        result.rounds.append(dict(pm.cost))
        if r == 0:
            result.cost, result.S, result.provenance, result.seeds = dict(pm.cost), pm.S, pm.provenance, pm.seeds
        new = [p for p in grid.points() if p not in result.labels and pm.cost[p] < threshold]
        if not new:
            result.diagnostic = f"round {r} labeled no points (training cost {pm.records[0].converged_cost:.3g})"
            log.warning(result.diagnostic)
            break
        for p in new:
            result.labels[p] = r
            # a point's reported cost is the one from the round that labeled it
            result.cost[p] = pm.cost[p]
        unlabeled = [p for p in grid.points() if p not in result.labels]
        if not unlabeled:
            break
        current = max(unlabeled, key=lambda p: pm.cost[p])
    else:
        if len(result.labels) < len(grid.points()):
            result.diagnostic = f"stopped after max_rounds={max_rounds} with unlabeled points"
    for p in grid.points():
        if p not in result.labels:
            result.cost[p] = result.rounds[-1][p]
    return result


@dataclass
class VQEPoint:
    params: np.ndarray
    energy: float
    state: StateVector
    seed: int
    n_iter: int
    cost_trace: list[float] = field(default_factory=list)


def vqe_warm_sweep(
    template,
    grid: GridSpec,
    cfg: SPSAConfig = SPSAConfig(),
    first_iters: int = 500,
    later_iters: int = 200,
    master_seed: int = 0,
) -> dict[Point, VQEPoint]:
    """VQE over the grid in serpentine order, each point warm-started from its predecessor."""
    out: dict[Point, VQEPoint] = {}
    prev = None
    for p in grid.serpentine():
        model = grid.model_at(template, p)
        h = build_model(model)
        seed = point_seed(master_seed, p, "vqe")
        iters = first_iters if prev is None else later_iters
        point_cfg = replace(cfg, max_iter=iters, seed=seed)
        init = random_init(2 * model.L, seed) if prev is None else prev
        record, state = run_vqe(h, point_cfg, init)
        out[p] = VQEPoint(record.final_params, record.converged_cost, state, seed, iters, record.cost_trace)
        prev = record.final_params
    return out


# --------------------------------------------------------------------------
# ground-truth comparison helpers


def boundary_points(labels: Mapping[Point, int], grid: GridSpec) -> set[Point]:
    """Points with a differently-labeled neighbour (8-neighbourhood)."""
    v1, v2 = grid.axis1[1], grid.axis2[1]
    out = set()
    for i, a in enumerate(v1):
        for j, b in enumerate(v2):
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    ii, jj = i + di, j + dj
                    if 0 <= ii < len(v1) and 0 <= jj < len(v2) and labels[(v1[ii], v2[jj])] != labels[(a, b)]:
                        out.add((a, b))
    return out


def label_agreement(found: Mapping[Point, int], truth: Mapping[Point, object], points) -> float:
    """Fraction of ``points`` on which ``found`` matches ``truth`` under the best relabeling."""
    points = list(points)
    if not points:
        return float("nan")
    f_ids = sorted({found.get(p, -1) for p in points})
    t_ids = sorted({truth[p] for p in points}, key=str)
    best = 0
    pad = max(len(f_ids), len(t_ids))
    targets = t_ids + [None] * (pad - len(t_ids))
    for perm in permutations(targets, len(f_ids)):
        mapping = dict(zip(f_ids, perm))
        best = max(best, sum(mapping[found.get(p, -1)] == truth[p] for p in points))
    return best / len(points)
