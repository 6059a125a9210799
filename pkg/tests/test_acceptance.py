"""End-to-end acceptance runs at their stated tolerances.

Each test appends one PASS/FAIL line to ``conftest.ACCEPTANCE_LINES`` (echoed in
the terminal summary) before asserting, so a red criterion still reports its
numbers.  Select with ``pytest -m acceptance``.
"""

import time

import numpy as np
import pytest

import conftest
from conftest import random_state
from vqad.checks import run_checks
from vqad.grid import GridSpec
from vqad.hamiltonians import DEBHMParams, TLFIParams
from vqad.noise import NoiseModel, build_calibration_matrix, mitigate_counts, noisy_execute
from vqad.observables import debhm_phase, ground_truth_row, staggered_magnetization
from vqad.oracle import grid_ground_states, solve_model
from vqad.phasemap import (
    SyndromeSettings,
    anomaly_sweep,
    boundary_points,
    discover_phases,
    label_agreement,
    oracle_states,
    train_restarts,
    vqe_warm_sweep,
)
from vqad.statevector import sample_measurements
from vqad.variational import (
    SPSAConfig,
    build_syndrome_circuit,
    cost_from_counts,
    cost_from_expectations,
    default_trash_sites,
)

pytestmark = pytest.mark.acceptance

SPSA = SPSAConfig(max_iter=500)
DEBHM_L = 8
PHASE_POINTS = {"MI": (-0.675, 0.5), "CDW": (0.0, 4.0), "TMI": (0.675, 0.5)}


def report(n, name, passed, detail):
    line = f"[criterion {n}] {'PASS' if passed else 'FAIL'} {name}: {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


@pytest.fixture(scope="module")
def debhm():
    grid = GridSpec.linspace("dJ", -0.9, 0.9, 9, "V", 0.0, 4.0, 9)
    sols = grid_ground_states(DEBHMParams(DEBHM_L), grid)
    states = {p: s.state for p, s in sols.items()}
    rows = {p: ground_truth_row(states[p]) for p in grid.points()}
    truth = {p: debhm_phase(rows[p], DEBHM_L) for p in grid.points()}
    inner = [p for p in grid.points() if p not in boundary_points(truth, grid)]
    return grid, states, rows, truth, inner


def _phase_means(pm, truth, inner, phase):
    inside = np.mean([pm.cost[p] for p in inner if truth[p] == phase])
    outside = np.mean([pm.cost[p] for p in inner if truth[p] != phase])
    return inside, outside


def test_criterion_1_cost_forms():
    rng = np.random.default_rng(2024)
    shots, hits = 10_000, 0
    for k in range(50):
        psi = random_state(rng, 6)
        trash = tuple(sorted(rng.choice(6, size=2, replace=False)))
        diff = abs(cost_from_counts(sample_measurements(psi, trash, shots, 100 + k)) - cost_from_expectations(psi, trash))
        hits += diff <= 3 * np.sqrt(len(trash) / 4 / shots)
    report(1, "cost forms", hits >= 48, f"{hits}/50 within 3 sigma (need >= 95%)")


def test_criterion_2_trainability_scaling():
    costs, cats = {}, {}
    for L in (3, 4, 8, 16):
        trash = default_trash_sites(L)
        psi = solve_model(TLFIParams(L, g_x=0.3), "+", 1e-2).state
        costs[L] = train_restarts(psi, trash, SPSA, 0, (0.3, 0.0), restarts=2).converged_cost
        if L <= 8:
            # the symmetric (cat) ground state, for information only
            cat = solve_model(TLFIParams(L, g_x=0.3)).state
            cats[L] = train_restarts(cat, trash, SPSA, 0, (0.3, 0.0), restarts=2).converged_cost
    detail = ", ".join(f"L={L}: {c:.4f}" for L, c in costs.items())
    detail += " | cat states: " + ", ".join(f"L={L}: {c:.4f}" for L, c in cats.items())
    report(2, "trainability scaling", all(c <= 0.01 for c in costs.values()), detail)


def test_criterion_3_tlfi_boundary():
    start = time.perf_counter()
    g_x = tuple(np.round(np.linspace(0.1, 2.0, 20), 12))
    grid = GridSpec(("g_x", g_x), ("g_z", (0.0,)))
    template = TLFIParams(8)
    states = oracle_states(template, grid)
    pm = anomaly_sweep(template, grid, (0.3, 0.0), settings=SyndromeSettings(restarts=4), cfg=SPSA, states=states)
    cost = pm.cost_array()[:, 0]
    x = np.array(g_x)
    k = int(np.argmax(np.diff(cost)))
    rise = (x[k] + x[k + 1]) / 2
    plateau = cost[x >= 1.3].mean()
    ordered = cost[x <= 0.6].mean()
    ok = 0.8 <= rise <= 1.2 and plateau >= 0.5 and plateau >= 5 * ordered
    detail = (
        f"steepest rise at g_x={rise:.2f}, paramagnetic plateau {plateau:.3f}, ordered mean {ordered:.3f}, "
        f"training cost {pm.records[0].converged_cost:.4f}, {time.perf_counter() - start:.0f}s"
    )
    report(3, "TLFI boundary", ok, detail)


def test_criterion_4_debhm_three_phases(debhm):
    grid, states, _, truth, inner = debhm
    template = DEBHMParams(DEBHM_L)
    settings = SyndromeSettings(n_trash=2, restarts=4)
    ok, parts = True, []
    for phase, point in PHASE_POINTS.items():
        pm = anomaly_sweep(template, grid, point, settings=settings, cfg=SPSA, states=states)
        inside, outside = _phase_means(pm, truth, inner, phase)
        good = inside <= 0.1 and outside >= 3 * inside
        ok &= good
        parts.append(f"{phase} in {inside:.3f} out {outside:.3f} ({'ok' if good else 'miss'})")
    found = discover_phases(template, grid, PHASE_POINTS["MI"], settings=settings, cfg=SPSA, states=states)
    n_labels = len(set(found.labels.values()))
    agree = label_agreement(found.labels, truth, inner)
    ok &= n_labels == 3 and agree >= 0.9
    parts.append(f"discover: {n_labels} labels, agreement {agree:.3f} on {len(inner)} interior points")
    report(4, "DEBHM three phases", ok, "; ".join(parts))


def test_criterion_5_ground_truth_observables(debhm):
    grid, _, rows, truth, inner = debhm
    o_cdw = {p: abs(r["O_CDW"]) for p, r in rows.items()}
    top = max(o_cdw, key=o_cdw.get)
    large_v = top[1] == max(grid.axis2[1])
    elsewhere = max(o_cdw[p] for p in inner if truth[p] != "CDW")
    small_des = [p for p, r in rows.items() if abs(r["D_ES"]) <= 0.05]
    # "small V" is read as: outside the large-V (CDW) region of the partition
    des_ok = bool(small_des) and all(p[0] > 0 and truth[p] != "CDW" for p in small_des)
    ok = large_v and elsewhere <= 0.1 and des_ok
    v_range = (min(p[1] for p in small_des), max(p[1] for p in small_des)) if small_des else (None, None)
    detail = (
        f"max |O_CDW| {o_cdw[top]:.3f} at {top}; max |O_CDW| at interior non-CDW points {elsewhere:.3f} (need <= 0.1); "
        f"{len(small_des)} points with |D_ES| <= 0.05, all dJ > 0: {all(p[0] > 0 for p in small_des)}, V range {v_range}"
    )
    report(5, "ground-truth observables", ok, detail)


def test_criterion_6_noise_robustness(debhm):
    grid, states, _, truth, inner = debhm
    settings = SyndromeSettings(n_trash=2, restarts=1)
    ok, parts = True, []
    for p2 in (0.01, 0.07):
        pm = anomaly_sweep(
            DEBHMParams(DEBHM_L), grid, PHASE_POINTS["MI"], settings=settings,
            noise=NoiseModel(0.001, p2), cfg=SPSA, states=states,
        )
        train = pm.records[0].converged_cost
        inside, outside = _phase_means(pm, truth, inner, "MI")
        ok &= train > 0
        if p2 == 0.01:
            ok &= outside >= 2 * inside
        parts.append(f"p2={p2}: training cost {train:.3f}, MI in {inside:.3f} out {outside:.3f} ratio {outside / inside:.2f}")
    report(6, "noise robustness", ok, "; ".join(parts))


def test_criterion_7_vqe_fidelity():
    template = TLFIParams(5, boundary="open")
    grid = GridSpec(("g_x", (0.1, 0.6, 1.2, 1.8)), ("g_z", (0.0, 0.5, 1.0)))
    sweep = vqe_warm_sweep(template, grid, SPSAConfig(), master_seed=0)
    errors = {}
    for p, r in sweep.items():
        exact = solve_model(grid.model_at(template, p)).energy
        errors[p] = abs(r.energy - exact) / abs(exact)
    worst = max(errors, key=errors.get)
    s_deep = staggered_magnetization(sweep[(0.1, 0.0)].state)
    ok = errors[worst] <= 0.05 and abs(s_deep) >= 0.8
    detail = f"max energy error {errors[worst]:.2%} at {worst}; <S>(0.1, 0) = {s_deep:+.3f} (sign {'+' if s_deep > 0 else '-'})"
    report(7, "VQE fidelity", ok, detail)


def test_criterion_8_mitigation():
    L, trash = 5, (1, 2)
    psi = solve_model(TLFIParams(L, g_x=0.3, boundary="open"), "+", 1e-2).state
    rec = train_restarts(psi, trash, SPSAConfig(max_iter=300), 0, (0.3, 0.0), 1)
    circuit, _ = build_syndrome_circuit(L, trash)
    noise = NoiseModel.symmetric_readout(0.02, L)
    pairs = []
    for s in range(10):
        raw = noisy_execute(psi, circuit, rec.final_params, trash, 1000, noise, 1000 + s)
        cal = build_calibration_matrix(noise, trash, 1000, seed=2000 + s, n_qubits=L)
        pairs.append((raw.frequencies()[0], mitigate_counts(raw, cal).prob("00")))
    ok = all(m > r for r, m in pairs)
    raw_lo, raw_hi = min(r for r, _ in pairs), max(r for r, _ in pairs)
    mit_lo = min(m for _, m in pairs)
    detail = f"raw P(00) {raw_lo:.3f}-{raw_hi:.3f}, mitigated min {mit_lo:.3f}, improved on {sum(m > r for r, m in pairs)}/10 seeds"
    report(8, "readout mitigation", ok, detail)


def test_criterion_9_invariants():
    results = [r for seed in range(5) for r in run_checks(seed)]
    failed = sorted({r.name for r in results if not r.passed})
    names = sorted({r.name for r in results})
    detail = f"{len(results) - len([r for r in results if not r.passed])}/{len(results)} checks over 5 seeds" + (
        f"; failing: {failed}" if failed else f" ({', '.join(names)})"
    )
    report(9, "invariant suite", not failed, detail)
