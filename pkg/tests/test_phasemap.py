import numpy as np
import pytest
from hypothesis import given, strategies as st

from vqad.grid import GridSpec, point_seed
from vqad.hamiltonians import DEBHMParams, TLFIParams
from vqad.observables import staggered_magnetization
from vqad.oracle import solve_model
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
from vqad.variational import SPSAConfig

FAST = SPSAConfig(max_iter=60)


def test_grid_basics():
    g = GridSpec.linspace("g_x", 0.1, 0.5, 3, "g_z", 0, 1, 2)
    assert g.shape == (3, 2)
    assert g.points()[:2] == [(0.1, 0.0), (0.1, 1.0)]
    assert g.snap((0.3, 1.0)) == (0.3, 1.0)
    assert g.nearest((0.33, 0.4)) == (0.3, 0.0)
    with pytest.raises(ValueError):
        g.index((0.25, 0.0))
    assert GridSpec.from_json(g.to_json()) == g


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec(("g_x", (0.1, 0.1)), ("g_z", (0.0,)))
    with pytest.raises(ValueError):
        GridSpec(("g_x", (0.1,)), ("g_x", (0.0,)))
    with pytest.raises(ValueError):
        GridSpec(("g_x", ()), ("g_z", (0.0,)))
    g = GridSpec(("g_x", (0.1,)), ("h", (0.0,)))
    with pytest.raises(ValueError):
        g.model_at(TLFIParams(3), (0.1, 0.0))


def test_serpentine_visits_each_point_once_with_unit_steps():
    g = GridSpec.linspace("g_x", 0, 1, 4, "g_z", 0, 1, 3)
    path = list(g.serpentine())
    assert sorted(path) == sorted(g.points())
    for p, q in zip(path, path[1:]):
        (i, j), (k, m) = g.index(p), g.index(q)
        assert abs(i - k) + abs(j - m) == 1


@given(st.integers(0, 10**6), st.floats(-5, 5), st.floats(-5, 5))
def test_point_seed_stable(master, a, b):
    assert point_seed(master, (a, b), "x") == point_seed(master, (a, b), "x")
    assert point_seed(master, (a, b), "x") != point_seed(master, (a, b), "y")


def test_single_point_grid_reproduces_training_cost():
    g = GridSpec(("g_x", (0.3,)), ("g_z", (0.0,)))
    pm = anomaly_sweep(TLFIParams(4), g, (0.3, 0.0), settings=SyndromeSettings(eval_shots=None, restarts=1), cfg=FAST)
    assert pm.cost[(0.3, 0.0)] == pytest.approx(pm.records[0].converged_cost, abs=1e-12)


def test_sweep_reproducible_and_csv(tmp_path):
    g = GridSpec.linspace("g_x", 0.2, 1.6, 3, "g_z", 0, 0, 1)
    kw = dict(settings=SyndromeSettings(restarts=1), cfg=FAST, master_seed=11)
    a = anomaly_sweep(TLFIParams(4), g, (0.2, 0.0), **kw)
    b = anomaly_sweep(TLFIParams(4), g, (0.2, 0.0), **kw)
    assert a.cost == b.cost
    a.write_csv(tmp_path / "a.csv")
    b.write_csv(tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    header = (tmp_path / "a.csv").read_text().splitlines()[0]
    assert header == "axis1,axis2,cost,label,S,provenance,seed"


def test_states_independent_of_workers():
    g = GridSpec.linspace("dJ", -0.5, 0.5, 2, "V", 0, 2, 2)
    s1 = oracle_states(DEBHMParams(6), g, workers=1)
    s2 = oracle_states(DEBHMParams(6), g, workers=2)
    for p in g.points():
        assert np.array_equal(s1[p].amplitudes, s2[p].amplitudes)


def test_one_phase_grid_gets_one_label():
    # deep in the ferromagnetic phase every point is the same product-like state
    g = GridSpec.linspace("g_x", 0.05, 0.15, 3, "g_z", 0.5, 0.7, 2)
    pm = discover_phases(
        TLFIParams(4), g, (0.05, 0.5), settings=SyndromeSettings(eval_shots=None, restarts=2), cfg=SPSAConfig(max_iter=200)
    )
    assert set(pm.labels.values()) == {0}
    assert len(pm.training_points) == 1


def test_train_restarts_keeps_best():
    psi = solve_model(TLFIParams(4, g_x=1.0)).state
    one = train_restarts(psi, (1, 2), FAST, 0, (1.0, 0.0), restarts=1)
    three = train_restarts(psi, (1, 2), FAST, 0, (1.0, 0.0), restarts=3)
    assert three.converged_cost <= one.converged_cost
    assert three.extra["restarts"] == 3


def test_boundary_points():
    g = GridSpec.linspace("a", 0, 3, 4, "b", 0, 0, 1)
    labels = {p: int(p[0] >= 2) for p in g.points()}
    assert boundary_points(labels, g) == {(1.0, 0.0), (2.0, 0.0)}


def test_label_agreement_uses_best_relabeling():
    pts = [(0, 0), (1, 0), (2, 0), (3, 0)]
    truth = dict(zip(pts, ["MI", "MI", "CDW", "TMI"]))
    assert label_agreement(dict(zip(pts, [2, 2, 0, 1])), truth, pts) == 1.0
    assert label_agreement(dict(zip(pts, [0, 0, 0, 1])), truth, pts) == 0.75
    assert np.isnan(label_agreement({}, truth, []))


def test_vqe_warm_sweep_bounds_and_sign():
    g = GridSpec.linspace("g_x", 0.1, 0.4, 3, "g_z", 0.5, 0.5, 1)
    out = vqe_warm_sweep(TLFIParams(4, boundary="open"), g, SPSAConfig(), first_iters=300, later_iters=100)
    for p, r in out.items():
        e0 = solve_model(g.model_at(TLFIParams(4, boundary="open"), p)).energy
        assert r.energy >= e0 - 1e-9
        assert r.n_iter == (300 if p == (0.1, 0.5) else 100)
    signs = {np.sign(staggered_magnetization(r.state)) for r in out.values()}
    assert len(signs) == 1
