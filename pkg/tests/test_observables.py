import numpy as np
import pytest
from hypothesis import given, strategies as st

from vqad.hamiltonians import DEBHMParams
from vqad.observables import (
    cdw_order_parameter,
    debhm_phase,
    es_degeneracy,
    ground_truth_row,
    site_densities,
    staggered_magnetization,
)
from vqad.oracle import solve_model
from vqad.statevector import StateVector, schmidt_spectrum


def test_staggered_examples():
    assert staggered_magnetization(StateVector.basis("10101")) == pytest.approx(1.0)
    assert staggered_magnetization(StateVector.basis("01010")) == pytest.approx(-1.0)
    uniform = StateVector(4, np.ones(16) / 4)
    assert abs(staggered_magnetization(uniform)) < 1e-10


def test_densities():
    assert site_densities(StateVector.basis("1"))[0] == pytest.approx(1.0)
    psi = StateVector(2, np.array([0, 1, 1, 0]) / np.sqrt(2))
    assert np.allclose(site_densities(psi), [0.5, 0.5])


def test_cdw_examples():
    assert cdw_order_parameter(np.full(8, 0.5), 0.5) == 0.0
    assert cdw_order_parameter(np.tile([1.0, 0.0], 6), 0.5) == pytest.approx(-3.0)
    with pytest.raises(ValueError):
        cdw_order_parameter(np.ones(5))


@given(st.lists(st.floats(0, 1), min_size=2, max_size=12).filter(lambda v: len(v) % 2 == 0))
def test_cdw_bounded(profile):
    assert abs(cdw_order_parameter(profile)) <= len(profile) / 2 + 1e-12


def test_es_examples():
    assert es_degeneracy(np.array([0.5, 0.5])) == pytest.approx(0.0)
    assert es_degeneracy(np.array([1.0])) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        es_degeneracy(np.array([]))


@given(st.integers(0, 2**31 - 1))
def test_es_in_unit_interval(seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=64) + 1j * rng.normal(size=64)
    d = es_degeneracy(schmidt_spectrum(StateVector(6, v / np.linalg.norm(v)), 3))
    assert -1e-12 <= d <= 1 + 1e-12


def test_debhm_oracle_patterns():
    cdw = ground_truth_row(solve_model(DEBHMParams(8, 1.0, 0.5, 4.0)).state)
    weak_tmi = ground_truth_row(solve_model(DEBHMParams(8, 1.0, 0.5, 0.5)).state)
    deep_tmi = ground_truth_row(solve_model(DEBHMParams(8, 1.0, 0.9, 0.5)).state)
    mi = ground_truth_row(solve_model(DEBHMParams(8, 1.0, -0.5, 0.5)).state)
    assert abs(cdw["O_CDW"]) >= 0.5
    assert abs(weak_tmi["O_CDW"]) <= 0.1
    # frozen from an independent occupation-basis diagonalization
    assert weak_tmi["D_ES"] == pytest.approx(0.2173, abs=5e-4)
    assert abs(deep_tmi["D_ES"]) <= 0.05
    assert abs(mi["D_ES"]) >= 0.3
    assert debhm_phase(cdw, 8) == "CDW"
    assert debhm_phase(weak_tmi, 8) == "TMI"
    assert debhm_phase(mi, 8) == "MI"


@pytest.mark.xfail(strict=True, reason="finite-size splitting at L=8: the middle-cut D_ES is 0.217 at dJ=0.5")
def test_es_vanishes_at_moderate_dimerization():
    row = ground_truth_row(solve_model(DEBHMParams(8, 1.0, 0.5, 0.5)).state)
    assert abs(row["D_ES"]) <= 0.05


@given(st.integers(0, 2**31 - 1))
def test_staggered_bounded(seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=32) + 1j * rng.normal(size=32)
    assert abs(staggered_magnetization(StateVector(5, v / np.linalg.norm(v)))) <= 1 + 1e-12
