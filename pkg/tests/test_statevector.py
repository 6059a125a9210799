import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_state
from vqad.hamiltonians import PauliString
from vqad.statevector import (
    Gate,
    ParamCircuit,
    ShotHistogram,
    StateVector,
    cz,
    expectation_pauli_string,
    inject_state,
    marginal_probabilities,
    run_circuit,
    ry,
    ry_matrix,
    sample_measurements,
    schmidt_spectrum,
)

BELL = StateVector(2, np.array([1, 0, 0, 1]) / np.sqrt(2))
PLUS = StateVector(1, np.array([1, 1]) / np.sqrt(2))


def dense_gate(g: Gate, n: int, theta=None) -> np.ndarray:
    """Full 2^n matrix of a gate, built with Kronecker products (independent oracle)."""
    eye = np.eye(2)
    singles = {
        "X": np.array([[0, 1], [1, 0]]),
        "Y": np.array([[0, -1j], [1j, 0]]),
        "Z": np.diag([1, -1]),
    }
    if g.kind == "CZ":
        a, b = g.targets
        d = np.ones(2**n)
        for i in range(2**n):
            if (i >> (n - 1 - a)) & 1 and (i >> (n - 1 - b)) & 1:
                d[i] = -1
        return np.diag(d)
    m = ry_matrix(theta) if g.kind == "RY" else singles[g.kind]
    out = np.ones((1, 1))
    for q in range(n):
        out = np.kron(out, m if q == g.targets[0] else eye)
    return out


def test_empty_circuit_is_identity():
    out = run_circuit(StateVector.zero(2), ParamCircuit(2, [], 0), [])
    assert np.allclose(out.amplitudes, [1, 0, 0, 0])


def test_ry_pi_flips():
    out = run_circuit(StateVector.zero(1), ParamCircuit(1, [ry(0, param=0)], 1), [np.pi])
    assert abs(out.amplitudes[1]) == pytest.approx(1.0, abs=1e-15)
    assert out.amplitudes[1].real == pytest.approx(1.0)


def test_two_qubit_example():
    circ = ParamCircuit(2, [ry(0, param=0), ry(1, param=1), cz(0, 1)], 2)
    out = run_circuit(StateVector.zero(2), circ, [np.pi / 2, np.pi / 2])
    assert np.allclose(out.amplitudes, np.array([1, 1, 1, -1]) / 2)


@given(st.integers(2, 5), st.integers(0, 2**31 - 1))
def test_matches_dense_oracle(n, seed):
    rng = np.random.default_rng(seed)
    gates, k = [], 0
    for _ in range(12):
        kind = rng.choice(["RY", "CZ", "X", "Y", "Z"])
        if kind == "CZ":
            a, b = rng.choice(n, size=2, replace=False)
            gates.append(cz(int(a), int(b)))
        elif kind == "RY":
            gates.append(ry(int(rng.integers(n)), param=k))
            k += 1
        else:
            gates.append(Gate(str(kind), (int(rng.integers(n)),)))
    circ = ParamCircuit(n, gates, k)
    params = rng.uniform(-np.pi, np.pi, k)
    psi = random_state(rng, n)
    expected = psi.amplitudes.copy()
    for g in gates:
        theta = params[g.param] if g.kind == "RY" else None
        expected = dense_gate(g, n, theta) @ expected
    assert np.allclose(run_circuit(psi, circ, params).amplitudes, expected, atol=1e-12)


@given(st.integers(1, 8), st.integers(0, 2**31 - 1))
def test_norm_preserved(n, seed):
    rng = np.random.default_rng(seed)
    gates = [ry(q, param=q) for q in range(n)] + [cz(q, q + 1) for q in range(n - 1)]
    out = run_circuit(random_state(rng, n), ParamCircuit(n, gates, n), rng.normal(size=n))
    assert abs(np.linalg.norm(out.amplitudes) - 1) < 1e-12


def test_state_validation():
    with pytest.raises(ValueError):
        StateVector(2, np.ones(4))
    with pytest.raises(ValueError):
        StateVector(17, np.zeros(2))
    with pytest.raises(ValueError):
        inject_state(np.ones(6) / np.sqrt(6))


def test_inject_basis_vector():
    e0 = np.zeros(8)
    e0[0] = 1
    assert np.allclose(inject_state(e0).amplitudes, StateVector.zero(3).amplitudes)


def test_serialization_round_trip(tmp_path, rng):
    psi = random_state(rng, 4)
    assert np.array_equal(StateVector.from_bytes(psi.to_bytes()).amplitudes, psi.amplitudes)
    assert np.array_equal(StateVector.from_json(psi.to_json()).amplitudes, psi.amplitudes)
    psi.save(tmp_path / "a.state")
    assert np.array_equal(StateVector.load(tmp_path / "a.state").amplitudes, psi.amplitudes)


def test_deterministic_sample():
    hist = sample_measurements(StateVector.basis("10"), [0, 1], 1000, seed=3)
    assert hist.counts == {"10": 1000}


def test_born_rule_binomial():
    hist = sample_measurements(PLUS, [0], 10000, seed=11)
    assert abs(hist.counts.get("1", 0) / 10000 - 0.5) <= 3 * np.sqrt(0.25 / 10000)


def test_bell_outcomes():
    hist = sample_measurements(BELL, [0, 1], 2000, seed=5)
    assert set(hist.counts) <= {"00", "11"}


def test_sampling_is_seeded(rng):
    psi = random_state(rng, 5)
    a = sample_measurements(psi, [1, 3], 500, seed=9)
    b = sample_measurements(psi, [1, 3], 500, seed=9)
    assert a.counts == b.counts


def test_histogram_validation():
    with pytest.raises(ValueError):
        ShotHistogram((0, 1), {"0": 5}, 5)
    with pytest.raises(ValueError):
        ShotHistogram((0,), {"0": 5}, 6)
    h = ShotHistogram((0, 1), {"01": 3, "11": 1}, 4)
    assert np.allclose(h.frequencies(), [0, 0.75, 0, 0.25])
    assert ShotHistogram.from_json(h.to_json()) == h


def test_marginal_sums(rng):
    psi = random_state(rng, 4)
    m = marginal_probabilities(psi.probabilities, 4, (2, 0))
    assert m.sum() == pytest.approx(1.0)
    # qubit order matters: outcome index bit for qubit 2 is the most significant
    p = psi.probabilities.reshape(2, 2, 2, 2)
    assert m[0b10] == pytest.approx(p[0, :, 1, :].sum())


@pytest.mark.parametrize(
    "state, letters, expected",
    [
        (StateVector.zero(1), {0: "Z"}, 1.0),
        (PLUS, {0: "X"}, 1.0),
        (BELL, {0: "Z", 1: "Z"}, 1.0),
        (BELL, {0: "X", 1: "X"}, 1.0),
        (BELL, {0: "Y", 1: "Y"}, -1.0),
    ],
)
def test_pauli_expectation_examples(state, letters, expected):
    assert expectation_pauli_string(state, PauliString(1.0, letters)) == pytest.approx(expected)


@given(st.integers(0, 2**31 - 1))
def test_pauli_expectation_vs_dense(seed):
    rng = np.random.default_rng(seed)
    n = 4
    psi = random_state(rng, n)
    letters = {q: str(rng.choice(list("XYZ"))) for q in rng.choice(n, size=rng.integers(1, n + 1), replace=False)}
    mats = {"X": np.array([[0, 1], [1, 0]]), "Y": np.array([[0, -1j], [1j, 0]]), "Z": np.diag([1, -1])}
    op = np.ones((1, 1))
    for q in range(n):
        op = np.kron(op, mats[letters[q]] if q in letters else np.eye(2))
    expected = np.vdot(psi.amplitudes, op @ psi.amplitudes).real * 0.7
    assert expectation_pauli_string(psi, PauliString(0.7, letters)) == pytest.approx(expected, abs=1e-12)


def test_schmidt_examples():
    assert np.allclose(schmidt_spectrum(StateVector.basis("01"), 1).squared_coefficients, [1.0])
    assert np.allclose(schmidt_spectrum(BELL, 1).squared_coefficients, [0.5, 0.5])


@given(st.integers(0, 2**31 - 1), st.integers(1, 4))
def test_schmidt_normalized(seed, cut):
    psi = random_state(np.random.default_rng(seed), 5)
    w = schmidt_spectrum(psi, cut).squared_coefficients
    assert abs(w.sum() - 1) < 1e-8
    assert np.all(np.diff(w) <= 1e-15)


def test_schmidt_bad_cut():
    with pytest.raises(ValueError):
        schmidt_spectrum(BELL, 2)


def test_circuit_validation():
    with pytest.raises(ValueError):
        ParamCircuit(2, [ry(0, param=1)], 1)
    with pytest.raises(ValueError):
        cz(1, 1)
    circ = ParamCircuit(1, [ry(0, param=0)], 1)
    with pytest.raises(ValueError):
        run_circuit(StateVector.zero(1), circ, [0.1, 0.2])
