import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import unitary_group

from ntcp.hilbert import OperatorMatrix, cavity_state, make_space, qubit_register
from ntcp.metrics import (
    avg_gate_fidelity,
    cavity_insensitivity_suite,
    extract_qubit_gate,
    gate_fidelity,
    hadamard_conjugate,
    operator_distance,
)
from ntcp.propagator import ideal_ntcp

seeds = st.integers(0, 2**31 - 1)


@settings(max_examples=30, deadline=None)
@given(seeds, st.floats(0, 2 * np.pi))
def test_global_phase_invariance(seed, theta):
    u = unitary_group.rvs(4, random_state=seed)
    assert abs(gate_fidelity(u, np.exp(1j * theta) * u) - 1) < 1e-12
    assert operator_distance(u, np.exp(1j * theta) * u) < 1e-12


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    a, b, v = (unitary_group.rvs(4, random_state=rng) for _ in range(3))
    assert abs(gate_fidelity(a, b) - gate_fidelity(v @ a, v @ b)) < 1e-12
    assert 0 <= gate_fidelity(a, b) <= 1


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_extraction_roundtrip(seed):
    rng = np.random.default_rng(seed)
    G = unitary_group.rvs(4, random_state=rng)
    V = unitary_group.rvs(5, random_state=rng)
    space = make_space(2, 5)
    U = OperatorMatrix.build(space, np.kron(G, V))
    gate, leak = extract_qubit_gate(U, cavity_state("fock(1)", 5))
    assert leak < 1e-10
    assert abs(gate_fidelity(G, gate) - 1) < 1e-10


def test_entangling_map_leaks():
    space = make_space(1, 2)
    # CNOT with the cavity as target: maximal leakage for a superposed qubit
    U = OperatorMatrix.build(space, np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]))
    _, leak = extract_qubit_gate(U, cavity_state("vacuum", 2))
    assert abs(leak - 0.5) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.floats(0, np.pi))
def test_controlled_phase_fidelity(eps):
    cz = np.diag([1, 1, 1, -1]).astype(complex)
    u = np.diag([1, 1, 1, -np.exp(1j * eps)])
    expected = abs(3 + np.exp(1j * eps)) ** 2 / 16
    assert abs(gate_fidelity(cz, u) - expected) < 1e-12
    assert abs(avg_gate_fidelity(cz, u) - (4 * expected + 1) / 5) < 1e-12


def test_column_restricted_distance():
    a = np.eye(4)
    b = np.diag([1, 1, -1, -1])
    assert operator_distance(a, b, columns=[0, 1]) < 1e-15
    assert operator_distance(a, b) > 1


def test_suite_on_ideal_product():
    space = make_space(3, 14)
    ideal = ideal_ntcp(2, space.register())
    U = OperatorMatrix.build(space, np.kron(ideal.toarray(), np.eye(14)))
    rep = cavity_insensitivity_suite(U, ideal)
    assert rep.spread < 1e-12 and rep.leakage < 1e-12
    assert {row[0] for row in rep.per_state} == {"vacuum", "fock(3)", "coherent(1)", "thermal(0.5)"}


def test_hadamard_conjugate_is_involutive():
    s = qubit_register(3)
    u = ideal_ntcp(2, s)
    assert np.allclose(hadamard_conjugate(2, hadamard_conjugate(2, u)).toarray(), u.toarray())
