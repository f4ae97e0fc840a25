import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ntcp.errors import SpaceError, TruncationError
from ntcp.hilbert import (
    HilbertSpace,
    basis_state,
    cavity_op,
    cavity_state,
    coherent_state,
    collective,
    commutator,
    identity,
    make_space,
    matexp,
    pauli,
    product_state,
    qubit_register,
    thermal_state,
)


def test_dimensions_and_policy():
    s = make_space(3, 10)
    assert s.dim == 80 and s.qubit_dim == 8 and s.has_cavity and not s.sparse
    assert make_space(6, 40).sparse
    assert qubit_register(2).dim == 4
    with pytest.raises(SpaceError):
        make_space(0, 4)
    with pytest.raises(SpaceError):
        make_space(2, 1)


@given(st.integers(1, 4), st.integers(2, 6), st.data())
def test_index_decode_roundtrip(n, nf, data):
    s = make_space(n, nf)
    i = data.draw(st.integers(0, s.dim - 1))
    bits, photon = s.decode(i)
    assert s.index(bits, photon) == i


def test_qubit_one_is_most_significant():
    s = make_space(2, 3)
    assert s.index((1, 0), 0) == 6
    assert s.index((0, 1), 2) == 5


def test_pauli_conventions():
    s = qubit_register(1)
    z = pauli(1, "z", s).toarray()
    assert np.allclose(z, np.diag([1, -1]))
    plus = pauli(1, "plus", s).toarray()
    # S+ = |1><0|
    assert plus[1, 0] == 1 and plus[0, 1] == 0
    x = pauli(1, "x", s).toarray()
    assert np.allclose(x, plus + plus.T)


def test_collective_and_embedding():
    s = make_space(3, 4)
    sz = collective("S_z", [2, 3], s)
    assert np.allclose(sz.toarray(), (pauli(2, "z", s) + pauli(3, "z", s)).toarray())
    assert sz.is_hermitian()
    with pytest.raises(SpaceError):
        collective("S_z", [], s)
    with pytest.raises(SpaceError):
        pauli(4, "z", s)


def test_cavity_commutator_truncated():
    s = make_space(1, 6)
    a, ad = cavity_op("annihilate", s), cavity_op("create", s)
    c = commutator(a, ad).toarray()
    # [a, a^dag] = 1 except at the truncation edge
    d = np.diag(c).real.reshape(2, 6)
    assert np.allclose(d[:, :-1], 1) and np.allclose(d[:, -1], -5)


@settings(max_examples=25)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_matexp_unitary_and_consistent(t, u):
    s = make_space(2, 3)
    h = t * pauli(1, "x", s) + u * (collective("S_z", [1, 2], s) @ (cavity_op("annihilate", s) + cavity_op("create", s)))
    U = matexp(h, -1j)
    assert U.is_unitary(1e-10)
    from scipy.linalg import expm
    assert np.allclose(U.toarray(), expm(-1j * h.toarray()), atol=1e-10)


def test_matexp_rejects_nonfinite():
    s = qubit_register(1)
    with pytest.raises(ValueError):
        matexp(pauli(1, "z", s) * np.nan, -1j)


def test_coherent_thermal_states():
    c = coherent_state(12, 1.0)
    assert c.norm_error() < 1e-12
    n_mean = np.vdot(c.vector, np.arange(12) * c.vector).real
    assert abs(n_mean - 1.0) < 1e-5
    th = thermal_state(14, 0.5)
    assert th.kind == "mixed"
    assert abs(sum(w * k for (w, v), k in zip(th.members, range(len(th.members)))) - 0.5) < 1e-4
    with pytest.raises(TruncationError):
        thermal_state(8, 0.5)
    with pytest.raises(TruncationError):
        coherent_state(4, 2.0)
    assert np.allclose(cavity_state("vacuum", 5).vector, cavity_state("fock(0)", 5).vector)
    with pytest.raises(ValueError):
        cavity_state("squeezed(1)", 5)


def test_product_state_and_basis():
    s = make_space(2, 3)
    b = basis_state(s, (1, 0), 2)
    assert b.vector[s.index((1, 0), 2)] == 1
    ps = product_state(s, np.array([0, 0, 1, 0]), cavity_state("fock(2)", 3))
    assert np.allclose(ps.vector, b.vector)
    assert np.isclose(identity(s).expect(ps), 1)
