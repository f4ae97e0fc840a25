import math

import numpy as np
import pytest

from ntcp.device import TWO_PI
from ntcp.errors import ProtocolError
from ntcp.hilbert import make_space, qubit_register
from ntcp.metrics import operator_distance
from ntcp.propagator import (
    displacement_coeffs,
    ideal_ntcnot,
    ideal_ntcp,
    pair_phase_gate,
    u_prime,
    u_step1,
    u_total,
)
from ntcp.protocol import reference_protocol

D = TWO_PI * 90.09e6


def test_displacement_vanishes_after_one_period():
    tau = TWO_PI / D
    A, B = displacement_coeffs(0.5 * D, -D, tau)
    assert B == 0 and A.imag == 0
    # A(tau) = -g^2 tau / (4 delta)
    assert math.isclose(A.real, (0.5 * D) ** 2 * tau / (4 * D), rel_tol=1e-12)


def test_displacement_is_complex_midway():
    A, B = displacement_coeffs(0.5 * D, -D, math.pi / D)
    assert abs(B) > 0 and math.isclose(A.imag, abs(B) ** 2 / 2, rel_tol=1e-12)


def test_u_prime_unitary_at_any_time():
    s = make_space(2, 30)
    for t in (0.3 / D, math.pi / D, TWO_PI / D):
        u = u_prime(0.5 * D, -D, t, s).full.toarray()
        # away from the truncation edge the product is unitary
        cols = s.photon_columns(3)
        gram = u[:, cols].conj().T @ u[:, cols]
        assert np.allclose(gram, np.eye(len(cols)), atol=1e-9)


def test_u_prime_entangles_midway_and_not_at_tau():
    s = make_space(2, 20)
    vac = s.photon_columns(0)
    mid = u_prime(0.5 * D, -D, math.pi / D, s).full.toarray()
    end = u_prime(0.5 * D, -D, TWO_PI / D, s).full.toarray()
    photon = np.array([s.decode(i)[1] for i in range(s.dim)])
    assert np.abs(mid[photon > 0][:, vac]).max() > 1e-2
    assert np.abs(end[photon > 0][:, vac]).max() < 1e-14


def test_total_is_ideal_on_full_space():
    _, (P, _, _) = reference_protocol(3)
    s = make_space(4, 6)
    U = u_total(P, s).full
    ideal = np.kron(ideal_ntcp(3, s.register()).toarray(), np.eye(6))
    assert operator_distance(ideal, U) < 1e-10


def test_step1_reduction_check():
    s = make_space(2, 4)
    tau = TWO_PI / D
    with pytest.raises(ProtocolError):
        u_step1(112.3 * math.pi / tau, 10 * D, 0.1 * D, tau, s, m=112)


def test_ideal_gates():
    s = qubit_register(3)
    d = np.diag(ideal_ntcp(2, s).toarray()).real
    assert list(d) == [1, 1, 1, 1, 1, -1, -1, 1]
    cx = ideal_ntcnot(2, s).toarray()
    assert np.allclose(cx @ cx, np.eye(8)) and np.allclose(cx[:4, :4], np.eye(4))


def test_pair_phase_gate_is_cz_at_protocol_time():
    _, (P, _, _) = reference_protocol(2)
    s = qubit_register(3)
    g = pair_phase_gate(P.lam, P.tau, 2, s).toarray()
    ph = np.diag(g) / g[0, 0]
    assert np.allclose(ph, [1, 1, 1, 1, 1, 1, -1, -1], atol=1e-12)
