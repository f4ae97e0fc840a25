import math

import numpy as np
import pytest
from scipy.linalg import expm

from ntcp.errors import IntegrationError
from ntcp.hamiltonian import TimeDependentHamiltonian
from ntcp.hilbert import QuantumState, cavity_op, make_space, matexp, pauli, qubit_register
from ntcp.integrator import IntegratorConfig, convergence_order, evolve_state, propagator_of


def driven_qubit():
    s = qubit_register(1)
    w = 2.0
    x = pauli(1, "x", s)
    # cos(w t) sigma_x as two carriers
    return TimeDependentHamiltonian(s, pauli(1, "z", s), [(w, 0.5 * x), (-w, 0.5 * x)])


def test_zero_hamiltonian_is_identity():
    s = make_space(1, 3)
    U = propagator_of(TimeDependentHamiltonian(s), 0.0, 1.0)
    assert np.allclose(U.toarray(), np.eye(6))


@pytest.mark.parametrize("method", ["piecewise-exponential", "magnus4", "rk4"])
def test_static_matches_expm(method):
    s = make_space(1, 4)
    h = pauli(1, "x", s) + 0.3 * cavity_op("number", s)
    cfg = IntegratorConfig(method, step=1e-3)
    U = propagator_of(TimeDependentHamiltonian.constant(h), 0.0, 1.7, cfg)
    assert np.abs(U.toarray() - expm(-1.7j * h.toarray())).max() < 1e-9


def test_cavity_phase():
    s = make_space(1, 5)
    w = 3.0
    U = propagator_of(TimeDependentHamiltonian.constant(w * cavity_op("number", s)), 0.0, 0.4)
    assert np.allclose(np.diag(U.toarray())[:5], np.exp(-1j * w * 0.4 * np.arange(5)))


@pytest.mark.parametrize("method,order,tol", [("rk4", 4, 0.3), ("magnus4", 4, 0.3),
                                              ("piecewise-exponential", 2, 0.3)])
def test_convergence_order(method, order, tol):
    H = driven_qubit()
    psi = QuantumState.pure(H.space, np.array([1.0, 0.0]))
    est = convergence_order(H, psi, 3.0, IntegratorConfig(method), halvings=4, base_step=0.1)
    assert abs(est.order - order) < tol


def test_static_exact_order():
    s = qubit_register(1)
    H = TimeDependentHamiltonian.constant(pauli(1, "x", s))
    psi = QuantumState.pure(s, np.array([1.0, 0.0]))
    assert convergence_order(H, psi, 1.0, IntegratorConfig("piecewise-exponential"), base_step=0.1).exact


def test_norm_violation_raises():
    H = driven_qubit()
    with pytest.raises(IntegrationError):
        propagator_of(H, 0.0, 10.0, IntegratorConfig("rk4", step=2.0, use_periodicity=False))


def test_step_budget():
    H = driven_qubit()
    with pytest.raises(IntegrationError):
        propagator_of(H, 0.0, 10.0, IntegratorConfig("rk4", step=1e-3, max_steps=100))


def test_periodic_stacking_agrees():
    H = driven_qubit()
    T = H.period
    a = propagator_of(H, 0.0, 7 * T, IntegratorConfig("magnus4", step=T / 200))
    b = propagator_of(H, 0.0, 7 * T, IntegratorConfig("magnus4", step=T / 200, use_periodicity=False))
    assert np.abs(a.toarray() - b.toarray()).max() < 1e-9


def test_ensemble_evolution():
    H = driven_qubit()
    U = propagator_of(H, 0.0, 1.3).toarray()
    mixed = QuantumState.ensemble(H.space, [(0.25, np.array([1.0, 0.0])), (0.75, np.array([0.0, 1.0]))])
    out = evolve_state(H, mixed, 0.0, 1.3)
    (w0, v0), (w1, v1) = out.members
    assert (w0, w1) == (0.25, 0.75)
    assert np.allclose(v0, U[:, 0]) and np.allclose(v1, U[:, 1])


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig("euler")
    with pytest.raises(ValueError):
        IntegratorConfig(step=-1.0)
