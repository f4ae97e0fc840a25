import math

import numpy as np
import pytest

from ntcp.device import PLANCK, TWO_PI, QubitKnobs, decoupled_knobs, reference_device
from ntcp.hamiltonian import (
    StepHamiltonianSpec,
    TimeDependentHamiltonian,
    accumulated_residual,
    exact_dressed_terms,
    full_hamiltonian,
    h1,
    h2,
    h2_dressed,
    h_eff,
    h_step3,
    interaction_hamiltonian,
)
from ntcp.hilbert import make_space, pauli, qubit_register

D = TWO_PI * 90.09e6


def test_hermitian_at_all_times():
    s = make_space(3, 4)
    spec = StepHamiltonianSpec(math.pi, D, 0.5 * D, 10 * D, (2, 3))
    for H in (interaction_hamiltonian(spec, s), h2_dressed(spec, s), h2(spec, s)):
        for t in np.linspace(0, 3e-8, 7):
            assert H.hermiticity_error(t) < 1e-6 * D


def test_period_detection():
    s = make_space(1, 3)
    spec = StepHamiltonianSpec(0.0, -D, D, 5 * D, (1,))
    assert math.isclose(h2_dressed(spec, s).period, TWO_PI / D)
    assert TimeDependentHamiltonian(s).period is None


def test_spec_validation():
    with pytest.raises(ValueError):
        StepHamiltonianSpec(0.0, 0.0, 1.0, 1.0, (1,))
    with pytest.raises(ValueError):
        StepHamiltonianSpec(0.3, D, 1.0, 1.0, (1,))


def test_h1_sign_follows_phase():
    s = qubit_register(2)
    a = h1(StepHamiltonianSpec(0.0, D, 1.0, 2.0, (1, 2)), s).toarray()
    b = h1(StepHamiltonianSpec(math.pi, D, 1.0, 2.0, (1, 2)), s).toarray()
    assert np.allclose(a, -b)


def test_full_hamiltonian_decoupled_qubit_absent():
    dev = reference_device(E_c=PLANCK * 32e9)
    s = make_space(2, 3)
    drive = QubitKnobs(0.33, 0.5, 1e-3, TWO_PI * 10e9)
    H = full_hamiltonian(dev, [decoupled_knobs(), drive], s, g=TWO_PI * 50e6)
    z1 = pauli(1, "z", s).toarray()
    for t in (0.0, 1.3e-11):
        m = H.evaluate(t).toarray()
        assert np.allclose(m @ z1, z1 @ m)  # nothing acts on qubit 1 but identity


def test_full_hamiltonian_uncoupled_flag():
    dev = reference_device()
    s = make_space(1, 3)
    H = full_hamiltonian(dev, [QubitKnobs(0.5, 0.4)], s, g=1e8, cavity_coupled=False)
    assert H.is_static
    assert np.allclose(H.static.toarray() if hasattr(H.static, "toarray") else H.static,
                       np.diag(np.diag(H.static.toarray() if hasattr(H.static, "toarray") else H.static)))


def test_step3_and_heff_diagonal():
    s = qubit_register(4)
    assert h_step3(1.0, 2.0, s).is_diagonal()
    assert h_eff(1.0, 3, s).is_diagonal()
    with pytest.raises(ValueError):
        h_eff(-1.0, 3, s)


def test_dressed_rwa_residual_shrinks_with_drive():
    s = make_space(2, 4)
    tau = TWO_PI / D
    res = []
    for r in (5, 20):
        spec = StepHamiltonianSpec(0.0, -D, 0.5 * D, r * D, (1, 2))
        res.append(accumulated_residual(exact_dressed_terms(spec, s), h2_dressed(spec, s), tau, 800))
    assert res[1] < res[0]
