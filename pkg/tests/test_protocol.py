import math

import pytest

from ntcp.device import PLANCK, TWO_PI, reference_device
from ntcp.errors import ProtocolError
from ntcp.protocol import PulseSchedule, Thresholds, derive, epsilons, reference_protocol, search, validate


def dev():
    return reference_device(E_c=PLANCK * 32e9)


@pytest.mark.parametrize("m,k", [(3, 0), (12, 1), (112, 2), (301, 3)])
def test_invariants(m, k):
    P, S, _ = derive(dev(), m, k, 3, Omega=TWO_PI * 600e6)
    assert math.isclose(P.delta, -P.omega_c / (m - 1))
    assert P.delta_prime == -P.delta
    assert math.isclose(8 * P.lam * P.tau, (2 * k + 1) * math.pi, rel_tol=1e-12)
    assert math.isclose(P.omega0_step1 * P.tau, m * math.pi, rel_tol=1e-12)
    assert math.isclose(P.omega0_step2 * P.tau, (m - 2) * math.pi, rel_tol=1e-12)
    assert math.isclose(S.total_time, 3 * P.tau)


def test_m_too_small():
    with pytest.raises(ProtocolError, match="m must exceed 2"):
        derive(dev(), 2, 0, 2, Omega=TWO_PI * 600e6)


@pytest.mark.parametrize("kwargs", [dict(), dict(Omega=1.0, V0=1e-3)])
def test_drive_must_be_given_once(kwargs):
    with pytest.raises(ProtocolError):
        derive(dev(), 112, 2, 2, **kwargs)


def test_v0_and_omega_agree():
    P, _, _ = derive(dev(), 112, 2, 2, Omega=TWO_PI * 600e6)
    Q, _, _ = derive(dev(), 112, 2, 2, V0=P.V0)
    assert math.isclose(Q.Omega, P.Omega, rel_tol=1e-12)


def test_deterministic_and_roundtrip():
    a = derive(dev(), 112, 2, 5, Omega=TWO_PI * 600e6)
    b = derive(dev(), 112, 2, 5, Omega=TWO_PI * 600e6)
    assert a[0] == b[0] and a[1] == b[1]
    back = PulseSchedule.from_dict(a[1].to_dict())
    for s0, s1 in zip(a[1].steps, back.steps):
        assert s0.label == s1.label and s0.decoupling == s1.decoupling
        assert math.isclose(s0.duration, s1.duration, rel_tol=1e-12)
        for k0, k1 in zip(s0.knobs, s1.knobs):
            assert math.isclose(k0.ac_frequency, k1.ac_frequency, rel_tol=1e-12)
            assert k0.flux_ratio == k1.flux_ratio and k0.ng_dc == k1.ng_dc


def test_schedule_structure():
    P, S, _ = derive(dev(), 112, 2, 2, Omega=TWO_PI * 600e6, n_spectators=1)
    s1, s2, s3 = S.steps
    assert [kn.ac_amplitude > 0 for kn in s1.knobs] == [True, True, True, False]
    assert [kn.ac_amplitude > 0 for kn in s2.knobs] == [False, True, True, False]
    assert s2.knobs[1].ac_phase == math.pi
    assert all(kn.flux_ratio == 0.5 and kn.ac_amplitude == 0 for kn in s3.knobs)
    assert s3.decoupling == "cavity" and s3.cavity_detuned


def test_epsilon_formulas():
    E = PLANCK * 32e9
    e0, e1, e2 = epsilons(E, 4.0, 2.0, 1.0, 3)
    hbar = PLANCK / TWO_PI
    assert math.isclose(e0, hbar * 6 / (4 * E))
    assert math.isclose(e1, hbar * 16 / (8 * E))
    assert math.isclose(e2, hbar / (2 * E))


def test_validate_strong_drive_thresholds():
    d = dev()
    w = d.omega_c / 111
    statuses = {}
    for ratio in (1.0, 3.0, 10.0):
        P, _, R = derive(d, 112, 0, 2, Omega=ratio * w)
        statuses[ratio] = {c.name: c.status for c in validate(P, R)}["Omega/|delta|"]
    assert statuses == {1.0: "fail", 3.0: "warn", 10.0: "pass"}
    strict = {c.name: c.status for c in validate(P, R, Thresholds(ratio_warn=20.0))}
    assert strict["Omega/|delta|"] == "warn"


def test_validate_timescales_and_mismatch():
    _, (P, _, R) = reference_protocol(5)
    checks = {c.name: c for c in validate(P, R)}
    assert checks["t_op<kappa_inv"].status == "pass"
    assert checks["t_op<T2"].status == "pass"
    assert checks["g_mismatch"].status == "pass"
    _, _, R2 = derive(dev(), 112, 2, 5, Omega=TWO_PI * 600e6)  # circuit-formula g
    assert {c.name: c.status for c in validate(P, R2)}["g_mismatch"] == "warn"


def test_search_finds_reference_point():
    hits = search(dev(), 5, TWO_PI * 600e6, range(100, 120), range(4), g_available=TWO_PI * 100e6, g_tol=0.01)
    assert any((h.m, h.k) == (112, 2) for h in hits)
    assert [h.total_time for h in hits] == sorted(h.total_time for h in hits)
