"""
Closed-form evolution operators of the three-step protocol and the ideal gates
they are compared against.

Every builder returns a :class:`ClosedFormPropagator` whose ``matrix`` is the
canonical operator and whose ``global_phase`` holds the scalar that was
factored out of it (``full = global_phase * matrix``).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np
import scipy.sparse as sp

from .errors import ProtocolError, SpaceError
from .hilbert import (
    HilbertSpace,
    OperatorMatrix,
    _embed,
    cavity_op,
    collective,
    identity,
    matexp,
    pauli,
    qubit_register,
)

#: absolute tolerance (radians) on omega_0 tau = m pi before the S_x factor is dropped
REDUCTION_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class ClosedFormPropagator:
    space: HilbertSpace
    label: str
    matrix: OperatorMatrix
    params: dict = field(default_factory=dict)
    global_phase: complex = 1.0

    @property
    def full(self) -> OperatorMatrix:
        """Operator including the factored-out global phase."""
        return self.global_phase * self.matrix

    def __matmul__(self, other: "ClosedFormPropagator") -> "ClosedFormPropagator":
        return ClosedFormPropagator(
            self.space, f"{self.label}*{other.label}", self.matrix @ other.matrix,
            {}, self.global_phase * other.global_phase,
        )


def _phase_factor(theta: float) -> complex:
    """``exp(-i theta)`` snapped to exactly 1 when theta is a multiple of 2 pi."""
    k = round(theta / (2 * math.pi))
    if abs(theta - 2 * math.pi * k) < 1e-12 * max(1.0, abs(theta)):
        return 1.0 + 0.0j
    return cmath.exp(-1j * theta)


def displacement_coeffs(g: float, delta: float, t: float) -> tuple[complex, complex]:
    """``(A(t), B(t))`` of the displaced-oscillator propagator.

    ``B = i g (exp(-i delta t) - 1) / (2 delta)``,
    ``A = g (2 B* - g t) / (4 delta)``.  A is complex for generic t: its
    imaginary part ``|B|^2 / 2`` cancels the BCH term of the two displacement
    factors, so the product stays unitary.  At ``t = 2 pi / |delta|`` B is
    exactly zero.
    """
    if delta == 0:
        raise ValueError("detuning must be nonzero")
    B = 1j * g * (_phase_factor(delta * t) - 1.0) / (2.0 * delta)
    A = g * (2.0 * B.conjugate() - g * t) / (4.0 * delta)
    return complex(A), complex(B)


def _subset(space: HilbertSpace, qubits: Optional[Iterable[int]], default_start: int = 1) -> tuple:
    q = tuple(range(default_start, space.n_qubits + 1)) if qubits is None else tuple(sorted(qubits))
    if not q:
        raise SpaceError("empty qubit subset")
    return q


def _sx_rotation(theta: float, qubits: tuple, space: HilbertSpace) -> OperatorMatrix:
    """``exp(i theta S_x)`` over ``qubits`` as a product of single-qubit rotations."""
    r = np.array([[math.cos(theta), 1j * math.sin(theta)], [1j * math.sin(theta), math.cos(theta)]])
    m = _embed(space, {j - 1: r for j in qubits})
    m.unitary = True
    return m


def _cavity_free(omega_c: float, tau: float, space: HilbertSpace) -> OperatorMatrix:
    n = cavity_op("number", space).diagonal().real
    phases = np.array([_phase_factor(omega_c * tau * k) for k in n])
    return OperatorMatrix.build(space, sp.diags(phases, format="csr"), unitary=True)


def _reduce_check(omega0: float, tau: float, m: int, what: str):
    if abs(omega0 * tau - m * math.pi) > REDUCTION_TOL:
        raise ProtocolError(
            f"{what}: omega_0 tau = {omega0 * tau!r} is not within {REDUCTION_TOL} of {m} pi"
        )


def u_prime(g: float, delta: float, t: float, space: HilbertSpace, qubits=None) -> ClosedFormPropagator:
    """``exp(-i A S_z^2) exp(-i B S_z a) exp(-i B* S_z a^dag)`` (dressed-frame propagator)."""
    if not space.has_cavity:
        raise SpaceError("u_prime needs a cavity mode")
    q = _subset(space, qubits)
    A, B = displacement_coeffs(g, delta, t)
    sz = collective("S_z", q, space)
    u = matexp(sz @ sz, -1j * A)
    if B != 0:
        u = u @ matexp(sz @ cavity_op("annihilate", space), -1j * B)
        u = u @ matexp(sz @ cavity_op("create", space), -1j * B.conjugate())
    u.unitary = B == 0 and A.imag == 0
    return ClosedFormPropagator(space, "U'", u, dict(g=g, delta=delta, t=t, A=A, B=B))


def u_step1(omega0: float, Omega: float, lam: float, tau: float, space: HilbertSpace,
            m: Optional[int] = None, qubits=None, omega_c: Optional[float] = None) -> ClosedFormPropagator:
    """Step-(i) propagator ``exp(i w0 tau S_x) exp(-i Omega tau S_z/2) exp(-i lam tau S_z^2)``.

    With ``m`` given the S_x factor is replaced by its value ``(-1)^(m N)`` at
    ``w0 tau = m pi`` and moved into ``global_phase``.  With ``omega_c`` given
    the cavity free evolution ``exp(-i w_c tau a^dag a)`` is included.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive on the step-(i) branch")
    q = _subset(space, qubits)
    sz = collective("S_z", q, space)
    u = matexp(sz, -0.5j * Omega * tau) @ matexp(sz @ sz, -1j * lam * tau)
    phase = 1.0 + 0j
    if m is None:
        u = _sx_rotation(omega0 * tau, q, space) @ u
    else:
        _reduce_check(omega0, tau, m, "step (i)")
        phase = complex((-1) ** (m * len(q)))
    if omega_c is not None and space.has_cavity:
        u = _cavity_free(omega_c, tau, space) @ u
    u.unitary = True
    params = dict(omega0=omega0, Omega=Omega, lam=lam, tau=tau, m=m, qubits=q)
    return ClosedFormPropagator(space, "U(tau)", u, params, phase)


def u_step2(omega0p: float, Omega: float, lamp: float, taup: float, space: HilbertSpace,
            targets=None, m_prime: Optional[int] = None,
            omega_c: Optional[float] = None) -> ClosedFormPropagator:
    """Step-(ii) propagator on the targets: every exponent carries ``+i``.

    ``m_prime`` is the integer with ``w0' tau' = m_prime pi`` (``m - 2`` in the
    protocol).  Qubit 1 is never included.
    """
    if not lamp > 0:
        raise ValueError("lambda' must be positive on the step-(ii) branch")
    q = _subset(space, targets, default_start=2)
    if 1 in q:
        raise SpaceError("the control qubit does not take part in step (ii)")
    sz = collective("S_z", q, space)
    u = matexp(sz, 0.5j * Omega * taup) @ matexp(sz @ sz, 1j * lamp * taup)
    phase = 1.0 + 0j
    if m_prime is None:
        u = _sx_rotation(omega0p * taup, q, space) @ u
    else:
        _reduce_check(omega0p, taup, m_prime, "step (ii)")
        phase = complex((-1) ** (m_prime * len(q)))
    if omega_c is not None and space.has_cavity:
        u = _cavity_free(omega_c, taup, space) @ u
    u.unitary = True
    params = dict(omega0=omega0p, Omega=Omega, lam=lamp, tau=taup, m=m_prime, qubits=q)
    return ClosedFormPropagator(space, "U~(tau')", u, params, phase)


def u_two_steps(Omega: float, lam: float, tau: float, space: HilbertSpace, targets=None,
                lam_prime: Optional[float] = None, tau_prime: Optional[float] = None) -> ClosedFormPropagator:
    """Canonical ``exp(-i Omega tau sz_1/2) exp(-2i lam tau sz_1 S'_z)``; global phase ``exp(-i lam tau)``."""
    lam_prime = lam if lam_prime is None else lam_prime
    tau_prime = tau if tau_prime is None else tau_prime
    if not (math.isclose(lam, lam_prime, rel_tol=1e-12) and math.isclose(tau, tau_prime, rel_tol=1e-12)):
        raise ProtocolError("steps (i) and (ii) must share lambda and tau")
    q = _subset(space, targets, default_start=2)
    z1 = pauli(1, "z", space)
    u = matexp(z1, -0.5j * Omega * tau) @ matexp(z1 @ collective("S_z", q, space), -2j * lam * tau)
    u.unitary = True
    return ClosedFormPropagator(space, "U(2tau)", u, dict(Omega=Omega, lam=lam, tau=tau),
                                cmath.exp(-1j * lam * tau))


def u_step3(E_z1: float, E_z: float, tau: float, space: HilbertSpace, targets=None,
            omega_c: Optional[float] = None) -> ClosedFormPropagator:
    """``exp(-i E_z1 tau sz_1) exp(-i E_z tau S'_z)``; energies in rad/s."""
    q = _subset(space, targets, default_start=2)
    h = E_z1 * pauli(1, "z", space) + E_z * collective("S_z", q, space)
    u = matexp(h, -1j * tau)
    if omega_c is not None and space.has_cavity:
        u = _cavity_free(omega_c, tau, space) @ u
    u.unitary = True
    return ClosedFormPropagator(space, "U-bar(tau)", u, dict(E_z1=E_z1, E_z=E_z, tau=tau))


def pair_phase_gate(lam: float, tau: float, j: int, space: HilbertSpace) -> OperatorMatrix:
    """``U_p(1, j) = exp[2i lam tau (sz_1 + sz_j - sz_1 sz_j)]``."""
    z1, zj = pauli(1, "z", space), pauli(j, "z", space)
    return matexp(z1 + zj - z1 @ zj, 2j * lam * tau)


def step_energies(params) -> tuple[float, float]:
    """Step-(iii) ``(E_z1, E_z)`` in rad/s from the protocol's dc gate charges."""
    from .device import HBAR

    e_z1 = -2.0 * params.E_c * (1.0 - 2.0 * params.ng1_dc_step3) / HBAR
    e_z = -2.0 * params.E_c * (1.0 - 2.0 * params.ng_dc_step3) / HBAR
    return e_z1, e_z


def _check_protocol(params):
    if not math.isclose(params.delta_prime, -params.delta, rel_tol=1e-12):
        raise ProtocolError("delta' must equal -delta")
    if not math.isclose(params.tau, 2 * math.pi / abs(params.delta), rel_tol=1e-12):
        raise ProtocolError("tau must equal 2 pi / |delta|")
    if not params.lam > 0:
        raise ProtocolError("lambda must be positive")


def u_total(params, space: HilbertSpace, include_cavity: bool = True,
            lam: Optional[float] = None) -> ClosedFormPropagator:
    """Three-step gate ``U-bar(tau) U~(tau) U(tau)`` assembled from the step closed forms.

    ``params`` is a :class:`~ntcp.protocol.ProtocolParams`.  ``lam`` overrides
    the coupling rate of steps (i)/(ii) while step (iii) keeps the protocol's
    calibration, which models a miscalibrated coupling.  Spectator qubits
    (labels above n+1) are left untouched.
    """
    _check_protocol(params)
    n = params.n
    if space.n_qubits < n + 1:
        raise SpaceError(f"space holds {space.n_qubits} qubits, protocol needs {n + 1}")
    lam = params.lam if lam is None else lam
    active = tuple(range(1, n + 2))
    targets = tuple(range(2, n + 2))
    wc = params.omega_c if include_cavity else None
    s1 = u_step1(params.omega0_step1, params.Omega, lam, params.tau, space, m=params.m, qubits=active, omega_c=wc)
    s2 = u_step2(params.omega0_step2, params.Omega, lam, params.tau, space, targets=targets,
                 m_prime=params.m - 2, omega_c=wc)
    e_z1, e_z = step_energies(params)
    s3 = u_step3(e_z1, e_z, params.tau, space, targets=targets, omega_c=wc)
    total = s3 @ s2 @ s1
    total.matrix.unitary = True
    return ClosedFormPropagator(space, "U(3tau)", total.matrix, dict(n=n, lam=lam, tau=params.tau),
                                total.global_phase)


def _register_space(n: int, space: Optional[HilbertSpace]) -> HilbertSpace:
    if n < 1:
        raise ValueError("need at least one target")
    space = qubit_register(n + 1) if space is None else space
    if space.n_qubits < n + 1:
        raise SpaceError(f"space holds {space.n_qubits} qubits, need {n + 1}")
    return space


def ideal_ntcp(n: int, space: Optional[HilbertSpace] = None) -> OperatorMatrix:
    """Control on qubit 1 phase-flips |1> on each of targets 2..n+1."""
    space = _register_space(n, space)
    diag = np.empty(space.dim, dtype=complex)
    for idx in range(space.dim):
        bits, _ = space.decode(idx)
        diag[idx] = -1.0 if bits[0] and sum(bits[1:n + 1]) % 2 else 1.0
    return OperatorMatrix.build(space, sp.diags(diag, format="csr"), unitary=True)


def ideal_ntcnot(n: int, space: Optional[HilbertSpace] = None) -> OperatorMatrix:
    """Control on qubit 1 bit-flips each of targets 2..n+1 (truth table)."""
    space = _register_space(n, space)
    rows = np.empty(space.dim, dtype=int)
    for idx in range(space.dim):
        bits, photon = space.decode(idx)
        if bits[0]:
            bits = (1,) + tuple(1 - b for b in bits[1:n + 1]) + bits[n + 1:]
        rows[idx] = space.index(bits, photon)
    m = sp.csr_matrix((np.ones(space.dim, dtype=complex), (rows, np.arange(space.dim))),
                      shape=(space.dim, space.dim))
    return OperatorMatrix.build(space, m, unitary=True)


def product_of_pair_gates(lam: float, tau: float, n: int, space: HilbertSpace) -> OperatorMatrix:
    out = identity(space)
    for j in range(2, n + 2):
        out = out @ pair_phase_gate(lam, tau, j, space)
    return out
