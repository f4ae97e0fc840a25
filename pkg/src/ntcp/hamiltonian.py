"""
Hamiltonian builders: lab frame, the two interaction pictures, the dressed
frame, the effective pairwise Hamiltonian and the step-(iii) free Hamiltonian.

Time dependence is declarative: ``H(t) = static + sum_k exp(-i nu_k t) M_k``
where every carrier ``(nu, M)`` comes with its Hermitian partner ``(-nu, M^dagger)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .device import (
    HBAR,
    DeviceParams,
    QubitKnobs,
    coupling_g,
    ez_energy,
    josephson_energy,
    rabi_omega,
)
from .errors import SpaceError
from .hilbert import (
    HilbertSpace,
    OperatorMatrix,
    cavity_op,
    collective,
    identity,
    pauli,
)

_PERIOD_RTOL = 1e-9


def _raw(space: HilbertSpace, m) -> np.ndarray:
    if isinstance(m, OperatorMatrix):
        return m.data
    return OperatorMatrix.build(space, m).data


def _common_period(freqs) -> Optional[float]:
    nz = sorted({abs(f) for f in freqs if f != 0.0})
    if not nz:
        return None
    base = nz[0]
    for f in nz[1:]:
        r = f / base
        if abs(r - round(r)) > _PERIOD_RTOL * r:
            return None
    return 2.0 * math.pi / base


class TimeDependentHamiltonian:
    """``H(t) = static + sum_k exp(-i nu_k t) M_k`` on ``space`` (rad/s, seconds).

    Carriers with equal frequency are merged at construction.  ``period`` is
    the common period of all carriers (``None`` for static or incommensurate
    drives); the integrator uses it to stack one-period propagators.
    """

    def __init__(self, space: HilbertSpace, static=None, carriers: Sequence = (), label: str = ""):
        self.space = space
        self.label = label
        self.static = _raw(space, static) if static is not None else _raw(space, sp.csr_matrix((space.dim, space.dim)))
        merged: dict[float, object] = {}
        for nu, m in carriers:
            m = _raw(space, m)
            merged[float(nu)] = merged[float(nu)] + m if float(nu) in merged else m
        self.carriers = tuple(sorted(merged.items()))
        self.period = _common_period(nu for nu, _ in self.carriers)

    @classmethod
    def constant(cls, op: OperatorMatrix, label: str = "") -> "TimeDependentHamiltonian":
        return cls(op.space, op, (), label)

    @property
    def is_static(self) -> bool:
        return not self.carriers

    @property
    def frequencies(self) -> tuple[float, ...]:
        return tuple(nu for nu, _ in self.carriers)

    def matrix(self, t: float):
        """Raw (dense or CSR) matrix at time ``t``."""
        out = self.static
        for nu, m in self.carriers:
            out = out + np.exp(-1j * nu * t) * m
        return out

    def evaluate(self, t: float) -> OperatorMatrix:
        return OperatorMatrix(self.space, self.matrix(t))

    def static_width(self) -> float:
        """Spread of the static spectrum (max minus min eigenvalue)."""
        s = self.static
        if sp.issparse(s):
            # Gershgorin bound is enough for a step-size heuristic
            rad = np.asarray(abs(s).sum(axis=1)).ravel()
            c = s.diagonal().real
            return float((c + rad).max() - (c - rad).min())
        w = np.linalg.eigvalsh(s)
        return float(w[-1] - w[0])

    def fastest_scale(self) -> float:
        """Largest angular frequency present: carriers and, when driven, the static spread."""
        nus = [abs(nu) for nu in self.frequencies]
        if not nus:
            return 0.0
        return max(max(nus), self.static_width())

    def __add__(self, other: "TimeDependentHamiltonian") -> "TimeDependentHamiltonian":
        if other.space != self.space:
            raise SpaceError("cannot add Hamiltonians on different spaces")
        label = " + ".join(x for x in (self.label, other.label) if x)
        return TimeDependentHamiltonian(self.space, self.static + other.static,
                                        self.carriers + other.carriers, label)

    def hermiticity_error(self, t: float) -> float:
        return self.evaluate(t).hermiticity_error()

    def __repr__(self):
        return f"TimeDependentHamiltonian({self.label!r}, {self.space}, carriers={self.frequencies})"


# ---------------------------------------------------------------------------
# lab frame


def full_hamiltonian(
    p: DeviceParams,
    knobs: Sequence[QubitKnobs],
    space: HilbertSpace,
    g: Optional[float] = None,
    cavity_coupled: bool = True,
) -> TimeDependentHamiltonian:
    """Lab-frame charge-qubit + cavity Hamiltonian with per-qubit knobs.

    ``H = w_c a^dag a + sum_j [E_z,j sz_j - E_J,j sx_j + Omega_j cos(w_j t + phi_j) sz_j
    + g_j (a + a^dag) sz_j]`` with hbar = 1.  ``g`` defaults to the circuit
    formula; a qubit at the decoupled setting, or every qubit when
    ``cavity_coupled`` is false, gets ``g_j = 0``.
    """
    if len(knobs) != space.n_qubits:
        raise SpaceError(f"{len(knobs)} knob sets for {space.n_qubits} qubits")
    g = coupling_g(p) if g is None else g
    static = p.omega_c * cavity_op("number", space) if space.has_cavity else None
    if space.has_cavity:
        x_cav = cavity_op("annihilate", space) + cavity_op("create", space)
    carriers = []
    for j, kn in enumerate(knobs, start=1):
        if kn.is_decoupled:
            continue
        sz = pauli(j, "z", space)
        terms = ez_energy(p, kn.ng_dc) / HBAR * sz - josephson_energy(p, kn.flux_ratio) / HBAR * pauli(j, "x", space)
        if space.has_cavity and cavity_coupled and g != 0.0:
            terms = terms + g * (x_cav @ sz)
        static = terms if static is None else static + terms
        omega_j = rabi_omega(p, kn.ac_amplitude)
        if omega_j != 0.0:
            half = 0.5 * omega_j
            carriers.append((-kn.ac_frequency, half * np.exp(1j * kn.ac_phase) * sz))
            carriers.append((kn.ac_frequency, half * np.exp(-1j * kn.ac_phase) * sz))
    if static is None:
        static = 0.0 * identity(space)
    return TimeDependentHamiltonian(space, static, [(nu, m.data) for nu, m in carriers], "lab")


# ---------------------------------------------------------------------------
# interaction pictures


@dataclass(frozen=True)
class StepHamiltonianSpec:
    """Drive/cavity settings of one of the two cavity-assisted steps.

    ``qubits`` are the participating (1-based) qubit labels; ``delta`` is the
    signed cavity-drive detuning omega_c - omega.
    """

    phi: float
    delta: float
    g: float
    Omega: float
    qubits: tuple
    omega0: float = 0.0
    knobs: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.delta == 0.0:
            raise ValueError("detuning must be nonzero for the cavity-assisted steps")
        if not self.qubits:
            raise ValueError("at least one participating qubit is required")
        _phase_trig(self.phi)


def _phase_trig(phi: float) -> tuple[float, float]:
    if abs(phi) < 1e-12:
        return 1.0, 0.0
    if abs(phi - math.pi) < 1e-12:
        return -1.0, 0.0
    raise ValueError(f"drive phase must be 0 or pi, got {phi}")


def h1(spec: StepHamiltonianSpec, space: HilbertSpace) -> OperatorMatrix:
    """Drive term after the first RWA: (Omega/2)[S_z cos phi + i(S+ - S-) sin phi]."""
    c, s = _phase_trig(spec.phi)
    out = (0.5 * spec.Omega * c) * collective("S_z", spec.qubits, space)
    if s:
        out = out + (0.5j * spec.Omega * s) * (collective("S_plus", spec.qubits, space)
                                               - collective("S_minus", spec.qubits, space))
    return out


def h2(spec: StepHamiltonianSpec, space: HilbertSpace) -> TimeDependentHamiltonian:
    """Cavity term after the first RWA: (g/2)[exp(-i delta t) a (S_z + S- - S+) + h.c.]."""
    q = spec.qubits
    x = cavity_op("annihilate", space) @ (collective("S_z", q, space) + collective("S_minus", q, space)
                                          - collective("S_plus", q, space))
    half = 0.5 * spec.g
    return TimeDependentHamiltonian(space, None, [(spec.delta, half * x), (-spec.delta, half * x.dag())], "H2")


def h2_dressed(spec: StepHamiltonianSpec, space: HilbertSpace) -> TimeDependentHamiltonian:
    """Dressed-frame cavity term (g/2)(exp(-i delta t) a + exp(i delta t) a^dag) S_z."""
    sz = collective("S_z", spec.qubits, space)
    half = 0.5 * spec.g
    return TimeDependentHamiltonian(
        space, None,
        [(spec.delta, half * (cavity_op("annihilate", space) @ sz)),
         (-spec.delta, half * (cavity_op("create", space) @ sz))],
        "H2'",
    )


def interaction_hamiltonian(spec: StepHamiltonianSpec, space: HilbertSpace) -> TimeDependentHamiltonian:
    """``h1 + h2``: the Hamiltonian seen in the frame of ``w_c a^dag a - w_0 S_x``."""
    return TimeDependentHamiltonian.constant(h1(spec, space), "H1") + h2(spec, space)


def h_eff_term(lam: float, j: int, space: HilbertSpace) -> OperatorMatrix:
    """H_1j = -2 lambda (sz_1 + sz_j - sz_1 sz_j)."""
    z1, zj = pauli(1, "z", space), pauli(j, "z", space)
    return (-2.0 * lam) * (z1 + zj - z1 @ zj)


def h_eff(lam: float, n: int, space: HilbertSpace) -> OperatorMatrix:
    """Sum of pairwise control-target terms over targets 2..n+1."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if space.n_qubits < n + 1:
        raise SpaceError(f"space holds {space.n_qubits} qubits, need {n + 1}")
    out = h_eff_term(lam, 2, space)
    for j in range(3, n + 2):
        out = out + h_eff_term(lam, j, space)
    return out


def h_step3(E_z1: float, E_z: float, space: HilbertSpace, n: Optional[int] = None) -> OperatorMatrix:
    """Free Hamiltonian of step (iii), E_z1 sz_1 + E_z S'_z (energies in rad/s)."""
    n = space.n_qubits - 1 if n is None else n
    out = E_z1 * pauli(1, "z", space)
    if n >= 1:
        out = out + E_z * collective("S_z", range(2, n + 2), space)
    return out


# ---------------------------------------------------------------------------
# frame transformations used to validate the two rotating-wave steps


def _eig_propagator(h0: np.ndarray) -> Callable[[float], np.ndarray]:
    w, v = np.linalg.eigh(h0)
    vd = v.conj().T

    def u0(t: float) -> np.ndarray:
        return (v * np.exp(-1j * w * t)) @ vd

    return u0


def exact_interaction_terms(spec: StepHamiltonianSpec, space: HilbertSpace, omega_c: float,
                            omega: Optional[float] = None) -> Callable[[float], np.ndarray]:
    """Drive and cavity terms of the lab Hamiltonian moved (exactly) into the
    frame of ``H0 = w_c a^dag a - w_0 S_x``, with no rotating-wave step.

    ``omega`` is the drive frequency (default ``2 w_0``).
    """
    omega = 2.0 * spec.omega0 if omega is None else omega
    q = spec.qubits
    sz = collective("S_z", q, space).toarray()
    n_op = cavity_op("number", space).toarray()
    x_cav = (cavity_op("annihilate", space) + cavity_op("create", space)).toarray()
    h0 = omega_c * n_op - spec.omega0 * collective("S_x", q, space).toarray()
    u0 = _eig_propagator(h0)
    coupling = spec.g * x_cav @ sz

    def v_int(t: float) -> np.ndarray:
        v = spec.Omega * math.cos(omega * t + spec.phi) * sz + coupling
        u = u0(t)
        return u.conj().T @ v @ u

    return v_int


def exact_dressed_terms(spec: StepHamiltonianSpec, space: HilbertSpace) -> Callable[[float], np.ndarray]:
    """``exp(i H1 t) H2(t) exp(-i H1 t)`` without dropping the Omega-rotating terms."""
    u1 = _eig_propagator(h1(spec, space).toarray())
    h2t = h2(spec, space)

    def v_dressed(t: float) -> np.ndarray:
        u = u1(t)
        m = h2t.matrix(t)
        m = m.toarray() if sp.issparse(m) else m
        return u.conj().T @ m @ u

    return v_dressed


def _as_callable(h) -> Callable[[float], np.ndarray]:
    if isinstance(h, TimeDependentHamiltonian):
        return lambda t: (lambda m: m.toarray() if sp.issparse(m) else np.asarray(m))(h.matrix(t))
    return h


def averaged_residual(exact, approx, t0: float, window: float, samples: int = 400) -> float:
    """Spectral norm of the window average of ``exact(t) - approx(t)`` over ``[t0, t0 + window]``."""
    exact, approx = _as_callable(exact), _as_callable(approx)
    ts = np.linspace(t0, t0 + window, samples + 1)
    vals = np.array([exact(t) - approx(t) for t in ts])
    avg = np.trapz(vals, ts, axis=0) / window
    return float(np.linalg.norm(avg, 2))


def accumulated_residual(exact, approx, t_final: float, samples: int = 2000) -> float:
    """``max_t || int_0^t (exact - approx) ds ||_2``: the first-order Magnus
    error committed by replacing ``exact`` with ``approx`` up to ``t_final``."""
    exact, approx = _as_callable(exact), _as_callable(approx)
    ts = np.linspace(0.0, t_final, samples + 1)
    prev = exact(ts[0]) - approx(ts[0])
    acc = np.zeros_like(prev)
    worst = 0.0
    for a, b in zip(ts[:-1], ts[1:]):
        cur = exact(b) - approx(b)
        acc = acc + 0.5 * (b - a) * (prev + cur)
        prev = cur
        worst = max(worst, float(np.linalg.norm(acc, 2)))
    return worst
