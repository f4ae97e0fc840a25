"""
Gate-quality figures: trace fidelity, phase-aligned operator distance,
qubit-register extraction from a qubits x cavity propagator, and the
cavity-initial-state insensitivity suite.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp

from .errors import SpaceError
from .hilbert import HilbertSpace, OperatorMatrix, QuantumState, _embed, cavity_state

#: leakage below which an extracted gate counts as disentangled from the cavity
LEAKAGE_CLEAN = 1e-6

DEFAULT_SUITE = ("vacuum", "fock(3)", "coherent(1)", "thermal(0.5)")

_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)


def _arr(u) -> np.ndarray:
    if hasattr(u, "full"):
        u = u.full
    if isinstance(u, OperatorMatrix):
        return u.toarray()
    return u.toarray() if sp.issparse(u) else np.asarray(u)


def gate_fidelity(U_ideal, U_actual) -> float:
    """``|Tr(U_ideal^dag U_actual)|^2 / d^2``; blind to global phase."""
    a, b = _arr(U_ideal), _arr(U_actual)
    if a.shape != b.shape:
        raise SpaceError(f"dimension mismatch {a.shape} vs {b.shape}")
    d = a.shape[0]
    overlap = np.vdot(a, b)  # Tr(a^dag b)
    return float(min(1.0, abs(overlap) ** 2 / d**2))


def avg_gate_fidelity(U_ideal, U_actual) -> float:
    """Average gate fidelity ``(d F + 1) / (d + 1)`` derived from :func:`gate_fidelity`."""
    d = _arr(U_ideal).shape[0]
    return (d * gate_fidelity(U_ideal, U_actual) + 1.0) / (d + 1.0)


def operator_distance(A, B, columns: Optional[Sequence[int]] = None, align_phase: bool = True) -> float:
    """Spectral-norm distance ``min_theta ||A - exp(i theta) B||_2`` (or with theta = 0).

    ``columns`` restricts both operators to a subset of input basis states,
    e.g. the zero-photon sector.
    """
    a, b = _arr(A), _arr(B)
    if a.shape != b.shape:
        raise SpaceError(f"dimension mismatch {a.shape} vs {b.shape}")
    if columns is not None:
        cols = np.asarray(columns)
        a, b = a[:, cols], b[:, cols]
    if align_phase:
        ov = np.vdot(b, a)
        if abs(ov) > 0:
            b = b * (ov / abs(ov))
    return float(np.linalg.norm(a - b, 2))


def _cavity_members(space: HilbertSpace, cav: QuantumState):
    if cav.space.n_qubits != 0 or cav.space.fock_dim != space.fock_dim:
        raise SpaceError(f"cavity state on {cav.space} does not match the cavity of {space}")
    return cav.members


def _extract_pure(u: np.ndarray, space: HilbertSpace, chi: np.ndarray) -> tuple[np.ndarray, float]:
    dq, nf = space.qubit_dim, space.fock_dim
    cols = u @ np.kron(np.eye(dq), chi[:, None])          # (dq*nf, dq): output for each |b>|chi>
    c = cols.reshape(dq, nf, dq).transpose(1, 0, 2).reshape(nf, dq * dq)
    uu, s, _ = np.linalg.svd(c, full_matrices=False)
    gate = (uu[:, 0].conj() @ c).reshape(dq, dq)
    # fix the arbitrary SVD phase so that the gate's trace is real and positive when possible
    tr = np.trace(gate)
    if abs(tr) > 1e-12:
        gate = gate * (abs(tr) / tr)
    s2 = s**2
    leakage = float(max(0.0, 1.0 - (s2**2).sum() / s2.sum() ** 2))
    return gate, leakage


def extract_qubit_gate(U_full, cav: QuantumState) -> tuple[OperatorMatrix, float]:
    """Qubit-register map conditioned on cavity input ``cav`` and its cavity leakage.

    The columns ``U |b>|chi>`` are arranged as a cavity x (qubit-out, qubit-in)
    matrix; its leading singular vector is the cavity output state and the
    projected block is the register gate.  Leakage is one minus the purity of
    the normalized singular-value spectrum (zero iff qubits and cavity end up
    in a product).  For an ensemble the gate of the heaviest member is
    returned and leakage is the weight average.
    """
    space = U_full.space
    if not space.has_cavity:
        raise SpaceError("extract_qubit_gate needs a qubits x cavity operator")
    u = _arr(U_full)
    members = _cavity_members(space, cav)
    best, leak = None, 0.0
    for w, chi in members:
        gate, l = _extract_pure(u, space, chi)
        leak += w * l
        if best is None or w > best[0]:
            best = (w, gate)
    return OperatorMatrix.build(space.register(), best[1]), leak


def conditional_fidelity(U_full, U_ideal, cav: QuantumState) -> tuple[float, float]:
    """Weight-averaged pure-member fidelity and leakage for a cavity input."""
    space = U_full.space
    u = _arr(U_full)
    ideal = _arr(U_ideal)
    f = l = 0.0
    for w, chi in _cavity_members(space, cav):
        gate, leak = _extract_pure(u, space, chi)
        f += w * gate_fidelity(ideal, gate)
        l += w * leak
    return f, l


def phase_residuals(U_ideal, U_actual) -> np.ndarray:
    """Per-basis-state phase error ``arg(U_ii / V_ii)`` after removing the best global phase.

    Meaningful for diagonal gates; wrapped to ``(-pi, pi]``.
    """
    a, b = np.diag(_arr(U_ideal)), np.diag(_arr(U_actual))
    ratio = b / a
    glob = np.sum(ratio)
    glob = glob / abs(glob) if abs(glob) > 0 else 1.0
    return np.angle(ratio / glob)


@dataclass
class FidelityReport:
    process_fidelity: float
    avg_gate_fidelity: float
    leakage: float
    per_state: list = field(default_factory=list)       # (label, fidelity, leakage)
    truncation: Optional[tuple] = None                  # (N_f, |F(N_f) - F(N_f/2)|)
    phase_residuals: list = field(default_factory=list)

    @property
    def spread(self) -> float:
        if not self.per_state:
            return 0.0
        fs = [f for _, f, _ in self.per_state]
        return max(fs) - min(fs)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["spread"] = self.spread
        return out


def cavity_insensitivity_suite(U_full, U_ideal, states: Union[Sequence[str], Mapping[str, QuantumState]] = DEFAULT_SUITE,
                               U_half=None) -> FidelityReport:
    """Fidelity of the extracted register gate for each cavity input state.

    ``states`` are labels (``vacuum``, ``fock(q)``, ``coherent(a)``,
    ``thermal(n)``) or ready-made cavity states; the first entry sets the
    headline fidelity.  ``U_half`` is the same evolution at half the Fock
    dimension, used for the truncation record.
    """
    space = U_full.space
    if not isinstance(states, Mapping):
        states = {s: cavity_state(s, space.fock_dim) for s in states}
    rows = []
    for label, cav in states.items():
        f, l = conditional_fidelity(U_full, U_ideal, cav)
        rows.append((label, f, l))
    first = rows[0]
    d = space.qubit_dim
    trunc = None
    if U_half is not None:
        f_half, _ = conditional_fidelity(U_half, U_ideal, cavity_state("vacuum", U_half.space.fock_dim))
        trunc = (space.fock_dim, abs(first[1] - f_half))
    gate, _ = extract_qubit_gate(U_full, cavity_state("vacuum", space.fock_dim))
    residuals = []
    ideal = _arr(U_ideal)
    if np.count_nonzero(ideal - np.diag(np.diag(ideal))) == 0:
        residuals = phase_residuals(ideal, gate).tolist()
    return FidelityReport(first[1], (d * first[1] + 1) / (d + 1), first[2], rows, trunc, residuals)


def hadamard_conjugate(n: int, U_ntcp) -> OperatorMatrix:
    """``(I x H^{x n}) U (I x H^{x n})`` with Hadamards on targets 2..n+1."""
    space = U_ntcp.space
    if space.n_qubits < n + 1:
        raise SpaceError(f"operator acts on {space.n_qubits} qubits, need {n + 1}")
    h = _embed(space, {j: _HADAMARD for j in range(1, n + 1)})
    out = h @ U_ntcp @ h
    out.unitary = bool(getattr(U_ntcp, "unitary", False))
    return out


def global_phase_between(A, B) -> complex:
    """Unit scalar ``c`` minimizing ``||A - c B||_F``."""
    ov = np.vdot(_arr(B), _arr(A))
    return ov / abs(ov) if abs(ov) > 0 else 1.0 + 0j
