"""
Truncated qubits-plus-cavity Hilbert space and the operators that live on it.

Ordering convention: qubit 1, qubit 2, ..., qubit n, cavity last.  A basis
index is ``(b_1 b_2 ... b_n)_2 * fock_dim + photon`` so qubit 1 is the most
significant bit.  Pauli conventions follow the charge-qubit literature used
throughout the package::

    sigma_z = |0><0| - |1><1|      sigma_x = |0><1| + |1><0|
    sigma_+ = |1><0|               sigma_- = |0><1|

Units: hbar = 1, every frequency is an angular frequency in rad/s.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.stats import poisson

from .errors import SpaceError, TruncationError

#: spaces at or above this dimension store operators as CSR matrices
SPARSE_THRESHOLD = 2048

#: default Fock truncation
DEFAULT_FOCK_DIM = 10

#: weight below which thermal-ensemble members are dropped / tails are ignored
WEIGHT_CUTOFF = 1e-6

_SIGMA = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "plus": np.array([[0, 0], [1, 0]], dtype=complex),
    "minus": np.array([[0, 1], [0, 0]], dtype=complex),
}


@dataclass(frozen=True)
class HilbertSpace:
    """Tensor product of ``n_qubits`` two-level systems and ``fock_dim`` cavity levels.

    ``fock_dim == 1`` describes a bare qubit register and ``n_qubits == 0`` a
    bare cavity; use :func:`make_space` for the validated joint construction.
    """

    n_qubits: int
    fock_dim: int = 1

    def __post_init__(self):
        if self.n_qubits < 0 or self.fock_dim < 1:
            raise SpaceError(f"invalid space ({self.n_qubits}, {self.fock_dim})")

    @property
    def qubit_dim(self) -> int:
        return 2**self.n_qubits

    @property
    def dim(self) -> int:
        return self.qubit_dim * self.fock_dim

    @property
    def has_cavity(self) -> bool:
        return self.fock_dim > 1

    @property
    def sparse(self) -> bool:
        return self.dim >= SPARSE_THRESHOLD

    def index(self, bits: Sequence[int], photon: int = 0) -> int:
        if len(bits) != self.n_qubits:
            raise SpaceError(f"expected {self.n_qubits} qubit bits, got {len(bits)}")
        if not 0 <= photon < self.fock_dim:
            raise SpaceError(f"photon number {photon} outside truncation {self.fock_dim}")
        q = 0
        for b in bits:
            if b not in (0, 1):
                raise SpaceError(f"qubit bit must be 0 or 1, got {b}")
            q = 2 * q + b
        return q * self.fock_dim + photon

    def decode(self, index: int) -> tuple[tuple[int, ...], int]:
        if not 0 <= index < self.dim:
            raise SpaceError(f"index {index} outside dimension {self.dim}")
        q, photon = divmod(index, self.fock_dim)
        bits = tuple((q >> (self.n_qubits - 1 - j)) & 1 for j in range(self.n_qubits))
        return bits, photon

    def register(self) -> "HilbertSpace":
        """The qubit register without the cavity."""
        return HilbertSpace(self.n_qubits, 1)

    def cavity(self) -> "HilbertSpace":
        return HilbertSpace(0, self.fock_dim)

    def photon_columns(self, max_photon: int = 0) -> np.ndarray:
        """Indices of ``|b> (x) |p>`` for every qubit string ``b`` and ``p <= max_photon``."""
        q = np.arange(self.qubit_dim)[:, None] * self.fock_dim
        return (q + np.arange(min(max_photon, self.fock_dim - 1) + 1)[None, :]).ravel()


def make_space(n_qubits: int, fock_dim: int = DEFAULT_FOCK_DIM) -> HilbertSpace:
    """Joint space of ``n_qubits`` qubits and a cavity truncated at ``fock_dim`` levels."""
    if int(n_qubits) != n_qubits or n_qubits < 1:
        raise SpaceError(f"n_qubits must be a positive integer, got {n_qubits!r}")
    if int(fock_dim) != fock_dim or fock_dim < 2:
        raise SpaceError(f"fock_dim must be an integer >= 2, got {fock_dim!r}")
    return HilbertSpace(int(n_qubits), int(fock_dim))


def qubit_register(n_qubits: int) -> HilbertSpace:
    if int(n_qubits) != n_qubits or n_qubits < 1:
        raise SpaceError(f"n_qubits must be a positive integer, got {n_qubits!r}")
    return HilbertSpace(int(n_qubits), 1)


class OperatorMatrix:
    """A (dense or CSR) complex matrix tied to a :class:`HilbertSpace`.

    Instances are treated as immutable; arithmetic returns new objects.
    """

    __slots__ = ("space", "data", "unitary")

    def __init__(self, space: HilbertSpace, data, unitary: bool = False):
        if data.shape != (space.dim, space.dim):
            raise SpaceError(f"matrix shape {data.shape} does not match dimension {space.dim}")
        self.space = space
        self.data = data
        self.unitary = unitary

    @classmethod
    def build(cls, space: HilbertSpace, data, unitary: bool = False) -> "OperatorMatrix":
        """Wrap ``data`` using the storage policy of ``space``."""
        if space.sparse:
            data = sp.csr_matrix(data, dtype=complex)
        elif sp.issparse(data):
            data = data.toarray().astype(complex)
        else:
            data = np.asarray(data, dtype=complex)
        return cls(space, data, unitary)

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.data)

    def toarray(self) -> np.ndarray:
        return self.data.toarray() if self.is_sparse else np.asarray(self.data)

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.data.conj().T.copy(), self.unitary)

    def _check(self, other: "OperatorMatrix"):
        if other.space != self.space:
            raise SpaceError(f"space mismatch: {self.space} vs {other.space}")

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check(other)
            return OperatorMatrix(self.space, self.data @ other.data, self.unitary and other.unitary)
        return self.data @ other

    def __add__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check(other)
            return OperatorMatrix(self.space, self.data + other.data)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check(other)
            return OperatorMatrix(self.space, self.data - other.data)
        return NotImplemented

    def __neg__(self):
        return OperatorMatrix(self.space, -self.data)

    def __mul__(self, scalar):
        if isinstance(scalar, OperatorMatrix):
            return NotImplemented
        unitary = self.unitary and abs(abs(scalar) - 1.0) < 1e-14
        return OperatorMatrix(self.space, self.data * scalar, unitary)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def __pow__(self, k: int):
        if self.is_sparse:
            out = identity(self.space)
            for _ in range(k):
                out = out @ self
            return out
        return OperatorMatrix(self.space, np.linalg.matrix_power(self.data, k), self.unitary)

    def __repr__(self):
        kind = "sparse" if self.is_sparse else "dense"
        return f"OperatorMatrix({self.space}, {kind}, unitary={self.unitary})"

    def diagonal(self) -> np.ndarray:
        return np.asarray(self.data.diagonal())

    def hermiticity_error(self) -> float:
        d = self.data - self.data.conj().T
        return float(abs(d).max()) if d.shape[0] else 0.0

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return self.hermiticity_error() < tol

    def unitarity_error(self) -> float:
        """max-norm of ``U^dagger U - I``."""
        prod = self.data.conj().T @ self.data
        if sp.issparse(prod):
            prod = prod.toarray()
        return float(np.abs(prod - np.eye(self.space.dim)).max())

    def is_unitary(self, tol: float = 1e-10) -> bool:
        return self.unitarity_error() < tol

    def is_diagonal(self) -> bool:
        a = self.data
        if sp.issparse(a):
            coo = a.tocoo()
            return bool(np.all((coo.row == coo.col) | (coo.data == 0)))
        return not np.any(a - np.diag(np.diag(a)))

    def expect(self, state: "QuantumState") -> complex:
        total = 0j
        for w, v in state.members:
            total += w * np.vdot(v, self.data @ v)
        return total


def identity(space: HilbertSpace) -> OperatorMatrix:
    return OperatorMatrix.build(space, sp.identity(space.dim, dtype=complex, format="csr"), unitary=True)


def _embed(space: HilbertSpace, factors: dict) -> OperatorMatrix:
    """Tensor product with ``factors[pos]`` at positions 0..n-1 (qubits) and ``'cavity'``."""
    mats = []
    for j in range(space.n_qubits):
        mats.append(sp.csr_matrix(factors[j]) if j in factors else sp.identity(2, format="csr"))
    if space.fock_dim > 1 or "cavity" in factors:
        cav = factors.get("cavity")
        mats.append(sp.csr_matrix(cav) if cav is not None else sp.identity(space.fock_dim, format="csr"))
    out = sp.csr_matrix(np.ones((1, 1), dtype=complex))
    for m in mats:
        out = sp.kron(out, m, format="csr")
    return OperatorMatrix.build(space, out)


def _check_qubit(j: int, space: HilbertSpace):
    if not 1 <= j <= space.n_qubits:
        raise SpaceError(f"qubit index {j} outside 1..{space.n_qubits}")


def pauli(j: int, axis: str, space: HilbertSpace) -> OperatorMatrix:
    """Single-qubit operator on qubit ``j`` (1-based); ``axis`` in x, y, z, plus, minus."""
    _check_qubit(j, space)
    if axis not in _SIGMA:
        raise SpaceError(f"unknown axis {axis!r}")
    return _embed(space, {j - 1: _SIGMA[axis]})


_COLLECTIVE = {"S_z": "z", "S_x": "x", "S_plus": "plus", "S_minus": "minus",
               "z": "z", "x": "x", "plus": "plus", "minus": "minus"}


def collective(kind: str, subset: Iterable[int], space: HilbertSpace) -> OperatorMatrix:
    """Sum of single-qubit operators over ``subset`` (1-based qubit labels)."""
    if kind not in _COLLECTIVE:
        raise SpaceError(f"unknown collective operator {kind!r}")
    subset = sorted(set(subset))
    if not subset:
        raise SpaceError("collective operator over an empty qubit subset")
    out = pauli(subset[0], _COLLECTIVE[kind], space)
    for j in subset[1:]:
        out = out + pauli(j, _COLLECTIVE[kind], space)
    return out


def ladder(fock_dim: int) -> np.ndarray:
    """Truncated annihilation matrix, ``a|n> = sqrt(n)|n-1>``."""
    return np.diag(np.sqrt(np.arange(1, fock_dim, dtype=float)), 1).astype(complex)


def cavity_op(kind: str, space: HilbertSpace) -> OperatorMatrix:
    if space.fock_dim < 2:
        raise SpaceError("space has no cavity mode")
    a = ladder(space.fock_dim)
    mats = {"annihilate": a, "create": a.conj().T, "number": np.diag(np.arange(space.fock_dim)).astype(complex)}
    if kind not in mats:
        raise SpaceError(f"unknown cavity operator {kind!r}")
    return _embed(space, {"cavity": mats[kind]})


def commutator(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    return a @ b - b @ a


def matexp(m: OperatorMatrix, scale: complex = 1.0) -> OperatorMatrix:
    """``exp(scale * m)``.

    Diagonal inputs are exponentiated entrywise; Hermitian inputs with a purely
    imaginary ``scale`` go through an eigendecomposition (and come back flagged
    unitary); anything else uses scaling-and-squaring.
    """
    data = m.data
    finite = np.all(np.isfinite(data.data if sp.issparse(data) else data))
    if not finite or not np.isfinite(scale):
        raise ValueError("matexp: non-finite entries")
    scale = complex(scale)
    hermitian = m.is_hermitian(1e-12)
    unitary = hermitian and scale.real == 0.0
    if m.is_diagonal():
        return OperatorMatrix.build(m.space, sp.diags(np.exp(scale * m.diagonal()), format="csr"), unitary)
    if m.is_sparse:
        return OperatorMatrix(m.space, spla.expm((scale * data).tocsc()).tocsr(), unitary)
    if unitary:
        w, v = np.linalg.eigh(data)
        return OperatorMatrix(m.space, (v * np.exp(scale * w)) @ v.conj().T, True)
    return OperatorMatrix(m.space, sla.expm(scale * data), False)


# ---------------------------------------------------------------------------
# states


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Pure state or finite (weight, vector) ensemble on ``space``."""

    space: HilbertSpace
    members: tuple
    label: str = ""

    def __post_init__(self):
        weights = np.array([w for w, _ in self.members], dtype=float)
        if len(weights) == 0 or np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError("ensemble weights must be nonnegative and sum to 1")
        for _, v in self.members:
            if v.shape != (self.space.dim,):
                raise SpaceError(f"state vector of length {v.shape} on dimension {self.space.dim}")

    @classmethod
    def pure(cls, space: HilbertSpace, vector, label: str = "") -> "QuantumState":
        return cls(space, ((1.0, np.asarray(vector, dtype=complex)),), label)

    @classmethod
    def ensemble(cls, space: HilbertSpace, members, label: str = "") -> "QuantumState":
        members = tuple((float(w), np.asarray(v, dtype=complex)) for w, v in members)
        return cls(space, members, label)

    @property
    def kind(self) -> str:
        return "pure" if len(self.members) == 1 else "mixed"

    @property
    def vector(self) -> np.ndarray:
        if self.kind != "pure":
            raise ValueError(f"state {self.label!r} is an ensemble")
        return self.members[0][1]

    def norm_error(self) -> float:
        return max(abs(np.linalg.norm(v) - 1.0) for _, v in self.members)

    def density_matrix(self) -> np.ndarray:
        return sum(w * np.outer(v, v.conj()) for w, v in self.members)


def basis_state(space: HilbertSpace, bits: Sequence[int], photon: int = 0) -> QuantumState:
    v = np.zeros(space.dim, dtype=complex)
    v[space.index(bits, photon)] = 1.0
    label = "".join(map(str, bits)) + (f",{photon}" if space.has_cavity else "")
    return QuantumState.pure(space, v, label)


def fock_state(fock_dim: int, n: int) -> QuantumState:
    space = HilbertSpace(0, fock_dim)
    if not 0 <= n < fock_dim:
        raise TruncationError(f"Fock state |{n}> outside truncation {fock_dim}")
    v = np.zeros(fock_dim, dtype=complex)
    v[n] = 1.0
    return QuantumState.pure(space, v, "vacuum" if n == 0 else f"fock({n})")


def coherent_state(fock_dim: int, alpha: complex, cutoff: float = WEIGHT_CUTOFF) -> QuantumState:
    """Truncated coherent state; raises if more than ``cutoff`` weight falls beyond the truncation."""
    mean = abs(alpha) ** 2
    tail = float(poisson.sf(fock_dim - 1, mean)) if mean > 0 else 0.0
    if tail > cutoff:
        raise TruncationError(f"coherent({alpha}) loses weight {tail:.2e} beyond {fock_dim} levels")
    n = np.arange(fock_dim)
    log_fact = np.array([math.lgamma(k + 1) for k in n])
    with np.errstate(divide="ignore"):
        mag = np.exp(-mean / 2 + n * np.log(abs(alpha)) - log_fact / 2) if alpha != 0 else (n == 0).astype(float)
    v = mag * np.exp(1j * np.angle(alpha) * n)
    v = v / np.linalg.norm(v)
    return QuantumState.pure(HilbertSpace(0, fock_dim), v, f"coherent({_fmt(alpha)})")


def thermal_state(fock_dim: int, nbar: float, cutoff: float = WEIGHT_CUTOFF) -> QuantumState:
    """Boltzmann-weighted Fock ensemble; members lighter than ``cutoff`` are dropped."""
    if nbar < 0:
        raise ValueError("mean photon number must be nonnegative")
    if nbar == 0:
        return QuantumState.ensemble(HilbertSpace(0, fock_dim), [(1.0, fock_state(fock_dim, 0).vector)],
                                     "thermal(0)")
    r = nbar / (1.0 + nbar)
    tail = r**fock_dim
    if tail > cutoff:
        raise TruncationError(f"thermal({nbar}) loses weight {tail:.2e} beyond {fock_dim} levels")
    p = (1.0 - r) * r ** np.arange(fock_dim)
    keep = np.flatnonzero(p >= cutoff)
    w = p[keep] / p[keep].sum()
    members = [(wk, fock_state(fock_dim, int(k)).vector) for wk, k in zip(w, keep)]
    return QuantumState.ensemble(HilbertSpace(0, fock_dim), members, f"thermal({_fmt(nbar)})")


def _fmt(x) -> str:
    if isinstance(x, complex) and x.imag != 0:
        return repr(x)
    x = x.real if isinstance(x, complex) else x
    return f"{x:g}"


_STATE_RE = re.compile(r"^\s*(vacuum|fock|coherent|thermal)\s*(?:\(\s*([^)]*)\s*\))?\s*$")


def cavity_state(label: str, fock_dim: int, cutoff: float = WEIGHT_CUTOFF) -> QuantumState:
    """Parse ``vacuum``, ``fock(q)``, ``coherent(alpha)`` or ``thermal(nbar)``."""
    m = _STATE_RE.match(label)
    if not m:
        raise ValueError(f"unrecognised cavity state {label!r}")
    kind, arg = m.groups()
    if kind == "vacuum":
        return fock_state(fock_dim, 0)
    if arg is None:
        raise ValueError(f"cavity state {kind!r} needs an argument")
    if kind == "fock":
        return fock_state(fock_dim, int(arg))
    if kind == "coherent":
        return coherent_state(fock_dim, complex(arg.replace(" ", "")), cutoff)
    return thermal_state(fock_dim, float(arg), cutoff)


def product_state(space: HilbertSpace, qubit_vector, cav: QuantumState) -> QuantumState:
    """``qubit_vector (x) cav`` on the joint space; ensembles stay ensembles."""
    qv = np.asarray(qubit_vector, dtype=complex)
    if qv.shape != (space.qubit_dim,) or cav.space.fock_dim != space.fock_dim:
        raise SpaceError("product_state: factor dimensions do not match the space")
    members = [(w, np.kron(qv, v)) for w, v in cav.members]
    return QuantumState.ensemble(space, members, cav.label)
