"""
Brute-force time evolution: the numerical oracle behind every closed form.

Methods
-------
``piecewise-exponential``
    ``exp(-i H(t + dt/2) dt)`` per step; unconditionally unitary, 2nd order.
``magnus4``
    two-point Gauss fourth-order Magnus step; unitary, 4th order.
``rk4``
    classical Runge-Kutta on ``psi' = -i H psi``; not norm preserving, so the
    drift check doubles as a step-size alarm.

When the Hamiltonian has a common carrier period and the interval spans an
integer number of periods, the one-period propagator is computed once and
raised to that power (``use_periodicity``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import IntegrationError
from .hamiltonian import TimeDependentHamiltonian
from .hilbert import OperatorMatrix, QuantumState

METHODS = ("piecewise-exponential", "magnus4", "rk4")

_GAUSS = math.sqrt(3.0) / 6.0


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "piecewise-exponential"
    step: Optional[float] = None
    steps_per_period: int = 200
    tolerance: float = 1e-8
    max_steps: int = 10_000_000
    use_periodicity: bool = True

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown integration method {self.method!r}; choose from {METHODS}")
        if self.step is not None and not self.step > 0:
            raise ValueError("step must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.steps_per_period < 1 or self.max_steps < 1:
            raise ValueError("step counts must be positive")

    def default_step(self, H: TimeDependentHamiltonian) -> Optional[float]:
        """``(1/steps_per_period)`` of the shortest period present in ``H``; ``None`` when exact."""
        if self.step is not None:
            return self.step
        scale = H.fastest_scale()
        if scale == 0.0:
            if self.method == "rk4":
                width = H.static_width()
                return None if width == 0.0 else 2 * math.pi / width / self.steps_per_period
            return None
        return 2.0 * math.pi / scale / self.steps_per_period


def _dense(m):
    return m.toarray() if sp.issparse(m) else np.asarray(m)


def _expm_herm(h: np.ndarray, dt: float) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * dt)) @ v.conj().T


def _make_stepper(H: TimeDependentHamiltonian, method: str):
    sparse = sp.issparse(H.static)

    if method == "rk4":
        def f(t, x):
            return -1j * (H.matrix(t) @ x)

        def step(t, dt, x):
            k1 = f(t, x)
            k2 = f(t + 0.5 * dt, x + 0.5 * dt * k1)
            k3 = f(t + 0.5 * dt, x + 0.5 * dt * k2)
            k4 = f(t + dt, x + dt * k3)
            return x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        return step

    if method == "magnus4":
        def generator(t, dt):
            a1 = _dense(H.matrix(t + (0.5 - _GAUSS) * dt))
            a2 = _dense(H.matrix(t + (0.5 + _GAUSS) * dt))
            k = 0.5 * (a1 + a2) - 1j * (math.sqrt(3.0) / 12.0) * dt * (a2 @ a1 - a1 @ a2)
            return 0.5 * (k + k.conj().T)
    else:
        def generator(t, dt):
            return H.matrix(t + 0.5 * dt)

    if sparse and method == "piecewise-exponential":
        def step(t, dt, x):
            return spla.expm_multiply(-1j * dt * generator(t, dt), x)
        return step

    def step(t, dt, x):
        return _expm_herm(_dense(generator(t, dt)), dt) @ x
    return step


def _run(H: TimeDependentHamiltonian, t0: float, t1: float, x: np.ndarray, cfg: IntegratorConfig) -> np.ndarray:
    if not t1 > t0:
        raise ValueError("t1 must exceed t0")
    span = t1 - t0
    step = cfg.default_step(H)
    if step is None:
        # static Hamiltonian: one exact exponential
        return _expm_herm(_dense(H.static), span) @ x

    if cfg.use_periodicity and H.period is not None:
        periods = span / H.period
        n_per = round(periods)
        if n_per >= 2 and abs(periods - n_per) <= 1e-9 * periods:
            u_period = _run(H, t0, t0 + H.period, np.eye(H.space.dim, dtype=complex),
                            IntegratorConfig(cfg.method, step, cfg.steps_per_period, cfg.tolerance,
                                             cfg.max_steps, use_periodicity=False))
            return np.linalg.matrix_power(u_period, n_per) @ x

    n_steps = max(1, math.ceil(span / step - 1e-9))
    if n_steps > cfg.max_steps:
        raise IntegrationError(f"{n_steps} steps exceed the budget of {cfg.max_steps}")
    dt = span / n_steps
    advance = _make_stepper(H, cfg.method)
    for i in range(n_steps):
        x = advance(t0 + i * dt, dt, x)
    return x


def _check(x0: np.ndarray, x: np.ndarray, tol: float, what: str):
    if not np.all(np.isfinite(x)):
        raise IntegrationError(f"{what}: non-finite amplitudes")
    drift = float(np.abs(x.conj().T @ x - x0.conj().T @ x0).max())
    if drift > tol:
        raise IntegrationError(f"{what}: unitarity drift {drift:.3e} exceeds tolerance {tol:.1e}; reduce the step")


def evolve_state(H: TimeDependentHamiltonian, psi0: QuantumState, t0: float, t1: float,
                 cfg: IntegratorConfig = IntegratorConfig()) -> QuantumState:
    """Evolve a pure state or each member of an ensemble from ``t0`` to ``t1``."""
    if psi0.space != H.space:
        raise ValueError("state and Hamiltonian live on different spaces")
    x0 = np.column_stack([v for _, v in psi0.members])
    x = _run(H, t0, t1, x0.copy(), cfg)
    _check(x0, x, cfg.tolerance, "evolve_state")
    return QuantumState.ensemble(psi0.space, [(w, x[:, i]) for i, (w, _) in enumerate(psi0.members)],
                                 psi0.label)


def propagator_of(H: TimeDependentHamiltonian, t0: float, t1: float,
                  cfg: IntegratorConfig = IntegratorConfig()) -> OperatorMatrix:
    """Time-ordered propagator ``U(t1, t0)``, built on the identity's columns."""
    eye = np.eye(H.space.dim, dtype=complex)
    u = _run(H, t0, t1, eye, cfg)
    _check(eye, u, cfg.tolerance, "propagator_of")
    return OperatorMatrix.build(H.space, u, unitary=True)


@dataclass
class OrderEstimate:
    steps: list
    errors: list = field(default_factory=list)
    orders: list = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return max(self.errors) < 1e-13

    @property
    def order(self) -> float:
        return math.inf if self.exact else self.orders[-1]


def convergence_order(H: TimeDependentHamiltonian, psi0: QuantumState, t: float,
                      cfg: IntegratorConfig = IntegratorConfig(), halvings: int = 4,
                      base_step: Optional[float] = None) -> OrderEstimate:
    """Richardson estimate of the global order of ``cfg.method`` on ``[0, t]``.

    Runs at ``h, h/2, ..., h/2^halvings`` and reports ``log2`` of successive
    difference ratios.
    """
    h = base_step or cfg.step or cfg.default_step(H) or t
    steps = [h / 2**i for i in range(halvings + 1)]
    x0 = np.column_stack([v for _, v in psi0.members])
    finals = []
    for s in steps:
        c = IntegratorConfig(cfg.method, s, cfg.steps_per_period, math.inf, cfg.max_steps, use_periodicity=False)
        if H.is_static and cfg.method != "rk4":
            # force stepping even though one exponential would be exact
            n = max(1, math.ceil(t / s - 1e-9))
            x = x0.copy()
            for _ in range(n):
                x = _expm_herm(_dense(H.static), t / n) @ x
            finals.append(x)
        else:
            finals.append(_run(H, 0.0, t, x0.copy(), c))
    errors = [float(np.linalg.norm(a - b)) for a, b in zip(finals[:-1], finals[1:])]
    orders = [math.log2(e0 / e1) if e1 > 0 and e0 > 0 else math.inf for e0, e1 in zip(errors[:-1], errors[1:])]
    return OrderEstimate(steps, errors, orders)
