"""
Full three-step gate in any of four frames.

``closed-form``
    product of the analytic step propagators.
``dressed``
    steps (i)/(ii) integrated in the drive-dressed frame (both RWAs applied).
``interaction``
    steps (i)/(ii) integrated after the first RWA only (drive + cavity term
    in the frame of ``w_c a^dag a - w_0 S_x``).
``lab``
    the complete time-dependent charge-qubit Hamiltonian, no approximation
    beyond two-level truncation and Fock truncation.

Every frame returns the lab-frame propagator over ``3 tau``; the frame
factors ``exp(-i w_c tau a^dag a) exp(i w_0 tau S_x)`` are applied exactly.
"""
from __future__ import annotations

from typing import Optional

from .device import DeviceParams
from .errors import SpaceError
from .hamiltonian import h1, h2_dressed, interaction_hamiltonian
from .hilbert import HilbertSpace, OperatorMatrix, matexp
from .integrator import IntegratorConfig, propagator_of
from .propagator import _cavity_free, _sx_rotation, step_energies, u_step3, u_total
from .protocol import PulseSchedule, ProtocolParams, schedule_to_hamiltonians, step_specs

FRAMES = ("closed-form", "dressed", "interaction", "lab")

#: default dimension guardrail for full simulations
MAX_DIM = 100_000


def _frame_factor(params: ProtocolParams, omega0: float, qubits: tuple, space: HilbertSpace) -> OperatorMatrix:
    return _cavity_free(params.omega_c, params.tau, space) @ _sx_rotation(omega0 * params.tau, qubits, space)


def simulate_gate(params: ProtocolParams, space: HilbertSpace, frame: str = "closed-form",
                  device: Optional[DeviceParams] = None, schedule: Optional[PulseSchedule] = None,
                  cfg: IntegratorConfig = IntegratorConfig(), g: Optional[float] = None,
                  lam: Optional[float] = None, max_dim: int = MAX_DIM) -> OperatorMatrix:
    """Propagator of the whole protocol on ``space`` (qubits x cavity).

    ``g`` replaces ``g_required`` in the numerical frames (hardware mismatch
    studies); ``lam`` does the same for the closed form.
    """
    if frame not in FRAMES:
        raise ValueError(f"unknown frame {frame!r}; choose from {FRAMES}")
    if not space.has_cavity:
        raise SpaceError("simulation space needs a cavity mode")
    if space.n_qubits != params.n_qubits:
        raise SpaceError(f"space holds {space.n_qubits} qubits, protocol uses {params.n_qubits}")
    if space.dim > max_dim:
        raise SpaceError(f"Hilbert-space dimension {space.dim} exceeds the guardrail {max_dim}")

    if frame == "closed-form":
        if g is not None and lam is None:
            lam = g**2 / (4.0 * abs(params.delta))
        return u_total(params, space, lam=lam).full
    if lam is not None and g is None:
        g = (4.0 * abs(params.delta) * lam) ** 0.5

    e_z1, e_z = step_energies(params)
    u3 = u_step3(e_z1, e_z, params.tau, space, targets=params.targets, omega_c=params.omega_c).full

    if frame == "lab":
        if device is None or schedule is None:
            raise ValueError("the lab frame needs the device and the pulse schedule")
        g = params.g_required if g is None else g
        hams = schedule_to_hamiltonians(schedule, device, space, g=g)
        u = None
        for H, step in zip(hams, schedule.steps):
            us = propagator_of(H, 0.0, step.duration, cfg)
            u = us if u is None else us @ u
        return u

    s1, s2 = step_specs(params, g)
    out = []
    for spec in (s1, s2):
        if frame == "dressed":
            drive = h1(spec, space)
            u_int = matexp(drive, -1j * params.tau) @ propagator_of(h2_dressed(spec, space), 0.0, params.tau, cfg)
        else:
            u_int = propagator_of(interaction_hamiltonian(spec, space), 0.0, params.tau, cfg)
        out.append(_frame_factor(params, spec.omega0, spec.qubits, space) @ u_int)
    return u3 @ out[1] @ out[0]
