"""
Charge-qubit and cavity hardware model.

Maps the physical knobs of each qubit (SQUID flux, dc gate charge, ac gate
drive) and the fixed hardware constants onto Hamiltonian coefficients.
Energies are in joules, frequencies in rad/s, everything else SI.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from scipy.constants import e as E_CHARGE
from scipy.constants import h as PLANCK
from scipy.constants import hbar as HBAR
from scipy.constants import k as K_B

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DeviceParams:
    """Hardware constants of N identical charge qubits in a coplanar cavity.

    ``eps_e`` (effective dielectric constant) is recorded for provenance only;
    none of the formulas below use it.  ``E_c`` (joules), when given, replaces
    the capacitance formula in every charging-energy dependent quantity.
    """

    C_g: float
    C_J0: float
    E_J0: float
    omega_c: float
    L: float
    c0: float
    V0: float = 0.0
    Q: Optional[float] = None
    T1: Optional[float] = None
    T2: Optional[float] = None
    Delta_gap: Optional[float] = None
    temperature: Optional[float] = None
    eps_e: Optional[float] = None
    E_c: Optional[float] = None

    def __post_init__(self):
        for name in ("C_g", "C_J0", "E_J0", "omega_c", "L", "c0"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
        if self.V0 < 0:
            raise ValueError("V0 must be nonnegative")
        for name in ("Q", "T1", "T2", "Delta_gap", "temperature", "E_c"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValueError(f"{name} must be strictly positive when given, got {value!r}")


@dataclass(frozen=True)
class QubitKnobs:
    """Per-qubit control settings: flux Phi/Phi_0, dc gate charge, ac gate drive."""

    flux_ratio: float
    ng_dc: float
    ac_amplitude: float = 0.0
    ac_frequency: float = 0.0
    ac_phase: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.flux_ratio <= 1.0:
            raise ValueError(f"flux_ratio must lie in [0, 1], got {self.flux_ratio}")
        if not 0.0 <= self.ng_dc <= 1.0:
            raise ValueError(f"ng_dc must lie in [0, 1], got {self.ng_dc}")
        if self.ac_amplitude < 0:
            raise ValueError("ac_amplitude must be nonnegative")

    @property
    def is_decoupled(self) -> bool:
        """Zero free Hamiltonian, no drive, and (by construction) no cavity coupling."""
        return self.flux_ratio == 0.5 and self.ng_dc == 0.5 and self.ac_amplitude == 0.0


def reference_device(**overrides) -> DeviceParams:
    """The hardware set of the five-target proposal (C_g = 1 aF, C_J0 = 300 aF, ...)."""
    values = dict(
        C_g=1e-18,
        C_J0=300e-18,
        E_J0=PLANCK * 5e9,
        omega_c=TWO_PI * 10e9,
        L=12e-3,
        c0=0.22e-18 / 1e-6,
        Q=1e4,
        T1=7.3e-6,
        T2=500e-9,
        eps_e=6.3,
    )
    values.update(overrides)
    return DeviceParams(**values)


def charging_energy(p: DeviceParams) -> float:
    """E_c = e^2 / (2 C_g + 4 C_J0), joules, unless the device pins ``E_c``."""
    if p.E_c is not None:
        return p.E_c
    return E_CHARGE**2 / (2.0 * p.C_g + 4.0 * p.C_J0)


def josephson_energy(p: DeviceParams, flux_ratio: float) -> float:
    """E_J(Phi) = 2 E_J0 cos(pi Phi / Phi_0); exactly zero at half a flux quantum."""
    # sin(pi(1/2 - f)) == cos(pi f) but evaluates to an exact 0.0 at f = 1/2
    return 2.0 * p.E_J0 * math.sin(math.pi * (0.5 - flux_ratio))


def flux_for_frequency(p: DeviceParams, omega0: float) -> float:
    """Flux ratio in [0, 1/2] with ``josephson_energy(p, f) / hbar == omega0``."""
    ratio = HBAR * omega0 / (2.0 * p.E_J0)
    if not 0.0 <= ratio <= 1.0:
        raise ValueError(
            f"qubit frequency {omega0 / TWO_PI:.6g} Hz exceeds the SQUID maximum "
            f"{2 * p.E_J0 / HBAR / TWO_PI:.6g} Hz"
        )
    return math.acos(ratio) / math.pi


def ez_energy(p: DeviceParams, ng_dc: float) -> float:
    """E_z = -2 E_c (1 - 2 n_g), joules."""
    return -2.0 * charging_energy(p) * (1.0 - 2.0 * ng_dc)


def ng_for_ez(p: DeviceParams, E_z: float) -> float:
    return 0.5 + E_z / (4.0 * charging_energy(p))


def gate_voltage(p: DeviceParams, ng_dc: float) -> float:
    """dc gate voltage for a given n_g = C_g V / (2e)."""
    return 2.0 * E_CHARGE * ng_dc / p.C_g


def vacuum_voltage(p: DeviceParams) -> float:
    """Zero-point gate voltage at a field antinode, V = sqrt(hbar omega_c / (L c0))."""
    return math.sqrt(HBAR * p.omega_c / (p.L * p.c0))


def coupling_g(p: DeviceParams, E_c: Optional[float] = None) -> float:
    """g = 2 E_c C_g V_qu / (hbar e), rad/s.  ``E_c`` overrides the capacitance formula."""
    E_c = charging_energy(p) if E_c is None else E_c
    return 2.0 * E_c * p.C_g * vacuum_voltage(p) / (HBAR * E_CHARGE)


def rabi_omega(p: DeviceParams, V0: Optional[float] = None, E_c: Optional[float] = None) -> float:
    """Omega = 2 E_c C_g V0 / (hbar e), rad/s; ``V0`` defaults to ``p.V0``."""
    V0 = p.V0 if V0 is None else V0
    if V0 < 0:
        raise ValueError("drive amplitude must be nonnegative")
    E_c = charging_energy(p) if E_c is None else E_c
    return 2.0 * E_c * p.C_g * V0 / (HBAR * E_CHARGE)


def drive_amplitude_for(p: DeviceParams, Omega: float) -> float:
    """Inverse of :func:`rabi_omega`: the ac amplitude (V) giving Rabi frequency ``Omega``."""
    return Omega * HBAR * E_CHARGE / (2.0 * charging_energy(p) * p.C_g)


def decoupled_knobs() -> QubitKnobs:
    return QubitKnobs(flux_ratio=0.5, ng_dc=0.5)


def kappa_inverse(p: DeviceParams) -> Optional[float]:
    """Cavity lifetime Q / omega_c, seconds."""
    return None if p.Q is None else p.Q / p.omega_c


def charge_regime(p: DeviceParams, threshold: float = 3.0) -> list[tuple[str, float, bool]]:
    """Ratios behind Delta >> E_c >> E_J0 >> k_B T.

    Only links whose optional inputs are present are reported.  The result is
    informational; nothing here raises.
    """
    E_c = charging_energy(p)
    out = [("E_c/E_J0", E_c / p.E_J0, E_c / p.E_J0 >= threshold)]
    if p.Delta_gap is not None:
        r = p.Delta_gap / E_c
        out.insert(0, ("Delta/E_c", r, r >= threshold))
    if p.temperature is not None:
        r = p.E_J0 / (K_B * p.temperature)
        out.append(("E_J0/kT", r, r >= threshold))
    return out
