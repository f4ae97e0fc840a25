"""
Pulse-schedule synthesis for the three-step NTCP gate.

``derive`` turns hardware constants plus the integers (m, k, n) into every
frequency, duration and knob setting of the protocol, and a validity report
that compares the result against the approximations the gate relies on.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import yaml

from .device import (
    HBAR,
    TWO_PI,
    DeviceParams,
    QubitKnobs,
    charge_regime,
    charging_energy,
    coupling_g,
    decoupled_knobs,
    drive_amplitude_for,
    flux_for_frequency,
    kappa_inverse,
    rabi_omega,
)
from .errors import ProtocolError
from .hamiltonian import StepHamiltonianSpec, TimeDependentHamiltonian, full_hamiltonian
from .hilbert import HilbertSpace

DECOUPLING_MODES = ("cavity", "dc")


@dataclass(frozen=True)
class ProtocolParams:
    """Derived protocol quantities; angular frequencies in rad/s, times in s."""

    m: int
    k: int
    n: int
    omega_c: float
    delta: float
    delta_prime: float
    tau: float
    tau_prime: float
    lam: float
    lam_prime: float
    g_required: float
    g: float
    Omega: float
    V0: float
    omega0_step1: float
    omega0_step2: float
    drive_omega_step1: float
    drive_omega_step2: float
    flux_step1: float
    flux_step2: float
    ng1_dc_step3: float
    ng_dc_step3: float
    E_c: float
    n_spectators: int = 0

    @property
    def total_time(self) -> float:
        return 3.0 * self.tau

    @property
    def n_qubits(self) -> int:
        return self.n + 1 + self.n_spectators

    @property
    def active(self) -> tuple:
        return tuple(range(1, self.n + 2))

    @property
    def targets(self) -> tuple:
        return tuple(range(2, self.n + 2))

    def with_lam(self, lam: float) -> "ProtocolParams":
        """Copy with both coupling rates replaced (phase-error studies)."""
        from dataclasses import replace

        return replace(self, lam=lam, lam_prime=lam)


@dataclass(frozen=True)
class Step:
    label: str
    duration: float
    knobs: tuple
    decoupling: Optional[str] = None

    @property
    def cavity_detuned(self) -> bool:
        return self.decoupling == "cavity"


@dataclass(frozen=True)
class PulseSchedule:
    steps: tuple

    @property
    def total_time(self) -> float:
        return sum(s.duration for s in self.steps)

    def to_dict(self) -> dict:
        """Human-units document: ns, GHz, mV, radians."""
        out = []
        for s in self.steps:
            qubits = []
            for j, kn in enumerate(s.knobs, start=1):
                qubits.append({
                    "qubit": j,
                    "flux_ratio": kn.flux_ratio,
                    "ng_dc": kn.ng_dc,
                    "ac_amplitude_mV": kn.ac_amplitude * 1e3,
                    "ac_frequency_GHz": kn.ac_frequency / TWO_PI / 1e9,
                    "ac_phase": kn.ac_phase,
                })
            out.append({
                "label": s.label,
                "duration_ns": s.duration * 1e9,
                "decoupling": s.decoupling,
                "qubits": qubits,
            })
        return {"steps": out}

    @classmethod
    def from_dict(cls, doc: dict) -> "PulseSchedule":
        steps = []
        for s in doc["steps"]:
            knobs = tuple(
                QubitKnobs(
                    flux_ratio=q["flux_ratio"],
                    ng_dc=q["ng_dc"],
                    ac_amplitude=q["ac_amplitude_mV"] * 1e-3,
                    ac_frequency=q["ac_frequency_GHz"] * 1e9 * TWO_PI,
                    ac_phase=q["ac_phase"],
                )
                for q in s["qubits"]
            )
            steps.append(Step(s["label"], s["duration_ns"] * 1e-9, knobs, s.get("decoupling")))
        return cls(tuple(steps))

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)


@dataclass
class ValidityReport:
    eps0: float
    eps1: float
    eps2: float
    ratio_Omega_over_delta: float
    ratio_Omega_over_g: float
    g_mismatch: float
    total_time: float
    timescales: dict = field(default_factory=dict)
    charge_regime: list = field(default_factory=list)
    eps_at_g_required: tuple = ()

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Thresholds:
    ratio_warn: float = 5.0
    ratio_fail: float = 2.0
    g_mismatch_warn: float = 0.05


@dataclass(frozen=True)
class Check:
    name: str
    status: str
    value: float
    message: str


def epsilons(p, Omega: float, g: float, lam: float, n: int) -> tuple[float, float, float]:
    """Deviations from the degeneracy point: hbar(Omega+g)/4E_c, hbar(4n lam+Omega)/8E_c, hbar lam/2E_c.

    ``p`` is a :class:`DeviceParams` or a charging energy in joules.
    """
    E_c = charging_energy(p) if isinstance(p, DeviceParams) else float(p)
    if not E_c > 0:
        raise ValueError("charging energy must be positive")
    eps0 = HBAR * (Omega + g) / (4.0 * E_c)
    eps1 = HBAR * (4.0 * n * lam + Omega) / (8.0 * E_c)
    eps2 = HBAR * lam / (2.0 * E_c)
    return eps0, eps1, eps2


def _flux(p: DeviceParams, omega0: float, what: str) -> float:
    try:
        return flux_for_frequency(p, omega0)
    except ValueError as exc:
        raise ProtocolError(f"{what}: {exc}") from None


def derive(
    p: DeviceParams,
    m: int,
    k: int,
    n: int,
    Omega: Optional[float] = None,
    *,
    V0: Optional[float] = None,
    g: Optional[float] = None,
    n_spectators: int = 0,
    step3_decoupling: str = "cavity",
) -> tuple[ProtocolParams, PulseSchedule, ValidityReport]:
    """Solve the protocol constraints for ``(m, k, n)``.

    Exactly one of ``Omega`` (rad/s) and ``V0`` (volts) sets the drive.  ``g``
    is the coupling the hardware actually provides (default: circuit
    formula); it enters the mismatch figure and the reported deviations
    eps0..eps2, while the protocol itself runs at ``g_required``.
    """
    if int(m) != m or m <= 2:
        raise ProtocolError("m must exceed 2")
    if int(k) != k or k < 0:
        raise ProtocolError("k must be a nonnegative integer")
    if int(n) != n or n < 2:
        raise ProtocolError("n must be an integer >= 2")
    if n_spectators < 0:
        raise ProtocolError("n_spectators must be nonnegative")
    if step3_decoupling not in DECOUPLING_MODES:
        raise ProtocolError(f"step3_decoupling must be one of {DECOUPLING_MODES}")
    if (Omega is None) == (V0 is None):
        raise ProtocolError("give exactly one of Omega and V0")
    m, k, n = int(m), int(k), int(n)
    if Omega is None:
        Omega = rabi_omega(p, V0)
    else:
        V0 = drive_amplitude_for(p, Omega)
    if not Omega > 0:
        raise ProtocolError("Omega must be positive")

    wc = p.omega_c
    delta = -wc / (m - 1)
    delta_prime = wc / (m - 1)
    tau = TWO_PI / abs(delta)
    g_req = abs(delta) * math.sqrt(2 * k + 1) / 2.0
    lam = g_req**2 / (4.0 * abs(delta))
    omega0_1 = 0.5 * m * wc / (m - 1)
    omega0_2 = 0.5 * (m - 2) * wc / (m - 1)
    flux1 = _flux(p, omega0_1, "step (i)")
    flux2 = _flux(p, omega0_2, "step (ii)")

    E_c = charging_energy(p)
    ng1 = 0.5 - HBAR * (4.0 * n * lam + Omega) / (8.0 * E_c)
    ng = 0.5 - HBAR * lam / (2.0 * E_c)
    if not (0.0 <= ng1 <= 1.0 and 0.0 <= ng <= 1.0):
        raise ProtocolError("step (iii) gate charges fall outside [0, 1]; Omega or lambda too large for E_c")

    g_hw = coupling_g(p) if g is None else g
    params = ProtocolParams(
        m=m, k=k, n=n, omega_c=wc, delta=delta, delta_prime=delta_prime, tau=tau, tau_prime=tau,
        lam=lam, lam_prime=lam, g_required=g_req, g=g_hw, Omega=Omega, V0=V0,
        omega0_step1=omega0_1, omega0_step2=omega0_2,
        drive_omega_step1=2.0 * omega0_1, drive_omega_step2=2.0 * omega0_2,
        flux_step1=flux1, flux_step2=flux2, ng1_dc_step3=ng1, ng_dc_step3=ng,
        E_c=E_c, n_spectators=n_spectators,
    )

    spect = (decoupled_knobs(),) * n_spectators
    drive1 = QubitKnobs(flux1, 0.5, V0, 2.0 * omega0_1, 0.0)
    drive2 = QubitKnobs(flux2, 0.5, V0, 2.0 * omega0_2, math.pi)
    steps = (
        Step("step (i)", tau, (drive1,) * (n + 1) + spect),
        Step("step (ii)", tau, (decoupled_knobs(),) + (drive2,) * n + spect),
        Step("step (iii)", tau,
             (QubitKnobs(0.5, ng1),) + (QubitKnobs(0.5, ng),) * n + spect, step3_decoupling),
    )
    schedule = PulseSchedule(steps)

    # deviations of the device as built: hardware g and the rate it implies
    e0, e1, e2 = epsilons(E_c, Omega, g_hw, g_hw**2 / (4.0 * abs(delta)), n)
    total = 3.0 * tau
    timescales = {}
    for name, value in (("T1", p.T1), ("T2", p.T2), ("kappa_inv", kappa_inverse(p))):
        if value is not None:
            timescales[name] = value
    report = ValidityReport(
        eps0=e0, eps1=e1, eps2=e2,
        ratio_Omega_over_delta=Omega / abs(delta),
        ratio_Omega_over_g=Omega / g_req,
        g_mismatch=abs(g_hw - g_req) / g_req,
        total_time=total,
        timescales=timescales,
        charge_regime=charge_regime(p),
        eps_at_g_required=epsilons(E_c, Omega, g_req, lam, n),
    )
    return params, schedule, report


def _ratio_check(name: str, value: float, th: Thresholds) -> Check:
    if value < th.ratio_fail:
        return Check(name, "fail", value, f"{name} = {value:.3g} < {th.ratio_fail}: strong-drive regime violated")
    if value < th.ratio_warn:
        return Check(name, "warn", value, f"{name} = {value:.3g} < {th.ratio_warn}: strong-drive regime marginal")
    return Check(name, "pass", value, f"{name} = {value:.3g}")


def validate(params: ProtocolParams, report: ValidityReport, thresholds: Thresholds = Thresholds()) -> list[Check]:
    """Pass/warn/fail list for every approximation the gate depends on."""
    checks = [
        _ratio_check("Omega/|delta|", report.ratio_Omega_over_delta, thresholds),
        _ratio_check("Omega/g", report.ratio_Omega_over_g, thresholds),
    ]
    status = "warn" if report.g_mismatch > thresholds.g_mismatch_warn else "pass"
    checks.append(Check("g_mismatch", status, report.g_mismatch,
                        f"hardware g differs from g_required by {100 * report.g_mismatch:.1f}%"))
    for name, value in report.timescales.items():
        ok = report.total_time < value
        checks.append(Check(f"t_op<{name}", "pass" if ok else "fail", value / report.total_time,
                            f"t_op = {report.total_time * 1e9:.2f} ns vs {name} = {value * 1e9:.1f} ns"))
    for name, ratio, ok in report.charge_regime:
        checks.append(Check(name, "pass" if ok else "warn", ratio, f"{name} = {ratio:.3g}"))
    # the step-(iii) construction assumes small deviations from degeneracy
    for name in ("eps0", "eps1", "eps2"):
        value = getattr(report, name)
        checks.append(Check(name, "pass" if value < 0.1 else "warn", value, f"{name} = {value:.3g}"))
    return checks


def step_specs(params: ProtocolParams, g: Optional[float] = None) -> tuple[StepHamiltonianSpec, StepHamiltonianSpec]:
    """Interaction-picture descriptions of steps (i) and (ii)."""
    g = params.g_required if g is None else g
    s1 = StepHamiltonianSpec(0.0, params.delta, g, params.Omega, params.active, params.omega0_step1)
    s2 = StepHamiltonianSpec(math.pi, params.delta_prime, g, params.Omega, params.targets, params.omega0_step2)
    return s1, s2


def schedule_to_hamiltonians(sched: PulseSchedule, p: DeviceParams, space: HilbertSpace,
                             g: Optional[float] = None) -> list[TimeDependentHamiltonian]:
    """Lab-frame Hamiltonian of each step; a decoupled step keeps only w_c a^dag a on the cavity."""
    out = []
    for step in sched.steps:
        if len(step.knobs) != space.n_qubits:
            raise ProtocolError(f"{step.label}: {len(step.knobs)} knob sets for {space.n_qubits} qubits")
        if step.decoupling is not None:
            if any(kn.ac_amplitude != 0.0 for kn in step.knobs):
                raise ProtocolError(f"{step.label}: ac drive must be off while the cavity is decoupled")
            if any(kn.flux_ratio != 0.5 for kn in step.knobs):
                raise ProtocolError(f"{step.label}: every SQUID must sit at half a flux quantum")
        H = full_hamiltonian(p, step.knobs, space, g=g, cavity_coupled=step.decoupling is None)
        H.label = step.label
        out.append(H)
    return out


def reference_protocol(n: int = 5, **overrides):
    """Five-target parameter set: m = 112, k = 2, Omega/2pi = 600 MHz, g/2pi = 100 MHz, E_c/h = 32 GHz."""
    from .device import PLANCK, reference_device

    dev = reference_device(E_c=PLANCK * 32e9, **overrides)
    return dev, derive(dev, 112, 2, n, Omega=TWO_PI * 600e6, g=TWO_PI * 100e6)


def search(p: DeviceParams, n: int, Omega: float, m_range: Sequence[int], k_range: Sequence[int],
           g_available: Optional[float] = None, g_tol: float = 0.05) -> list[ProtocolParams]:
    """Exhaustive scan over (m, k); keeps combinations whose g_required is within ``g_tol`` of ``g_available``.

    Sorted by total gate time, then (m, k).
    """
    hits = []
    for m in m_range:
        for k in k_range:
            try:
                params, _, _ = derive(p, m, k, n, Omega=Omega, g=g_available)
            except ProtocolError:
                continue
            if g_available is not None and abs(params.g_required - g_available) > g_tol * g_available:
                continue
            hits.append(params)
    return sorted(hits, key=lambda q: (q.total_time, q.m, q.k))
