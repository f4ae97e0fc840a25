"""
Run configuration: a YAML document with explicit unit suffixes.

Frequencies are written as ordinary frequencies (``10 GHz``) and converted
to rad/s; energies are written as frequencies ``E/h`` and converted to
joules.  ``dump`` writes the canonical SI form, which parses back to the
same configuration.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, fields
from typing import Any, Optional

import yaml

from .device import PLANCK, TWO_PI, DeviceParams
from .errors import ConfigError
from .simulation import FRAMES

_PREFIX = {"": 1.0, "k": 1e3, "M": 1e6, "G": 1e9, "m": 1e-3, "u": 1e-6, "µ": 1e-6, "n": 1e-9, "p": 1e-12,
           "f": 1e-15, "a": 1e-18, "c": 1e-2}

_BASE = {"Hz": "frequency", "s": "time", "F": "capacitance", "m": "length", "V": "voltage", "K": "temperature",
         "F/m": "capacitance_per_length"}

# field -> (dimension, conversion from the SI reading)
_DEVICE_FIELDS = {
    "C_g": ("capacitance", 1.0),
    "C_J0": ("capacitance", 1.0),
    "E_J0": ("frequency", PLANCK),
    "omega_c": ("frequency", TWO_PI),
    "L": ("length", 1.0),
    "c0": ("capacitance_per_length", 1.0),
    "V0": ("voltage", 1.0),
    "Q": (None, 1.0),
    "T1": ("time", 1.0),
    "T2": ("time", 1.0),
    "Delta_gap": ("frequency", PLANCK),
    "temperature": ("temperature", 1.0),
    "eps_e": (None, 1.0),
    "E_c": ("frequency", PLANCK),
}
_EXTRA_DEVICE = {"g": ("frequency", TWO_PI)}

_CANON_UNIT = {"frequency": "Hz", "time": "s", "capacitance": "F", "length": "m", "voltage": "V",
               "temperature": "K", "capacitance_per_length": "F/m"}

_QTY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-zµ/]*)\s*$")


def parse_quantity(value: Any, dim: Optional[str]) -> float:
    """``'10 GHz'`` -> 1e10 (SI).  Bare numbers are accepted only for dimensionless fields."""
    if isinstance(value, bool):
        raise ConfigError(f"expected a quantity, got {value!r}")
    if isinstance(value, (int, float)):
        if dim is not None:
            raise ConfigError(f"{value!r} needs a unit ({_CANON_UNIT[dim]} or a prefixed form)")
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"expected a quantity, got {value!r}")
    mt = _QTY.match(value)
    if not mt:
        raise ConfigError(f"cannot parse quantity {value!r}")
    number, unit = float(mt.group(1)), mt.group(2)
    if dim is None:
        if unit:
            raise ConfigError(f"{value!r} should be dimensionless")
        return number
    if dim == "capacitance_per_length":
        # c0 is written like '0.22 aF/um'
        if "/" not in unit:
            raise ConfigError(f"{value!r} needs a capacitance-per-length unit such as aF/um")
        num, den = unit.split("/", 1)
        return number * _unit_scale(num, "F", value) / _unit_scale(den, "m", value)
    return number * _unit_scale(unit, _CANON_UNIT[dim], value)


def _unit_scale(unit: str, base: str, raw) -> float:
    if not unit.endswith(base):
        raise ConfigError(f"{raw!r}: unit {unit!r} is not a {base} unit")
    prefix = unit[: len(unit) - len(base)]
    if prefix not in _PREFIX:
        raise ConfigError(f"{raw!r}: unknown prefix {prefix!r}")
    return _PREFIX[prefix]


class _UniqueKeyLoader(yaml.SafeLoader):
    pass


def _construct_mapping(loader, node, deep=False):
    seen = set()
    for key_node, _ in node.value:
        key = loader.construct_object(key_node, deep=deep)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r} (line {key_node.start_mark.line + 1})")
        seen.add(key)
    return loader.construct_mapping(node, deep)


_UniqueKeyLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)


@dataclass(frozen=True)
class ProtocolSpec:
    m: int
    k: int
    n: int
    Omega: Optional[float] = None   # rad/s
    V0: Optional[float] = None      # volts
    n_spectators: int = 0
    step3_decoupling: str = "cavity"


@dataclass(frozen=True)
class SimulationSpec:
    fock_dim: int = 10
    frame: str = "closed-form"
    cavity_state: str = "vacuum"
    method: str = "piecewise-exponential"
    step: Optional[float] = None    # seconds
    steps_per_period: int = 200
    coupling: str = "required"      # or "hardware"
    max_dim: int = 100_000


@dataclass(frozen=True)
class OutputSpec:
    format: str = "csv"
    path: Optional[str] = None


@dataclass(frozen=True)
class RunConfig:
    device: DeviceParams
    protocol: ProtocolSpec
    simulation: SimulationSpec = SimulationSpec()
    output: OutputSpec = OutputSpec()
    g_hardware: Optional[float] = None   # rad/s


def _take(block: dict, name: str, allowed: set):
    if not isinstance(block, dict):
        raise ConfigError(f"'{name}' must be a mapping")
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in '{name}': {sorted(unknown)}")


def _int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    return value


def from_dict(doc: Any) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a mapping")
    _take(doc, "top level", {"device", "protocol", "simulation", "output"})
    for req in ("device", "protocol"):
        if req not in doc:
            raise ConfigError(f"missing '{req}' block")

    dev = doc["device"]
    _take(dev, "device", set(_DEVICE_FIELDS) | set(_EXTRA_DEVICE))
    kwargs = {}
    for key, value in dev.items():
        dim, conv = {**_DEVICE_FIELDS, **_EXTRA_DEVICE}[key]
        kwargs[key] = parse_quantity(value, dim) * conv
    g_hw = kwargs.pop("g", None)
    try:
        device = DeviceParams(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"device block: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"device block: {exc}") from None

    pr = doc["protocol"]
    _take(pr, "protocol", {"m", "k", "n", "Omega", "V0", "n_spectators", "step3_decoupling"})
    for req in ("m", "k", "n"):
        if req not in pr:
            raise ConfigError(f"protocol block lacks '{req}'")
    if ("Omega" in pr) == ("V0" in pr):
        raise ConfigError("protocol block needs exactly one of Omega and V0")
    protocol = ProtocolSpec(
        m=_int(pr["m"], "m"), k=_int(pr["k"], "k"), n=_int(pr["n"], "n"),
        Omega=parse_quantity(pr["Omega"], "frequency") * TWO_PI if "Omega" in pr else None,
        V0=parse_quantity(pr["V0"], "voltage") if "V0" in pr else None,
        n_spectators=_int(pr.get("n_spectators", 0), "n_spectators"),
        step3_decoupling=str(pr.get("step3_decoupling", "cavity")),
    )

    si = doc.get("simulation", {}) or {}
    _take(si, "simulation", {f.name for f in fields(SimulationSpec)})
    frame = si.get("frame", "closed-form")
    if frame not in FRAMES:
        raise ConfigError(f"frame must be one of {FRAMES}, got {frame!r}")
    coupling = si.get("coupling", "required")
    if coupling not in ("required", "hardware"):
        raise ConfigError("coupling must be 'required' or 'hardware'")
    simulation = SimulationSpec(
        fock_dim=_int(si.get("fock_dim", 10), "fock_dim"),
        frame=frame,
        cavity_state=str(si.get("cavity_state", "vacuum")),
        method=str(si.get("method", "piecewise-exponential")),
        step=parse_quantity(si["step"], "time") if si.get("step") is not None else None,
        steps_per_period=_int(si.get("steps_per_period", 200), "steps_per_period"),
        coupling=coupling,
        max_dim=_int(si.get("max_dim", 100_000), "max_dim"),
    )

    out = doc.get("output", {}) or {}
    _take(out, "output", {"format", "path"})
    fmt = out.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("output format must be csv or json")
    output = OutputSpec(fmt, out.get("path"))
    return RunConfig(device, protocol, simulation, output, g_hw)


def loads(text: str) -> RunConfig:
    try:
        doc = yaml.load(text, Loader=_UniqueKeyLoader)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML: {exc}") from None
    return from_dict(doc)


def load(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None


def _q(value: float, unit: str) -> str:
    return f"{value!r} {unit}"


def to_dict(cfg: RunConfig) -> dict:
    """Canonical SI form (Hz for every frequency and energy, F, m, s, V, K)."""
    dev = {}
    for key, (dim, conv) in _DEVICE_FIELDS.items():
        value = getattr(cfg.device, key)
        if value is None or (key == "V0" and value == 0.0):
            continue
        dev[key] = value / conv if dim is None else _q(value / conv, _CANON_UNIT[dim])
    if cfg.g_hardware is not None:
        dev["g"] = _q(cfg.g_hardware / TWO_PI, "Hz")
    p = cfg.protocol
    prot = {"m": p.m, "k": p.k, "n": p.n}
    if p.Omega is not None:
        prot["Omega"] = _q(p.Omega / TWO_PI, "Hz")
    else:
        prot["V0"] = _q(p.V0, "V")
    prot["n_spectators"] = p.n_spectators
    prot["step3_decoupling"] = p.step3_decoupling
    s = cfg.simulation
    sim = {
        "fock_dim": s.fock_dim, "frame": s.frame, "cavity_state": s.cavity_state, "method": s.method,
        "step": None if s.step is None else _q(s.step, "s"), "steps_per_period": s.steps_per_period,
        "coupling": s.coupling, "max_dim": s.max_dim,
    }
    return {"device": dev, "protocol": prot, "simulation": sim,
            "output": {"format": cfg.output.format, "path": cfg.output.path}}


def dumps(cfg: RunConfig) -> str:
    return yaml.safe_dump(to_dict(cfg), sort_keys=False)


REFERENCE_CONFIG = """\
device:
  C_g: 1 aF
  C_J0: 300 aF
  E_J0: 5 GHz
  E_c: 32 GHz
  omega_c: 10 GHz
  L: 12 mm
  c0: 0.22 aF/um
  Q: 10000
  T1: 7.3 us
  T2: 500 ns
  eps_e: 6.3
  g: 100 MHz
protocol:
  m: 112
  k: 2
  n: 5
  Omega: 600 MHz
simulation:
  fock_dim: 10
  frame: closed-form
  cavity_state: vacuum
output:
  format: csv
"""
