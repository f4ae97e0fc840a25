"""
Command-line entry point: ``ntcp {derive,simulate,sweep,verify}``.

Exit codes: 0 success, 1 configuration/parse error, 2 validation failure
(including the dimension guardrail), 3 simulation failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from typing import Optional, Sequence

from . import config as cfgmod
from . import verify as verifymod
from .device import TWO_PI
from .errors import ConfigError, IntegrationError, ProtocolError, SpaceError, TruncationError
from .hilbert import cavity_state, make_space
from .integrator import IntegratorConfig
from .metrics import DEFAULT_SUITE, cavity_insensitivity_suite
from .propagator import ideal_ntcp
from .protocol import derive, validate
from .simulation import FRAMES, simulate_gate

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_SIM = 0, 1, 2, 3

SWEEP_AXES = ("Omega", "Omega_over_delta", "m", "k", "fock_dim", "phase_error")
COLUMNS = ("fidelity", "avg_gate_fidelity", "leakage", "eps0", "eps1", "eps2", "tau_ns", "total_ns", "g_MHz")

THREADS_ENV = "NTCP_THREADS"


def _err(msg: str):
    print(f"ntcp: {msg}", file=sys.stderr)


def _derive(cfg: cfgmod.RunConfig, **override):
    pr = cfg.protocol
    args = dict(m=pr.m, k=pr.k, n=pr.n, Omega=pr.Omega, V0=pr.V0)
    args.update(override)
    if "Omega" in override:
        args["V0"] = None
    return derive(cfg.device, args["m"], args["k"], args["n"], args["Omega"], V0=args["V0"], g=cfg.g_hardware,
                  n_spectators=pr.n_spectators, step3_decoupling=pr.step3_decoupling)


def _integrator(cfg: cfgmod.RunConfig) -> IntegratorConfig:
    s = cfg.simulation
    return IntegratorConfig(method=s.method, step=s.step, steps_per_period=s.steps_per_period)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write(text: str, path: Optional[str]):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _table(rows: list[dict], fmt: str, columns: Sequence[str]) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


# ---------------------------------------------------------------------------


def cmd_derive(cfg: cfgmod.RunConfig, schedule_out: Optional[str] = None) -> int:
    params, sched, report = _derive(cfg)
    lines = [
        f"m = {params.m}, k = {params.k}, n = {params.n}, spectators = {params.n_spectators}",
        f"|delta|/2pi      = {abs(params.delta) / TWO_PI / 1e6:.4f} MHz",
        f"g_required/2pi   = {params.g_required / TWO_PI / 1e6:.4f} MHz",
        f"g_hardware/2pi   = {params.g / TWO_PI / 1e6:.4f} MHz",
        f"lambda/2pi       = {params.lam / TWO_PI / 1e6:.4f} MHz",
        f"tau              = {params.tau * 1e9:.4f} ns",
        f"3 tau            = {params.total_time * 1e9:.4f} ns",
        f"omega0 step (i)  = {params.omega0_step1 / TWO_PI / 1e9:.6f} GHz (flux {params.flux_step1:.6f})",
        f"omega0 step (ii) = {params.omega0_step2 / TWO_PI / 1e9:.6f} GHz (flux {params.flux_step2:.6f})",
        f"Omega/2pi        = {params.Omega / TWO_PI / 1e6:.4f} MHz (V0 = {params.V0 * 1e3:.6f} mV)",
        f"ng1 step (iii)   = {params.ng1_dc_step3:.8f}",
        f"ng  step (iii)   = {params.ng_dc_step3:.8f}",
        f"eps0 = {report.eps0:.4e}  eps1 = {report.eps1:.4e}  eps2 = {report.eps2:.4e}",
        "",
        "validity checks:",
    ]
    checks = validate(params, report)
    for c in checks:
        lines.append(f"  [{c.status.upper():4}] {c.message}")
    print("\n".join(lines))
    if schedule_out:
        _write(sched.to_yaml(), schedule_out)
    if any(c.status == "fail" for c in checks):
        _err("validation failed")
        return EXIT_INVALID
    return EXIT_OK


def _evaluate(cfg: cfgmod.RunConfig, frame: str, overrides: dict) -> dict:
    """One grid point: derive, simulate, score against the ideal gate."""
    fock = overrides.pop("fock_dim", cfg.simulation.fock_dim)
    phase_error = overrides.pop("phase_error", 0.0)
    ratio = overrides.pop("Omega_over_delta", None)
    if ratio is not None:
        m = overrides.get("m", cfg.protocol.m)
        overrides["Omega"] = ratio * cfg.device.omega_c / (m - 1)
    params, sched, report = _derive(cfg, **overrides)
    space = make_space(params.n_qubits, fock)
    if space.dim > cfg.simulation.max_dim:
        raise SpaceError(f"Hilbert-space dimension {space.dim} exceeds the guardrail {cfg.simulation.max_dim}")
    g = params.g if cfg.simulation.coupling == "hardware" else None
    lam = None
    if phase_error:
        base = params.g_required if g is None else g
        lam = base**2 / (4 * abs(params.delta)) * (1.0 + phase_error)
        g = None
    U = simulate_gate(params, space, frame, device=cfg.device, schedule=sched, cfg=_integrator(cfg),
                      g=g, lam=lam, max_dim=cfg.simulation.max_dim)
    ideal = ideal_ntcp(params.n, space.register())
    rep = cavity_insensitivity_suite(U, ideal, [cfg.simulation.cavity_state])
    return {
        "fidelity": rep.process_fidelity,
        "avg_gate_fidelity": rep.avg_gate_fidelity,
        "leakage": rep.leakage,
        "eps0": report.eps0,
        "eps1": report.eps1,
        "eps2": report.eps2,
        "tau_ns": params.tau * 1e9,
        "total_ns": params.total_time * 1e9,
        "g_MHz": params.g_required / TWO_PI / 1e6,
    }


def cmd_simulate(cfg: cfgmod.RunConfig, frame: Optional[str] = None) -> int:
    frame = frame or cfg.simulation.frame
    row = _evaluate(cfg, frame, {})
    row = {"frame": frame, "cavity_state": cfg.simulation.cavity_state, **row}
    _write(_table([row], cfg.output.format, ("frame", "cavity_state") + COLUMNS), cfg.output.path)
    return EXIT_OK


def _parse_axis(spec: str) -> tuple[str, list]:
    if "=" not in spec:
        raise ConfigError(f"axis spec {spec!r} must look like name=v1,v2,...")
    name, values = spec.split("=", 1)
    name = name.strip()
    if name not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {name!r}; choose from {SWEEP_AXES}")
    out = []
    for v in values.split(","):
        v = v.strip()
        if not v:
            continue
        if name in ("m", "k", "fock_dim"):
            try:
                out.append(int(v))
            except ValueError:
                raise ConfigError(f"axis {name} takes integers, got {v!r}") from None
        elif name == "Omega":
            out.append(cfgmod.parse_quantity(v, "frequency") * TWO_PI)
        else:
            try:
                out.append(float(v))
            except ValueError:
                raise ConfigError(f"axis {name} takes numbers, got {v!r}") from None
    if not out:
        raise ConfigError(f"axis {name} has no values")
    return name, sorted(set(out))


def _point(args):
    cfg, frame, names, values = args
    try:
        row = _evaluate(cfg, frame, dict(zip(names, values)))
        row["error"] = ""
    except (ProtocolError, IntegrationError, TruncationError, SpaceError) as exc:
        row = {c: math.nan for c in COLUMNS}
        row["error"] = f"{type(exc).__name__}: {exc}"
    for n, v in zip(names, values):
        row[n] = v / TWO_PI / 1e6 if n == "Omega" else v
    return row


def cmd_sweep(cfg: cfgmod.RunConfig, axes: Sequence[str], frame: Optional[str] = None) -> int:
    if not 1 <= len(axes) <= 2:
        raise ConfigError("give one or two --axis specs")
    parsed = [_parse_axis(a) for a in axes]
    names = [n for n, _ in parsed]
    if len(set(names)) != len(names):
        raise ConfigError("sweep axes must differ")
    frame = frame or cfg.simulation.frame
    grid = list(itertools.product(*[v for _, v in parsed]))
    jobs = [(cfg, frame, names, point) for point in grid]
    threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(_point, jobs))
    else:
        rows = [_point(j) for j in jobs]
    rows.sort(key=lambda r: tuple(r[n] for n in names))
    header = [n if n != "Omega" else "Omega_MHz" for n in names]
    for r in rows:
        if "Omega" in r:
            r["Omega_MHz"] = r.pop("Omega")
    _write(_table(rows, cfg.output.format, header + list(COLUMNS) + ["error"]), cfg.output.path)
    return EXIT_INVALID if any(r["error"] for r in rows) else EXIT_OK


def cmd_verify(tolerance: Optional[float] = None) -> int:
    results = verifymod.run(tolerance)
    print(verifymod.format_matrix(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_INVALID


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ntcp", description="Multi-target controlled-phase gate toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--frame", choices=FRAMES)
        p.add_argument("--seed", type=int, help="reserved; all paths are deterministic")

    p = sub.add_parser("derive", help="derive protocol parameters and the pulse schedule")
    p.add_argument("--config", required=True)
    p.add_argument("--schedule-out", help="write the pulse schedule (YAML) here")
    p.add_argument("--seed", type=int, help="reserved")

    common(sub.add_parser("simulate", help="simulate the gate and report fidelity"))

    p = sub.add_parser("sweep", help="evaluate a one- or two-axis grid")
    common(p)
    p.add_argument("--axis", action="append", required=True, help=f"name=v1,v2,... with name in {SWEEP_AXES}")

    p = sub.add_parser("verify", help="run the oracle-equivalence suite")
    p.add_argument("--tolerance", type=float, help="loosen every bound to at least this value")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARSE
    try:
        if args.command == "verify":
            return cmd_verify(args.tolerance)
        cfg = cfgmod.load(args.config)
        if args.command == "derive":
            return cmd_derive(cfg, args.schedule_out)
        out = replace(cfg.output, path=args.out or cfg.output.path, format=args.format or cfg.output.format)
        cfg = replace(cfg, output=out)
        if args.command == "simulate":
            return cmd_simulate(cfg, args.frame)
        return cmd_sweep(cfg, args.axis, args.frame)
    except ConfigError as exc:
        _err(f"configuration error: {exc}")
        return EXIT_PARSE
    except (ProtocolError, SpaceError) as exc:
        _err(str(exc))
        return EXIT_INVALID
    except (IntegrationError, TruncationError) as exc:
        _err(f"simulation failed: {exc}")
        return EXIT_SIM
    except ValueError as exc:
        _err(f"simulation failed: {exc}")
        return EXIT_SIM


if __name__ == "__main__":
    sys.exit(main())
