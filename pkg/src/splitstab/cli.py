"""Command line driver: ``splitstab {list-presets,spectrum,simulate,sweep}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import experiments as ex
from .timeint import INTEGRATORS

logger = logging.getLogger("splitstab")


def _add_time_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--cfl", type=float, help="CFL number (default from config, usually 0.05)")
    p.add_argument("--t-end", type=float, help="final time")
    p.add_argument("--integrator", choices=sorted(INTEGRATORS))
    p.add_argument("--trace-interval", type=float, help="output spacing in time, 0 records every step")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splitstab",
        description="Local stability laboratory for split-form and entropy-conserving DGSEM schemes.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list-presets", help="print the built-in experiment presets")

    p = sub.add_parser("spectrum", help="Jacobian eigenspectrum around the baseflow")
    p.add_argument("config", help="preset name or JSON config file")
    p.add_argument("-o", "--output", default=None, help="output directory (default: ./<name>)")
    p.add_argument("--eps", type=float, help="finite-difference step")
    p.add_argument("--jacobian", choices=ex.JACOBIANS)

    p = sub.add_parser("simulate", help="time integration with trace output")
    p.add_argument("config", help="preset name or JSON config file")
    p.add_argument("-o", "--output", default=None, help="output directory (default: ./<name>)")
    _add_time_flags(p)

    p = sub.add_parser("sweep", help="run a parameter grid")
    p.add_argument("config", help="JSON sweep file with 'base' and 'grid'")
    p.add_argument("-o", "--output", default="sweep", help="output directory")
    p.add_argument("-j", "--jobs", type=int, default=1, help="worker processes")
    return parser


def _with_overrides(cfg: ex.ExperimentConfig, args, mode: str) -> ex.ExperimentConfig:
    changes = {"mode": mode}
    for attr, key in [
        ("cfl", "cfl"),
        ("t_end", "t_end"),
        ("integrator", "integrator"),
        ("trace_interval", "trace_interval"),
        ("eps", "fd_eps"),
        ("jacobian", "jacobian"),
    ]:
        value = getattr(args, attr, None)
        if value is not None:
            changes[key] = value
    return cfg.replace(**changes)


def _cmd_list(_args) -> int:
    for name, cfg in ex.PRESETS.items():
        if cfg.equation == "burgers":
            scheme = f"alpha={cfg.alpha:.4g} surface={cfg.surface_flux}"
            if cfg.volume_mod:
                scheme += f" volume_mod={cfg.volume_mod}"
            grid = f"K={cfg.elements[0]} N={cfg.degree}"
        else:
            scheme = f"volume={cfg.volume_flux} surface={cfg.surface_flux}"
            grid = f"{cfg.elements[0]}x{cfg.elements[1]} N={cfg.degree}"
        print(f"{name:28s} {grid:12s} {scheme}")
    return ex.EXIT_OK


def _cmd_spectrum(args) -> int:
    cfg = _with_overrides(ex.load_config(args.config), args, "spectrum")
    out = Path(args.output or cfg.name)
    report = ex.run_spectrum(cfg)
    ex.write_spectrum(out, report, cfg)
    lam = report.worst_eigenvalue
    print(f"{cfg.name}: max Re = {report.max_real_part:.6g} at {lam.real:.6g}{lam.imag:+.6g}j -> {out}")
    return ex.EXIT_OK


def _cmd_simulate(args) -> int:
    cfg = _with_overrides(ex.load_config(args.config), args, "simulate")
    out = Path(args.output or cfg.name)
    if cfg.equation == "burgers":
        run = ex.run_burgers_growth(cfg)
        ex.write_run(out, run)
        amp = run.trace["amplitude"]
        print(f"{cfg.name}: t={run.t_final:.6g} amplitude {amp[0]:.3e} -> {amp[-1]:.3e} (alpha_max={run.alpha_max:.5g})")
        if not run.completed:
            print(f"{cfg.name}: {run.failure}", file=sys.stderr)
            return ex.EXIT_CRASH
        return ex.EXIT_OK
    run = ex.run_euler_wave(cfg)
    ex.write_run(out, run)
    if run.crash is not None:
        c = run.crash
        print(
            f"{cfg.name}: crashed at t={c.time:.6g} ({c.variable} in element {c.element} node {c.node})",
            file=sys.stderr,
        )
        return ex.EXIT_CRASH
    err = run.trace["l2_error"]
    print(f"{cfg.name}: reached t={run.t_final:.6g}, density L2 error {err[0]:.3e} -> {err[-1]:.3e}")
    return ex.EXIT_OK


def _cmd_sweep(args) -> int:
    try:
        spec = json.loads(Path(args.config).read_text())
    except FileNotFoundError:
        raise ex.ConfigError(f"sweep file {args.config!r} not found") from None
    except json.JSONDecodeError as exc:
        raise ex.ConfigError(f"{args.config}: invalid JSON ({exc})") from exc
    rows = ex.run_sweep(spec, args.output, jobs=args.jobs)
    for row in rows:
        print(f"{row['run']:32s} {row['status']:10s} {row['crash_time']!s:>12s} {row['final_value']!s}")
    print(f"{len(rows)} runs -> {Path(args.output) / 'summary.csv'}")
    return ex.EXIT_OK


_COMMANDS = {
    "list-presets": _cmd_list,
    "spectrum": _cmd_spectrum,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except ex.ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return ex.EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
