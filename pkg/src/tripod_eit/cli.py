"""Command-line front end: ``tripod-eit {sweep,dressed,doppler,windows,match}``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure (the
error class name is printed on standard error).
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import sys
from pathlib import Path

import numpy as np

from .analysis import find_windows, match_velocities
from .atom_model import ordinary
from .broadening import DopplerSettings, doppler_average
from .config import RunConfig, load_config
from .dressed import dressed_components
from .errors import ConfigError, TripodError
from .response import (Spectrum, background_state, channel_drives, chi_values,
                       probe_chi_analytic, susceptibility_prefactor, sweep, transition_dipole)

UNITS = {
    "detuning": "MHz (ordinary frequency); solved internally in rad/us = 2 pi x MHz",
    "chi": "dimensionless linear susceptibility",
    "group_velocity": "m/s",
    "rabi_internal": "rad/us",
}


def _format_csv(header: list[str], columns: list[np.ndarray]) -> str:
    buf = io.StringIO()
    np.savetxt(buf, np.column_stack(columns), fmt="%.12e", delimiter=",",
               header=",".join(header), comments="", newline="\n")
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def _metadata(cfg: RunConfig, channel: str, broadening: str, extra: dict | None = None) -> dict:
    atom, drives = cfg.atom, cfg.drives
    meta = {
        "units": UNITS,
        "channel": channel,
        "broadening": broadening,
        "method": cfg.method,
        "background": cfg.background,
        "coupling_sign": cfg.coupling_sign,
        "dipole_c_m": transition_dipole(atom, channel),
        "prefactor_rad_per_us": susceptibility_prefactor(atom, channel),
        "gamma_mhz": {"gamma2": ordinary(atom.gamma2), "gamma3": ordinary(atom.gamma3),
                      "gamma4": ordinary(atom.gamma4),
                      "gamma43": ordinary(atom.gamma4 + atom.gamma3),
                      "gamma32": ordinary(atom.gamma3 + atom.gamma2)},
        "rabi_mhz": {"probe": ordinary(drives.omega_p), "coupling": ordinary(drives.omega_c),
                     "signal": ordinary(drives.omega_s)},
        "linewidth_mhz": {"probe": ordinary(drives.width_p), "coupling": ordinary(drives.width_c),
                          "signal": ordinary(drives.width_s)},
        "config": cfg.raw,
    }
    meta.update(extra or {})
    return meta


def _write_spectrum(spec: Spectrum, cfg: RunConfig, out: str | None, meta: dict) -> None:
    name = "delta_p_mhz" if spec.channel == "probe" else "delta_s_mhz"
    _emit(_format_csv([name, "re_chi", "im_chi"],
                      [ordinary(spec.grid), spec.values.real, spec.values.imag]), out)
    if out is not None:
        Path(str(out) + ".meta.json").write_text(
            json.dumps(meta, indent=2, sort_keys=True, default=float) + "\n", encoding="utf-8")


def cmd_sweep(cfg: RunConfig, args) -> str:
    channel = args.channel or cfg.channel
    spec = sweep(cfg.atom, cfg.drives, channel, cfg.grid, threads=args.threads,
                 **cfg.sweep_options())
    _write_spectrum(spec, cfg, args.out, _metadata(cfg, channel, spec.broadening))
    return f"sweep: {spec.grid.size} points, channel {channel}, min Im chi {spec.values.imag.min():.4g}"


def cmd_doppler(cfg: RunConfig, args) -> str:
    channel = args.channel or cfg.channel
    settings = cfg.doppler or DopplerSettings(300.0, mass=cfg.atom.mass, carrier=cfg.atom.carrier)
    spec = doppler_average(cfg.atom, cfg.drives, channel, cfg.grid, settings,
                           threads=args.threads, **cfg.sweep_options())
    extra = {"temperature_k": settings.temperature, "nodes": settings.nodes,
             "rule": settings.rule, "doubling_change": spec.metadata.get("doubling_change")}
    _write_spectrum(spec, cfg, args.out, _metadata(cfg, channel, "doppler", extra))
    return (f"doppler: {spec.grid.size} points at T={settings.temperature:g} K, "
            f"min Im chi {spec.values.imag.min():.4g}")


def cmd_dressed(cfg: RunConfig, args) -> str:
    atom, drives = cfg.atom, channel_drives(cfg.drives, "probe", cfg.grid)
    pops = background_state(atom, drives, "probe", cfg.background)
    response = probe_chi_analytic(atom, drives, pops, coupling_sign=cfg.coupling_sign)
    plus, minus = dressed_components(atom, drives, response.rho_lin_ratio)
    k = response.prefactor
    cols = [ordinary(cfg.grid), (k * plus).real, (k * plus).imag, (k * minus).real,
            (k * minus).imag, response.chi.real, response.chi.imag]
    header = ["delta_p_mhz", "re_chi_plus", "im_chi_plus", "re_chi_minus", "im_chi_minus",
              "re_chi", "im_chi"]
    _emit(_format_csv(header, cols), args.out)
    if args.out is not None:
        meta = _metadata(cfg, "probe", "bare", {"columns": "chi_plus/minus = prefactor * "
                                                "rho_1plus/minus / Omega_p"})
        Path(str(args.out) + ".meta.json").write_text(
            json.dumps(meta, indent=2, sort_keys=True, default=float) + "\n", encoding="utf-8")
    return f"dressed: {cfg.grid.size} points"


def cmd_windows(cfg: RunConfig, args) -> str:
    channels = [args.channel] if args.channel else ["probe", "signal"]
    reports = []
    for channel in channels:
        spec = sweep(cfg.atom, cfg.drives, channel, cfg.grid, threads=args.threads,
                     **cfg.sweep_options())

        def refine(grid, channel=channel):
            return chi_values(cfg.atom, channel_drives(cfg.drives, channel, grid), channel,
                              **cfg.sweep_options())

        reports += find_windows(spec, carrier=cfg.atom.carrier, refine=refine)
    _emit(json.dumps([r.to_dict() for r in reports], indent=2) + "\n", args.out)
    summary = ", ".join(f"{r.channel} {r.center_mhz:.3f} MHz v={r.group_velocity_mps:.4g} m/s"
                        for r in reports)
    return f"windows: {summary}"


def cmd_match(cfg: RunConfig, args) -> str:
    result = match_velocities(cfg.atom, cfg.drives, cfg.grid, cfg.grid, **cfg.sweep_options())
    g4 = cfg.atom.gamma4
    doc = {
        "omega_p_gamma4": result.omega_p / g4,
        "omega_p_mhz": ordinary(result.omega_p),
        "omega_s_gamma4": cfg.drives.omega_s / g4,
        "relative_mismatch": result.mismatch,
        "probe_windows": [r.to_dict() for r in result.probe_windows],
        "signal_windows": [r.to_dict() for r in result.signal_windows],
        "evaluations": result.evaluations,
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return (f"match: Omega_p = {result.omega_p / g4:.4f} gamma4, "
            f"relative mismatch {result.mismatch:.2e}")


COMMANDS = {"sweep": cmd_sweep, "dressed": cmd_dressed, "doppler": cmd_doppler,
            "windows": cmd_windows, "match": cmd_match}
HELP = {
    "sweep": "susceptibility spectrum as CSV",
    "dressed": "probe spectrum split into the two dressed channels, CSV",
    "doppler": "Maxwell-averaged spectrum as CSV",
    "windows": "transparency-window report as JSON",
    "match": "probe Rabi frequency matching the first-window group velocities, JSON",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tripod-eit",
                                     description="Tripod-atom double EIT spectra and windows.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=HELP[name])
        p.add_argument("--config", required=True,
                       help="JSON configuration file or bundled configuration name")
        p.add_argument("--out", help="output path (default: the config's output.path or stdout)")
        p.add_argument("--channel", choices=["probe", "signal"])
        p.add_argument("--method", choices=["analytic", "numeric"])
        p.add_argument("--threads", type=int, default=1)
    return parser


def run(argv: list[str] | None = None) -> int:
    """Parse ``argv``, execute one subcommand and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        cfg = load_config(args.config)
        if args.method:
            cfg = dataclasses.replace(cfg, method=args.method)
        if args.out is None:
            args.out = cfg.output
        summary = COMMANDS[args.command](cfg, args)
    except TripodError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    print(summary, file=sys.stderr if args.out is None else sys.stdout)
    return 0


def main() -> None:
    sys.exit(run())
