"""Laser-linewidth dephasing and Doppler (Maxwell) averaging of spectra.

Beams are taken co-propagating along one axis with nearly equal optical
frequencies, so an atom moving with velocity v sees every one-photon detuning
reduced by the same k v while all two-photon detunings are unchanged.

Two velocity rules are available.  ``"trapezoid"`` (default) samples the
Maxwell weight exp(-x^2) uniformly on |x| <= ``span``; it converges
geometrically even when the thermal width is tens of times larger than the
transparency features.  ``"gauss-hermite"`` is exact for polynomial
integrands and efficient at low temperature, but its nodes are too sparse near
v = 0 to resolve sub-MHz features at room temperature.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.constants import Boltzmann, c as SPEED_OF_LIGHT

from .atom_model import RB87_MASS, AtomSpec, DriveConfig
from .errors import QuadratureNotConverged
from .response import _with_linewidths, Channel, Spectrum, channel_drives, chi_values, sweep

DOUBLING_RTOL = 1e-3
BATCH_SIZE = 20000  # Liouvillians solved per batch


def apply_laser_linewidths(atom: AtomSpec, drives: DriveConfig) -> AtomSpec:
    """Fold the laser linewidths of ``drives`` into the atom's pure dephasing.

    The probe, coupling and signal linewidths add to the dephasing of levels
    4, 2 and 3 respectively; sources are treated as independent.
    """
    return _with_linewidths(atom, drives)


@dataclass(frozen=True)
class DopplerSettings:
    """Maxwell velocity averaging along the beam axis.

    Parameters
    ----------
    temperature : float
        Kelvin, >= 0.
    mass : float
        Atomic mass in kg.
    carrier : float
        Optical angular frequency in rad/s; the wavenumber is carrier / c.
    nodes : int
        Quadrature size, even and >= 8.
    rule : {"trapezoid", "gauss-hermite"}
    span : float
        Trapezoid half-range in units of the most probable speed.
    """

    temperature: float
    mass: float = RB87_MASS
    carrier: float = 2.369e15
    nodes: int = 768
    rule: Literal["trapezoid", "gauss-hermite"] = "trapezoid"
    span: float = 5.0

    def __post_init__(self):
        if not (np.isfinite(self.temperature) and self.temperature >= 0):
            raise ValueError("temperature must be finite and >= 0")
        if self.mass <= 0 or self.carrier <= 0:
            raise ValueError("mass and carrier must be positive")
        if self.nodes < 8 or self.nodes % 2:
            raise ValueError("nodes must be even and >= 8")
        if self.rule not in ("trapezoid", "gauss-hermite"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        if self.span <= 0:
            raise ValueError("span must be positive")

    @property
    def wavenumber(self) -> float:
        return self.carrier / SPEED_OF_LIGHT

    @property
    def most_probable_speed(self) -> float:
        """sqrt(2 k T / m) in m/s."""
        return float(np.sqrt(2 * Boltzmann * self.temperature / self.mass))

    @property
    def doppler_width(self) -> float:
        """k u in rad/us."""
        return self.wavenumber * self.most_probable_speed / 1e6

    def with_nodes(self, nodes: int) -> "DopplerSettings":
        return DopplerSettings(self.temperature, self.mass, self.carrier, nodes, self.rule, self.span)


def velocity_nodes(settings: DopplerSettings) -> tuple[np.ndarray, np.ndarray]:
    """Velocities (m/s) and normalised weights of the 1-D Maxwell average."""
    if settings.rule == "gauss-hermite":
        x, w = np.polynomial.hermite.hermgauss(settings.nodes)
        w = w / np.sqrt(np.pi)
    else:
        x = np.linspace(-settings.span, settings.span, settings.nodes)
        w = np.exp(-x**2)
        w[[0, -1]] *= 0.5
        w = w / w.sum()
    return settings.most_probable_speed * x, w


def _average(atom, drives, channel, grid, settings, opts, threads):
    velocities, weights = velocity_nodes(settings)
    shifts = settings.wavenumber * velocities / 1e6  # rad/us
    per_block = max(1, BATCH_SIZE // shifts.size)
    blocks = [grid[i:i + per_block] for i in range(0, grid.size, per_block)]

    def evaluate(block):
        moved = channel_drives(drives, channel, block[:, None]).shifted(shifts[None, :])
        return chi_values(atom, moved, channel, **opts) @ weights

    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(evaluate, blocks))
    else:
        parts = [evaluate(b) for b in blocks]
    return np.concatenate(parts)


def doppler_average(atom: AtomSpec, drives: DriveConfig, channel: Channel, grid,
                    settings: DopplerSettings, *, check: bool = True, threads: int = 1,
                    **opts) -> Spectrum:
    """Maxwell-averaged susceptibility of ``channel`` across ``grid`` (rad/us).

    Extra keyword arguments (method, background, coupling_sign, ...) are
    passed to :func:`chi_values`.  With ``check`` the average is repeated with
    twice the nodes and QuadratureNotConverged is raised if any point moves
    by more than 1e-3 relative to the spectrum scale at that point.
    """
    grid = np.asarray(grid, dtype=float)
    if settings.temperature == 0:
        base = sweep(atom, drives, channel, grid, threads=threads, **opts)
        return Spectrum(grid, base.values, channel, "doppler",
                        {**base.metadata, "temperature_k": 0.0, "nodes": 0})
    values = _average(atom, drives, channel, grid, settings, opts, threads)
    meta = {**opts, "temperature_k": settings.temperature, "nodes": settings.nodes,
            "rule": settings.rule}
    if check:
        finer = _average(atom, drives, channel, grid, settings.with_nodes(2 * settings.nodes),
                         opts, threads)
        floor = 1e-3 * np.max(np.abs(finer))  # keeps near-zero crossings from dominating
        change = np.abs(values - finer) / np.maximum(np.abs(finer), floor)
        meta["doubling_change"] = float(np.max(change))
        if meta["doubling_change"] > DOUBLING_RTOL:
            raise QuadratureNotConverged(
                f"doubling {settings.nodes} {settings.rule} nodes changed the spectrum by "
                f"{meta['doubling_change']:.2e} (> {DOUBLING_RTOL:g})")
    return Spectrum(grid, values, channel, "doppler", meta)
