"""Linear susceptibilities of the probe and signal transitions.

Two independent routes are provided:

* closed-form linear response (:func:`probe_chi_analytic`,
  :func:`signal_chi_analytic`), which takes the ground/excited populations of a
  background state as input;
* :func:`chi_numeric`, the weak-field ratio rho_14 / Omega_p (or
  rho_34 / Omega_s) read off a full steady-state solve of the Liouvillian.

Background states
-----------------
``"zeroth"``
    steady state with the probed field switched off (strict perturbation
    theory).  With the default relaxation model this is |1><1| for the probe,
    so the coherence rho_43 that produces gain vanishes.
``"pumped"``
    steady state with every field at its configured Rabi frequency, evaluated
    at each sweep point.  This is the default; it is the only choice that puts
    population into |3> and hence produces gain in the second window.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.constants import epsilon_0, hbar
from scipy.interpolate import CubicSpline

from .atom_model import AtomSpec, DriveConfig, build_liouvillian, unvec
from .errors import (DegenerateSteadyState, DivisionNearZero, GridTooCoarse, NonlinearRegime,
                     TripodError)
from .steadystate import DensityMatrix, null_space_dimension, solve_steady_states, steady_state

Channel = Literal["probe", "signal"]
Background = Literal["pumped", "zeroth"]

NEAR_ZERO = 1e-12
LINEARITY_RTOL = 1e-3
DEFAULT_WEAK_FRACTION = 1e-4  # probed Rabi frequency in units of gamma_4

_RABI_FIELD = {"probe": "omega_p", "signal": "omega_s"}
_DETUNING_FIELD = {"probe": "delta_p", "signal": "delta_s"}
_COHERENCE_INDEX = {"probe": (0, 3), "signal": (2, 3)}


def _check_channel(channel: str) -> None:
    if channel not in _RABI_FIELD:
        raise ValueError(f"channel must be 'probe' or 'signal', got {channel!r}")


@dataclass(frozen=True)
class CompositeRates:
    """Coherence decay composites of the signal response.

    ``gamma43`` and ``gamma32`` are the rates of the 3-4 and 2-3 coherences,
    taken as gamma_4 + gamma_3 and gamma_3 + gamma_2.
    """

    gamma43: float
    gamma32: float

    @classmethod
    def from_atom(cls, atom: AtomSpec) -> "CompositeRates":
        return cls(atom.gamma4 + atom.gamma3, atom.gamma3 + atom.gamma2)

    def __post_init__(self):
        if self.gamma43 < 0 or self.gamma32 < 0:
            raise ValueError("composite rates must be >= 0")


@dataclass(frozen=True)
class LinearResponse:
    """Linear response of one transition.

    rho_lin_ratio : rho_lin / Omega in 1/(rad/us)
    prefactor     : N |d|^2 / (eps0 hbar) in rad/us
    chi           : prefactor * rho_lin_ratio (dimensionless)
    """

    rho_lin_ratio: complex | np.ndarray
    prefactor: float

    @property
    def chi(self):
        return self.prefactor * self.rho_lin_ratio


@dataclass(frozen=True)
class Spectrum:
    """Susceptibility samples on a strictly increasing detuning grid (rad/us)."""

    grid: np.ndarray
    values: np.ndarray
    channel: Channel = "probe"
    broadening: Literal["bare", "linewidth", "doppler"] = "bare"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise ValueError("grid and values must be 1-D arrays of equal length")
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            raise ValueError("spectrum grid must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("spectrum values must be finite")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)


def dipole_from_linewidth(gamma_rad: float, omega: float) -> float:
    """Transition dipole (C m) from a radiative decay rate and angular frequency.

    ``|d|^2 = 3 pi eps0 hbar c^3 gamma_rad / omega^3`` with both arguments in rad/s.
    """
    if gamma_rad <= 0 or omega <= 0:
        raise ValueError("gamma_rad and omega must be positive")
    return float(np.sqrt(3 * np.pi * epsilon_0 * hbar * SPEED_OF_LIGHT**3 * gamma_rad / omega**3))


def transition_dipole(atom: AtomSpec, channel: Channel = "probe") -> float:
    explicit = atom.dipole_14 if channel == "probe" else atom.dipole_34
    if explicit is not None:
        return explicit
    return dipole_from_linewidth(atom.calibration_rate() * 1e6, atom.carrier)


def susceptibility_prefactor(atom: AtomSpec, channel: Channel = "probe") -> float:
    """N |d|^2 / (eps0 hbar), converted to rad/us."""
    d = transition_dipole(atom, channel)
    return atom.density * d**2 / (epsilon_0 * hbar) / 1e6


def _guard(*denominators) -> None:
    for den in denominators:
        if np.any(np.abs(den) < NEAR_ZERO):
            raise DivisionNearZero("closed-form denominator vanished (|den| < 1e-12)")


def _matrix(populations) -> np.ndarray:
    return np.asarray(populations.matrix if isinstance(populations, DensityMatrix) else populations)


# ---------------------------------------------------------------------------
# background states


def _steady(atom: AtomSpec, drives: DriveConfig) -> DensityMatrix:
    liou = build_liouvillian(atom, drives)
    if liou.matrix.ndim == 2:
        return steady_state(liou)
    flat = liou.matrix.reshape(-1, 16, 16)
    if null_space_dimension(flat[0]) > 1:
        raise DegenerateSteadyState("Liouvillian null space has dimension > 1")
    rho = solve_steady_states(flat).reshape(liou.matrix.shape[:-2] + (4, 4))
    return DensityMatrix(rho, {"batched": True})


def zeroth_order_state(atom: AtomSpec, drives: DriveConfig, off_field: Channel) -> DensityMatrix:
    """Steady state with the named field's Rabi frequency forced to zero."""
    _check_channel(off_field)
    return _steady(atom, drives.replace(**{_RABI_FIELD[off_field]: 0.0}))


def background_state(atom: AtomSpec, drives: DriveConfig, channel: Channel,
                     background: Background = "pumped") -> DensityMatrix:
    """Population background for the closed-form response of ``channel``."""
    if background == "zeroth":
        return zeroth_order_state(atom, drives, channel)
    if background == "pumped":
        return _steady(atom, drives)
    raise ValueError(f"background must be 'pumped' or 'zeroth', got {background!r}")


# ---------------------------------------------------------------------------
# closed-form response


def rho43_zeroth(atom: AtomSpec, drives: DriveConfig, populations) -> np.ndarray:
    """Signal-driven coherence rho_43 with the probe off, from populations."""
    rho = _matrix(populations)
    g2, g3, g4 = atom.gamma2, atom.gamma3, atom.gamma4
    inner = g3 + g2 + 2j * drives.delta_sc
    _guard(inner)
    outer = g3 + g4 + 2j * drives.delta_s + drives.omega_c**2 / inner
    _guard(outer)
    return -1j * np.conj(drives.omega_s) * (rho[..., 2, 2] - rho[..., 3, 3]) / outer


def rho41_zeroth(atom: AtomSpec, drives: DriveConfig, populations) -> np.ndarray:
    """Probe-driven coherence rho_41 with the signal off, from populations."""
    rho = _matrix(populations)
    g2, g4 = atom.gamma2, atom.gamma4
    inner = g2 + 2j * drives.delta_pc
    _guard(inner)
    outer = g4 + 2j * drives.delta_p + drives.omega_c**2 / inner
    _guard(outer)
    return -1j * np.conj(drives.omega_p) * (rho[..., 0, 0] - rho[..., 3, 3]) / outer


def probe_terms(atom: AtomSpec, drives: DriveConfig, populations, coupling_sign: int = 1):
    """Population and coherence contributions to rho_14^lin / Omega_p.

    ``coupling_sign`` selects the sign of the Omega_c^2 term in the
    denominator; +1 is the variant that agrees with the Liouvillian.
    Returns ``(population_term, coherence_term)``.
    """
    rho = _matrix(populations)
    g2, g3, g4 = atom.gamma2, atom.gamma3, atom.gamma4
    two_photon_c = g2 - 2j * drives.delta_pc
    two_photon_s = g3 - 2j * drives.delta_ps
    _guard(two_photon_c, two_photon_s)
    den = (g4 - 2j * drives.delta_p + coupling_sign * drives.omega_c**2 / two_photon_c
           + drives.omega_s**2 / two_photon_s)
    _guard(den)
    population = 1j * (rho[..., 0, 0] - rho[..., 3, 3]) / den
    coherence = drives.omega_s * rho43_zeroth(atom, drives, rho) / two_photon_s / den
    return population, coherence


def probe_chi_analytic(atom: AtomSpec, drives: DriveConfig, populations, *,
                       coupling_sign: int = 1, include_coherence: bool = True) -> LinearResponse:
    """Probe susceptibility from the closed-form linear response.

    ``include_coherence=False`` imposes rho_43^(0) = 0.
    """
    population, coherence = probe_terms(atom, drives, populations, coupling_sign)
    ratio = population + coherence if include_coherence else population
    return LinearResponse(ratio, susceptibility_prefactor(atom, "probe"))


def probe_rho12_ratio(atom: AtomSpec, drives: DriveConfig, rho14_ratio):
    """rho_12^lin / Omega_p implied by rho_14^lin / Omega_p at linear order."""
    den = atom.gamma2 - 2j * drives.delta_pc
    _guard(den)
    return 1j * drives.omega_c * rho14_ratio / den


def signal_chi_analytic(atom: AtomSpec, drives: DriveConfig, populations, *,
                        coupling_sign: int = 1, include_coherence: bool = True) -> LinearResponse:
    """Signal susceptibility from the closed-form linear response in Omega_s."""
    rho = _matrix(populations)
    rates = CompositeRates.from_atom(atom)
    g3 = atom.gamma3
    two_photon_c = rates.gamma32 - 2j * drives.delta_sc
    two_photon_p = g3 + 2j * drives.delta_ps
    _guard(two_photon_c, two_photon_p)
    den = (rates.gamma43 - 2j * drives.delta_s + coupling_sign * drives.omega_c**2 / two_photon_c
           + drives.omega_p**2 / two_photon_p)
    _guard(den)
    ratio = 1j * (rho[..., 2, 2] - rho[..., 3, 3]) / den
    if include_coherence:
        ratio = ratio + drives.omega_p * rho41_zeroth(atom, drives, rho) / two_photon_p / den
    return LinearResponse(ratio, susceptibility_prefactor(atom, "signal"))


def chi_analytic(atom: AtomSpec, drives: DriveConfig, channel: Channel, populations,
                 **kwargs) -> LinearResponse:
    _check_channel(channel)
    fn = probe_chi_analytic if channel == "probe" else signal_chi_analytic
    return fn(atom, drives, populations, **kwargs)


# ---------------------------------------------------------------------------
# Liouvillian oracle


def frozen_population_state(atom: AtomSpec, drives: DriveConfig, populations) -> DensityMatrix:
    """Steady coherences of the full Liouvillian with populations held fixed.

    Only the diagonal of ``populations`` is used.  The coherences are obtained
    from the coherence rows of L, i.e. the same perturbative setting as the
    closed-form expressions but without their truncations.
    """
    pops = np.diagonal(_matrix(populations), axis1=-2, axis2=-1).astype(complex)
    matrix = build_liouvillian(atom, drives).matrix
    pop_idx = np.array([0, 5, 10, 15])
    coh_idx = np.array([i for i in range(16) if i not in pop_idx])
    l_cc = matrix[..., coh_idx[:, None], coh_idx]
    l_cp = matrix[..., coh_idx[:, None], pop_idx]
    pops = np.broadcast_to(pops, matrix.shape[:-2] + (4,))
    coh = np.linalg.solve(l_cc, -np.einsum("...ij,...j->...i", l_cp, pops)[..., None])[..., 0]
    v = np.zeros(matrix.shape[:-1], dtype=complex)
    v[..., pop_idx] = pops
    v[..., coh_idx] = coh
    return DensityMatrix(unvec(v), {"frozen_populations": True})


def _weak_ratio(atom, drives, channel, rabi, populations):
    weak = drives.replace(**{_RABI_FIELD[channel]: rabi})
    if populations is None:
        rho = _steady(atom, weak).matrix
    else:
        rho = frozen_population_state(atom, weak, populations).matrix
    i, j = _COHERENCE_INDEX[channel]
    return rho[..., i, j] / rabi


def chi_numeric(atom: AtomSpec, drives: DriveConfig, channel: Channel, *,
                rabi: float | None = None, populations=None,
                check_linearity: bool = True) -> LinearResponse:
    """Weak-field susceptibility from a full steady-state solve.

    The probed field's Rabi frequency is set to ``rabi`` (default
    1e-4 gamma_4); the other fields keep their configured values.  With
    ``populations`` given, populations are frozen and only the coherences are
    solved for (see :func:`frozen_population_state`).

    Raises NonlinearRegime if halving ``rabi`` changes the ratio by more
    than 0.1 %.
    """
    _check_channel(channel)
    if rabi is None:
        rabi = DEFAULT_WEAK_FRACTION * atom.gamma4
    if not rabi > 0:
        raise ValueError("probed Rabi frequency must be > 0; the ratio is undefined at zero")
    ratio = _weak_ratio(atom, drives, channel, rabi, populations)
    if check_linearity:
        half = _weak_ratio(atom, drives, channel, rabi / 2, populations)
        change = np.abs(half - ratio) / np.maximum(np.abs(ratio), 1e-300)
        if np.any(change > LINEARITY_RTOL):
            raise NonlinearRegime(f"halving the probed Rabi frequency changed rho/Omega by "
                                  f"{float(np.max(change)):.2e} (> {LINEARITY_RTOL:g})")
    return LinearResponse(ratio, susceptibility_prefactor(atom, channel))


# ---------------------------------------------------------------------------
# spectra


def _with_linewidths(atom: AtomSpec, drives: DriveConfig) -> AtomSpec:
    extra = {4: drives.width_p, 2: drives.width_c, 3: drives.width_s}
    extra = {j: w for j, w in extra.items() if w}
    return atom.with_dephasing(extra) if extra else atom


def channel_drives(drives: DriveConfig, channel: Channel, grid) -> DriveConfig:
    """Drives with the channel's own detuning replaced by ``grid``."""
    _check_channel(channel)
    return drives.replace(**{_DETUNING_FIELD[channel]: np.asarray(grid, dtype=float)})


def chi_values(atom: AtomSpec, drives: DriveConfig, channel: Channel, *,
               method: Literal["analytic", "numeric"] = "analytic",
               background: Background = "pumped", coupling_sign: int = 1,
               include_coherence: bool = True, rabi: float | None = None) -> np.ndarray:
    """Susceptibility for (possibly array-valued) detunings in ``drives``.

    Laser linewidths carried by ``drives`` are folded into the atom's
    dephasing here.
    """
    atom = _with_linewidths(atom, drives)
    if method == "analytic":
        pops = background_state(atom, drives, channel, background)
        return chi_analytic(atom, drives, channel, pops, coupling_sign=coupling_sign,
                            include_coherence=include_coherence).chi
    if method == "numeric":
        return chi_numeric(atom, drives, channel, rabi=rabi).chi
    raise ValueError(f"method must be 'analytic' or 'numeric', got {method!r}")


def sweep(atom: AtomSpec, drives: DriveConfig, channel: Channel, grid, *,
          method: Literal["analytic", "numeric"] = "analytic",
          background: Background = "pumped", coupling_sign: int = 1,
          include_coherence: bool = True, rabi: float | None = None,
          threads: int = 1, chunk: int = 256) -> Spectrum:
    """Susceptibility of ``channel`` across ``grid`` (its own detuning, rad/us).

    Points are independent; with ``threads > 1`` chunks are evaluated
    concurrently and reassembled in grid order.
    """
    grid = np.asarray(grid, dtype=float)
    opts = dict(method=method, background=background, coupling_sign=coupling_sign,
                include_coherence=include_coherence, rabi=rabi)

    def evaluate(block):
        try:
            return chi_values(atom, channel_drives(drives, channel, block), channel, **opts)
        except TripodError:
            for k, x in enumerate(block):
                try:
                    chi_values(atom, channel_drives(drives, channel, x), channel, **opts)
                except TripodError as exc:
                    raise type(exc)(f"sweep point at detuning {x:.6g} rad/us "
                                    f"(block offset {k}): {exc}") from exc
            raise

    blocks = [grid[i:i + chunk] for i in range(0, grid.size, chunk)]
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(evaluate, blocks))
    else:
        parts = [evaluate(b) for b in blocks]
    values = np.concatenate(parts) if parts else np.zeros(0, complex)
    broadening = "linewidth" if (drives.width_p or drives.width_c or drives.width_s) else "bare"
    meta = {"method": method, "background": background, "coupling_sign": coupling_sign,
            "include_coherence": include_coherence}
    return Spectrum(grid, values, channel, broadening, meta)


def group_velocity(spectrum: Spectrum, center: float, carrier: float,
                   width: float | None = None) -> float:
    """Group velocity (m/s) at ``center`` (rad/us) of a transparency window.

    Uses n_g = 1 + Re chi / 2 + (omega / 2) dRe chi / d delta, the derivative
    taken by central difference with step ``width / 100`` on a cubic spline of
    the spectrum.  ``width`` is the window width; at least five samples must
    fall inside it.
    """
    x, re = spectrum.grid, spectrum.values.real
    if not x[0] <= center <= x[-1]:
        raise ValueError("center lies outside the spectrum grid")
    if width is None:
        step = float(np.min(np.diff(x)))
    else:
        inside = np.count_nonzero(np.abs(x - center) <= width / 2)
        if inside < 5:
            raise GridTooCoarse(f"only {inside} samples inside the window (need 5)")
        step = width / 100
    spline = CubicSpline(x, re)
    slope = (spline(center + step) - spline(center - step)) / (2 * step) / 1e6  # per rad/s
    n_group = 1 + float(spline(center)) / 2 + carrier / 2 * float(slope)
    return SPEED_OF_LIGHT / n_group
