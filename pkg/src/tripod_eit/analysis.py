"""Transparency-window geometry and group-velocity matching.

Widths
------
``fwhm``
    full width at the level halfway between the dip floor and the mean of the
    two flanking absorption maxima; the window center is the midpoint of the
    two crossings of that level.
``contrast_width``
    full width at the level halfway between the dip floor and the *lower* of
    the two flanking maxima.  Always defined, and narrower than ``fwhm`` when
    the maxima differ.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.signal import find_peaks

from .atom_model import D1_CARRIER, AtomSpec, DriveConfig, ordinary
from .errors import NoBracket, NoWindowFound, TripodError
from .response import Spectrum, group_velocity, sweep

MIN_POINTS = 101
DEFAULT_PROMINENCE = 0.02  # fraction of the Im chi range
REFINE_FACTOR = 10
MATCH_RTOL = 1e-3


@dataclass(frozen=True)
class WindowReport:
    """One transparency window.  Frequencies in MHz, velocity in m/s."""

    center_mhz: float
    fwhm_mhz: float
    min_im_chi: float
    group_velocity_mps: float
    peaks_mhz: tuple[float, float]
    dip_mhz: float
    contrast_width_mhz: float
    channel: str = "probe"

    def __post_init__(self):
        if not self.fwhm_mhz > 0:
            raise ValueError("window width must be positive")
        left, right = self.peaks_mhz
        if not left < self.center_mhz < right:
            raise ValueError("bounding peaks must straddle the window center")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["peaks_mhz"] = list(self.peaks_mhz)
        return d


def _interp(x, im, i, j, level):
    return x[i] + (level - im[i]) * (x[j] - x[i]) / (im[j] - im[i])


def _width(x, im, left, dip, right, level):
    """Crossings of ``level`` on either side of ``dip``, by linear interpolation.

    If a flanking maximum lies below ``level`` the crossing on that side is
    clamped to the maximum.
    """
    i = dip
    while i > left and im[i] < level:
        i -= 1
    lo = x[i] if im[i] < level else _interp(x, im, i, i + 1, level)
    j = dip
    while j < right and im[j] < level:
        j += 1
    hi = x[j] if im[j] < level else _interp(x, im, j - 1, j, level)
    return lo, hi


def _measure(x, im, left, dip, right):
    half = ((im[left] + im[right]) / 2 + im[dip]) / 2
    lo, hi = _width(x, im, left, dip, right, half)
    contrast = (min(im[left], im[right]) + im[dip]) / 2
    clo, chi = _width(x, im, left, dip, right, contrast)
    return {"center": (lo + hi) / 2, "fwhm": hi - lo, "contrast": chi - clo,
            "dip": x[dip], "floor": im[dip], "peaks": (x[left], x[right])}


def _bracketing_indices(im, prominence):
    span = float(np.ptp(im))
    if span == 0:
        return []
    dips, _ = find_peaks(-im, prominence=prominence * span)
    out = []
    edges = np.concatenate([[0], dips, [im.size - 1]])
    for k, dip in enumerate(dips):
        a, b = edges[k], edges[k + 2]
        left = a + int(np.argmax(im[a:dip + 1]))
        right = dip + int(np.argmax(im[dip:b + 1]))
        if 0 < left < dip < right < im.size - 1:
            out.append((left, dip, right))
    return out


def find_windows(spectrum: Spectrum, *, carrier: float = D1_CARRIER,
                 prominence: float = DEFAULT_PROMINENCE,
                 refine: Callable[[np.ndarray], np.ndarray] | None = None,
                 velocities: bool = True) -> list[WindowReport]:
    """Transparency windows of ``spectrum``, ordered by detuning.

    A window is a dip of Im chi (prominence at least ``prominence`` times the
    full Im chi range) bounded on both sides by interior absorption maxima.

    Parameters
    ----------
    refine : callable, optional
        ``refine(grid) -> chi values``; when given, each window is re-sampled
        at ten times the grid density between its flanking maxima before it
        is measured.
    velocities : bool
        Attach the group velocity at each window center.

    Raises
    ------
    NoWindowFound
        If no bounded dip exists.
    """
    x, values = spectrum.grid, spectrum.values
    if x.size < MIN_POINTS:
        raise ValueError(f"window analysis needs at least {MIN_POINTS} points")
    reports = []
    for left, dip, right in _bracketing_indices(values.imag, prominence):
        local = spectrum
        lx, lim = x, values.imag
        li, di, ri = left, dip, right
        if refine is not None:
            step = (x[1] - x[0]) / REFINE_FACTOR
            a, b = x[max(left - 1, 0)], x[min(right + 1, x.size - 1)]
            dense = np.linspace(a, b, int(round((b - a) / step)) + 1)
            dense_values = np.asarray(refine(dense), dtype=complex)
            lim = dense_values.imag
            lx = dense
            di = int(np.argmin(lim[np.searchsorted(dense, x[left]):
                                   np.searchsorted(dense, x[right]) + 1])) \
                + int(np.searchsorted(dense, x[left]))
            li = int(np.argmax(lim[:di + 1]))
            ri = di + int(np.argmax(lim[di:]))
            local = Spectrum(dense, dense_values, spectrum.channel, spectrum.broadening)
        m = _measure(lx, lim, li, di, ri)
        velocity = float("nan")
        if velocities:
            velocity = group_velocity(local, m["center"], carrier, width=m["fwhm"])
        reports.append(WindowReport(
            center_mhz=float(ordinary(m["center"])), fwhm_mhz=float(ordinary(m["fwhm"])),
            min_im_chi=float(m["floor"]), group_velocity_mps=float(velocity),
            peaks_mhz=(float(ordinary(m["peaks"][0])), float(ordinary(m["peaks"][1]))),
            dip_mhz=float(ordinary(m["dip"])),
            contrast_width_mhz=float(ordinary(m["contrast"])), channel=spectrum.channel))
    if not reports:
        raise NoWindowFound("no transparency dip bounded by two absorption maxima")
    return reports


def nearest_window(reports: list[WindowReport], detuning_mhz: float) -> WindowReport:
    return min(reports, key=lambda r: abs(r.center_mhz - detuning_mhz))


# ---------------------------------------------------------------------------
# velocity matching


@dataclass
class MatchResult:
    """Outcome of :func:`match_velocities`; Rabi frequencies in rad/us."""

    omega_p: float
    mismatch: float
    probe_windows: list[WindowReport]
    signal_windows: list[WindowReport]
    scan_omega: np.ndarray = field(default_factory=lambda: np.zeros(0))
    scan_mismatch: np.ndarray = field(default_factory=lambda: np.zeros(0))
    evaluations: int = 0

    def first(self, channel: str, delta_c_mhz: float = 0.0) -> WindowReport:
        reports = self.probe_windows if channel == "probe" else self.signal_windows
        return nearest_window(reports, delta_c_mhz)


def dual_windows(atom: AtomSpec, drives: DriveConfig, probe_grid, signal_grid,
                 **opts) -> tuple[list[WindowReport], list[WindowReport]]:
    """Window reports of the probe (swept over delta_p) and signal (over delta_s)."""
    out = []
    for channel, grid in (("probe", probe_grid), ("signal", signal_grid)):
        spec = sweep(atom, drives, channel, grid, **opts)
        out.append(find_windows(spec, carrier=atom.carrier))
    return out[0], out[1]


def velocity_mismatch(probe: list[WindowReport], signal: list[WindowReport],
                      delta_c_mhz: float) -> float:
    """|v_probe - v_signal| / mean(v) in the window nearest delta_c."""
    vp = nearest_window(probe, delta_c_mhz).group_velocity_mps
    vs = nearest_window(signal, delta_c_mhz).group_velocity_mps
    return abs(vp - vs) / (0.5 * (abs(vp) + abs(vs)))


def match_velocities(atom: AtomSpec, drives: DriveConfig, probe_grid, signal_grid, *,
                     initial: float | None = None, scan_points: int = 24,
                     tolerance: float | None = None, **opts) -> MatchResult:
    """Probe Rabi frequency on (0, 2 Omega_s] equalising first-window group velocities.

    A coarse scan locates the smallest mismatch; a bounded scalar minimisation
    between its neighbours then refines it until the bracket is narrower than
    ``tolerance`` (default 1e-4 gamma_4).

    Raises
    ------
    NoBracket
        If the scan minimum lies on the boundary of the search interval.
    """
    if drives.omega_s <= 0:
        raise ValueError("velocity matching needs a non-zero signal field")
    tolerance = 1e-4 * atom.gamma4 if tolerance is None else tolerance
    dc = float(ordinary(drives.delta_c))
    evaluations = 0
    cache: dict[float, tuple] = {}

    def evaluate(omega_p):
        nonlocal evaluations
        if omega_p not in cache:
            evaluations += 1
            try:
                pw, sw = dual_windows(atom, drives.replace(omega_p=float(omega_p)),
                                      probe_grid, signal_grid, **opts)
                cache[omega_p] = (velocity_mismatch(pw, sw, dc), pw, sw)
            except TripodError:
                cache[omega_p] = (np.inf, [], [])
        return cache[omega_p]

    if initial is not None:
        mismatch, pw, sw = evaluate(initial)
        if mismatch < MATCH_RTOL:
            return MatchResult(initial, mismatch, pw, sw, evaluations=evaluations)

    upper = 2 * drives.omega_s
    scan = np.linspace(upper / scan_points, upper, scan_points)
    mismatches = np.array([evaluate(w)[0] for w in scan])
    best = int(np.argmin(mismatches))
    if not np.isfinite(mismatches[best]) or best in (0, scan.size - 1):
        raise NoBracket("velocity mismatch has no interior minimum on (0, 2 Omega_s]")
    lo, hi = scan[best - 1], scan[best + 1]
    res = minimize_scalar(lambda w: evaluate(w)[0], bounds=(lo, hi), method="bounded",
                          options={"xatol": tolerance})
    omega = float(res.x)
    mismatch, pw, sw = evaluate(omega)
    return MatchResult(omega, mismatch, pw, sw, scan, mismatches, evaluations)
