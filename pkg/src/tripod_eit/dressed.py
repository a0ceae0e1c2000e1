"""Semi-classical dressed basis of the coupling transition.

The coupling field hybridises |2> and |4> into two dressed levels.  In the
unitary ``U`` below, row 1 (0-based) is |-> and row 3 is |+>, so the probe
amplitudes of the two dressed channels are the (0, 1) and (0, 3) entries of
``U rho U^dagger``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .atom_model import AtomSpec, DriveConfig
from .errors import ZeroCoupling
from .response import probe_rho12_ratio
from .steadystate import DensityMatrix

UNITARY_TOL = 1e-12


@dataclass(frozen=True)
class DressedFrame:
    """Mixing parameters, unitary and |1> <-> |+-> resonances of the dressed basis.

    Attributes
    ----------
    mixing : complex
        Hybridisation ratio (sqrt(Omega_c^2 + delta_c^2) + delta_c) / Omega_c.
    theta : float
        Normalisation 1 / sqrt(1 + |mixing|^2).
    unitary : ndarray, shape (4, 4)
    resonances : tuple of float
        Probe detunings (delta_minus, delta_plus) of the dressed resonances, rad/us.
    """

    mixing: complex
    theta: float
    unitary: np.ndarray
    resonances: tuple[float, float]

    def __post_init__(self):
        u = self.unitary
        if np.max(np.abs(u @ u.conj().T - np.eye(4))) > UNITARY_TOL:
            raise ValueError("dressed-frame matrix is not unitary")


def dressed_frame(omega_c: float, delta_c: float) -> DressedFrame:
    """Dressed frame of a coupling field with Rabi frequency ``omega_c``.

    Raises ZeroCoupling when ``omega_c`` is zero: the hybridisation is
    undefined without a coupling field.
    """
    if omega_c == 0:
        raise ZeroCoupling("the dressed frame requires a non-zero coupling Rabi frequency")
    root = np.sqrt(abs(omega_c) ** 2 + delta_c**2)
    mixing = (root + delta_c) / omega_c
    theta = 1.0 / np.sqrt(1.0 + abs(mixing) ** 2)
    u = np.eye(4, dtype=complex)
    u[1, 1] = theta
    u[1, 3] = theta * mixing
    u[3, 1] = -theta * np.conj(mixing)
    u[3, 3] = theta
    resonances = ((delta_c - root) / 2, (delta_c + root) / 2)
    return DressedFrame(mixing, float(theta), u, resonances)


def transform_density(rho, frame: DressedFrame) -> DensityMatrix:
    """``U rho U^dagger``; accepts a DensityMatrix or a (..., 4, 4) array."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    params = dict(rho.params) if isinstance(rho, DensityMatrix) else {}
    params["dressed"] = True
    u = frame.unitary
    return DensityMatrix(u @ m @ u.conj().T, params)


def dressed_components(atom: AtomSpec, drives: DriveConfig, rho14_lin):
    """Probe amplitudes of the |1> <-> |+> and |1> <-> |-> channels.

    Parameters
    ----------
    rho14_lin : complex or ndarray
        Linear-order rho_14 (or rho_14 / Omega_p; the result scales alike).

    Returns
    -------
    (rho_1plus, rho_1minus)
    """
    frame = dressed_frame(drives.omega_c, drives.delta_c)
    t, s = frame.theta, frame.mixing
    ladder = 1j * np.conj(drives.omega_c) / (atom.gamma2 - 2j * drives.delta_pc)
    minus = (t * s + t * ladder) * rho14_lin
    plus = (t - t * np.conj(s) * ladder) * rho14_lin
    return plus, minus


def linear_density(atom: AtomSpec, drives: DriveConfig, populations, rho14_lin) -> np.ndarray:
    """Zeroth-order populations plus the coherences linear in the probe.

    Only rho_12, rho_14 and their conjugates are included; ``rho14_lin`` may
    be a ratio to Omega_p, in which case rho_12 is returned as the same ratio.
    """
    pops = populations.matrix if isinstance(populations, DensityMatrix) else np.asarray(populations)
    rho14_lin = np.asarray(rho14_lin)
    shape = np.broadcast(rho14_lin, pops[..., 0, 0]).shape
    out = np.zeros(shape + (4, 4), dtype=complex)
    for k in range(4):
        out[..., k, k] = pops[..., k, k].real
    rho12 = probe_rho12_ratio(atom, drives, rho14_lin)
    out[..., 0, 1] = rho12
    out[..., 1, 0] = np.conj(rho12)
    out[..., 0, 3] = rho14_lin
    out[..., 3, 0] = np.conj(rho14_lin)
    return out


def components_by_transform(atom: AtomSpec, drives: DriveConfig, populations, rho14_lin):
    """Same channel amplitudes as :func:`dressed_components`, read off U rho U^dagger."""
    frame = dressed_frame(drives.omega_c, drives.delta_c)
    rotated = transform_density(linear_density(atom, drives, populations, rho14_lin), frame).matrix
    return rotated[..., 0, 3], rotated[..., 0, 1]


def dressed_populations(rho, frame: DressedFrame) -> dict[str, np.ndarray]:
    """Populations of |1>, |->, |3>, |+> after the transform."""
    m = transform_density(rho, frame).matrix
    return {"1": m[..., 0, 0].real, "-": m[..., 1, 1].real,
            "3": m[..., 2, 2].real, "+": m[..., 3, 3].real}
