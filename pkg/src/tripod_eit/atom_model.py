"""Tripod atom, drive configuration, rotating-frame Hamiltonian and Liouvillian.

Levels are labelled 1..4 in the public API (|1>, |2>, |3> ground, |4> excited)
and stored at array indices 0..3.  All rates, Rabi frequencies and detunings
are angular frequencies in rad/us ("angular MHz"); use :func:`angular` to
convert an ordinary frequency quoted in MHz.

Density matrices are vectorised by column stacking, so that
``vec(A @ rho @ B) = kron(B.T, A) @ vec(rho)``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.constants import atomic_mass

N_LEVELS = 4
DIM = N_LEVELS * N_LEVELS

RB87_MASS = 86.909180527 * atomic_mass  # kg
D1_CARRIER = 2.369e15  # rad/s, already angular
DEFAULT_DENSITY = 1e14 * 1e6  # 1e14 cm^-3 in m^-3


def angular(mhz):
    """Ordinary frequency in MHz -> angular frequency in rad/us."""
    return 2.0 * np.pi * mhz


def ordinary(rad_per_us):
    """Angular frequency in rad/us -> ordinary frequency in MHz."""
    return rad_per_us / (2.0 * np.pi)


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-stack a (..., 4, 4) matrix into (..., 16)."""
    rho = np.asarray(rho)
    return np.swapaxes(rho, -1, -2).reshape(rho.shape[:-2] + (DIM,))


def unvec(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vec`."""
    v = np.asarray(v)
    return np.swapaxes(v.reshape(v.shape[:-1] + (N_LEVELS, N_LEVELS)), -1, -2)


def _projector(i: int, j: int) -> np.ndarray:
    m = np.zeros((N_LEVELS, N_LEVELS), dtype=complex)
    m[i, j] = 1.0
    return m


@dataclass(frozen=True)
class AtomSpec:
    """Level structure and relaxation of the tripod atom.

    Parameters
    ----------
    decay : mapping
        ``{(j, i): rate}`` for population decay |j> -> |i>, with j > i (1-based).
    dephasing : mapping
        ``{j: rate}`` pure dephasing of level j (j in 2..4).
    density : float
        Atomic number density in m^-3.
    carrier : float
        Optical angular frequency omega_41 in rad/s.
    mass : float
        Atomic mass in kg.
    radiative_rate : float, optional
        Rate (rad/us) used to calibrate the transition dipoles.  Defaults to
        the natural width of |4>, i.e. the sum of its decay channels.
    dipole_14, dipole_34 : float, optional
        Explicit transition dipoles in C m; override the calibration.
    """

    decay: Mapping[tuple[int, int], float] = field(default_factory=dict)
    dephasing: Mapping[int, float] = field(default_factory=dict)
    density: float = DEFAULT_DENSITY
    carrier: float = D1_CARRIER
    mass: float = RB87_MASS
    radiative_rate: float | None = None
    dipole_14: float | None = None
    dipole_34: float | None = None

    def __post_init__(self):
        decay = {(int(j), int(i)): float(g) for (j, i), g in dict(self.decay).items()}
        dephasing = {int(j): float(g) for j, g in dict(self.dephasing).items()}
        for (j, i), g in decay.items():
            if not (1 <= i < j <= N_LEVELS):
                raise ValueError(f"decay channel {j}->{i} must go from a higher to a lower level")
            if not g >= 0:
                raise ValueError(f"decay rate {j}->{i} must be >= 0, got {g}")
        for j, g in dephasing.items():
            if not 2 <= j <= N_LEVELS:
                raise ValueError(f"dephasing level must be in 2..4, got {j}")
            if not g >= 0:
                raise ValueError(f"dephasing rate of level {j} must be >= 0, got {g}")
        if self.density < 0 or self.carrier <= 0 or self.mass <= 0:
            raise ValueError("density must be >= 0; carrier and mass must be > 0")
        object.__setattr__(self, "decay", decay)
        object.__setattr__(self, "dephasing", dephasing)

    @classmethod
    def rb87(
        cls,
        gamma4: float = angular(18.0),
        gamma2: float = angular(0.04),
        gamma3: float = angular(0.01),
        branching: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3),
        **kwargs,
    ) -> "AtomSpec":
        """Tripod on the 87Rb D1 line with the default relaxation model.

        |4> decays to |1>, |2>, |3> with the given branching fractions; the
        ground-state rates are realised as population decay |2> -> |1> and
        |3> -> |1>.
        """
        b1, b2, b3 = branching
        if abs(b1 + b2 + b3 - 1.0) > 1e-12:
            raise ValueError("branching fractions must sum to 1")
        decay = {(4, 1): b1 * gamma4, (4, 2): b2 * gamma4, (4, 3): b3 * gamma4,
                 (2, 1): gamma2, (3, 1): gamma3}
        kwargs.setdefault("radiative_rate", gamma4)
        return cls(decay=decay, **kwargs)

    def total_rate(self, level: int) -> float:
        """Decay rate gamma_j of level j entering the coherence equations.

        Sum of the population decay channels out of j plus its pure dephasing.
        """
        out = sum(g for (j, _), g in self.decay.items() if j == level)
        return out + self.dephasing.get(level, 0.0)

    @property
    def gamma2(self) -> float:
        return self.total_rate(2)

    @property
    def gamma3(self) -> float:
        return self.total_rate(3)

    @property
    def gamma4(self) -> float:
        return self.total_rate(4)

    def hierarchy_ok(self) -> bool:
        return self.gamma4 > self.gamma2 and self.gamma4 > self.gamma3

    def calibration_rate(self) -> float:
        if self.radiative_rate is not None:
            return self.radiative_rate
        return sum(g for (j, _), g in self.decay.items() if j == 4)

    def with_dephasing(self, extra: Mapping[int, float]) -> "AtomSpec":
        """Copy with ``extra[j]`` added to the dephasing of level j."""
        deph = dict(self.dephasing)
        for j, g in extra.items():
            deph[j] = deph.get(j, 0.0) + g
        return dataclasses.replace(self, dephasing=deph)


@dataclass(frozen=True)
class DriveConfig:
    """Probe (1-4), coupling (2-4) and signal (3-4) fields.

    Rabi frequencies, detunings and laser linewidths are in rad/us.
    Detunings may be numpy arrays; everything downstream broadcasts over them.
    """

    omega_p: float = 0.0
    omega_c: float = 0.0
    omega_s: float = 0.0
    delta_p: float | np.ndarray = 0.0
    delta_c: float | np.ndarray = 0.0
    delta_s: float | np.ndarray = 0.0
    width_p: float = 0.0
    width_c: float = 0.0
    width_s: float = 0.0

    def __post_init__(self):
        for name in ("omega_p", "omega_c", "omega_s", "width_p", "width_c", "width_s"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {value}")

    @property
    def delta_pc(self):
        return self.delta_p - self.delta_c

    @property
    def delta_ps(self):
        return self.delta_p - self.delta_s

    @property
    def delta_sc(self):
        return self.delta_s - self.delta_c

    def replace(self, **changes) -> "DriveConfig":
        return dataclasses.replace(self, **changes)

    def shifted(self, shift) -> "DriveConfig":
        """All three one-photon detunings reduced by the same amount.

        Two-photon detunings are unchanged.
        """
        return self.replace(delta_p=self.delta_p - shift, delta_c=self.delta_c - shift,
                            delta_s=self.delta_s - shift)

    def batch_shape(self) -> tuple[int, ...]:
        return np.broadcast(np.asarray(self.delta_p), np.asarray(self.delta_c),
                            np.asarray(self.delta_s)).shape


def build_hamiltonian(atom: AtomSpec, drives: DriveConfig) -> np.ndarray:
    """Rotating-frame Hamiltonian in the basis |1>, |2>, |3>, |4>.

    Returns a (4, 4) array, or (..., 4, 4) when detunings are arrays.
    """
    shape = drives.batch_shape()
    h = np.zeros(shape + (N_LEVELS, N_LEVELS), dtype=complex)
    h[..., 1, 1] = drives.delta_pc
    h[..., 2, 2] = drives.delta_ps
    h[..., 3, 3] = drives.delta_p
    for k, omega in enumerate((drives.omega_p, drives.omega_c, drives.omega_s)):
        h[..., 3, k] = omega / 2
        h[..., k, 3] = np.conj(omega) / 2
    return h


def dissipator(atom: AtomSpec) -> np.ndarray:
    """16x16 superoperator of spontaneous decay plus pure dephasing."""
    eye = np.eye(N_LEVELS)
    out = np.zeros((DIM, DIM), dtype=complex)

    def lindblad(op, rate):
        opd_op = op.conj().T @ op
        return rate * (np.kron(op.conj(), op)
                       - 0.5 * np.kron(eye, opd_op) - 0.5 * np.kron(opd_op.T, eye))

    for (j, i), rate in atom.decay.items():
        if rate:
            out += lindblad(_projector(i - 1, j - 1), rate)
    for j, rate in atom.dephasing.items():
        if rate:
            out += lindblad(_projector(j - 1, j - 1), rate)
    return out


def hamiltonian_superoperator(h: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> -i[H, rho] for (..., 4, 4) Hamiltonians."""
    eye = np.eye(N_LEVELS)
    left = np.einsum("ab,...ij->...aibj", eye, h)
    right = np.einsum("...ba,ij->...aibj", h, eye)
    shape = h.shape[:-2] + (DIM, DIM)
    return -1j * (left.reshape(shape) - right.reshape(shape))


@dataclass(frozen=True)
class Liouvillian:
    """Generator of d(vec rho)/dt; ``matrix`` is (16, 16) or batched (..., 16, 16)."""

    matrix: np.ndarray
    atom: AtomSpec
    drives: DriveConfig

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """d rho / dt as a (..., 4, 4) matrix."""
        return unvec(np.einsum("...ij,...j->...i", self.matrix, vec(rho)))


def build_liouvillian(atom: AtomSpec, drives: DriveConfig) -> Liouvillian:
    """Lindblad generator for the driven, damped tripod.

    Detunings only enter the diagonal of the superoperator, so batches are
    built by adding them to a shared detuning-free matrix.
    """
    shape = drives.batch_shape()
    if not shape:
        h = build_hamiltonian(atom, drives)
        return Liouvillian(hamiltonian_superoperator(h) + dissipator(atom), atom, drives)
    base = hamiltonian_superoperator(build_hamiltonian(atom, drives.replace(
        delta_p=0.0, delta_c=0.0, delta_s=0.0))) + dissipator(atom)
    energies = np.zeros(shape + (N_LEVELS,))
    energies[..., 1] = drives.delta_pc
    energies[..., 2] = drives.delta_ps
    energies[..., 3] = drives.delta_p
    # element (a, b) sits at vec index a + 4 b and evolves with -i (E_a - E_b)
    diag = -1j * (energies[..., :, None] - energies[..., None, :])
    matrix = np.broadcast_to(base, shape + (DIM, DIM)).copy()
    idx = np.arange(DIM)
    matrix[..., idx, idx] += np.swapaxes(diag, -1, -2).reshape(shape + (DIM,))
    return Liouvillian(matrix, atom, drives)
