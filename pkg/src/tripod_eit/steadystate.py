"""Steady states of the tripod Liouvillian and density-matrix diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .atom_model import DIM, N_LEVELS, Liouvillian, unvec, vec
from .errors import DegenerateSteadyState, SolveFailure

TRACE_TOL = 1e-10
HERMITIAN_TOL = 1e-10
POSITIVITY_TOL = -1e-8
RESIDUAL_TOL = 1e-10
DEGENERACY_TOL = 1e-8

_TRACE_ROW = vec(np.eye(N_LEVELS)).astype(complex)


@dataclass(frozen=True)
class DensityMatrix:
    """A 4x4 density matrix (or a stack of them) plus the parameters that produced it."""

    matrix: np.ndarray
    params: dict = field(default_factory=dict)

    def population(self, level: int):
        """Population of level ``level`` (1-based)."""
        return self.matrix[..., level - 1, level - 1].real

    def coherence(self, i: int, j: int):
        """Element rho_ij (1-based)."""
        return self.matrix[..., i - 1, j - 1]


@dataclass(frozen=True)
class DensityDiagnostics:
    trace_error: float
    hermiticity_error: float
    min_eigenvalue: float

    @property
    def trace_ok(self) -> bool:
        return self.trace_error <= TRACE_TOL

    @property
    def hermitian_ok(self) -> bool:
        return self.hermiticity_error <= HERMITIAN_TOL

    @property
    def positive_ok(self) -> bool:
        return self.min_eigenvalue >= POSITIVITY_TOL

    @property
    def passed(self) -> bool:
        return self.trace_ok and self.hermitian_ok and self.positive_ok


def validate_density(rho) -> DensityDiagnostics:
    """Trace, Hermiticity and positivity diagnostics; never modifies ``rho``.

    For a stack of matrices the worst value over the stack is reported.
    """
    m = np.asarray(rho.matrix if isinstance(rho, DensityMatrix) else rho)
    trace_error = np.abs(np.trace(m, axis1=-2, axis2=-1) - 1.0)
    herm_error = np.abs(m - np.swapaxes(m.conj(), -1, -2)).max(axis=(-2, -1))
    hermitian_part = 0.5 * (m + np.swapaxes(m.conj(), -1, -2))
    min_eig = np.linalg.eigvalsh(hermitian_part).min(axis=-1)
    return DensityDiagnostics(float(np.max(trace_error)), float(np.max(herm_error)),
                              float(np.min(min_eig)))


def _bordered(matrix: np.ndarray) -> np.ndarray:
    # the rho_11 row is redundant because the population rows sum to zero
    a = np.array(matrix, dtype=complex, copy=True)
    a[..., 0, :] = _TRACE_ROW
    return a


def _check_residual(matrix: np.ndarray, rho_vec: np.ndarray) -> None:
    residual = np.abs(np.einsum("...ij,...j->...i", matrix, rho_vec)).max(axis=-1)
    scale = np.abs(matrix).sum(axis=-1).max(axis=-1)
    bad = ~(residual <= RESIDUAL_TOL * np.maximum(scale, 1.0))
    if np.any(bad):
        worst = float(np.max(np.where(np.isfinite(residual), residual, np.inf)))
        raise SolveFailure(f"steady-state residual {worst:.3e} exceeds tolerance "
                           f"at {int(bad.sum())} of {bad.size} points")


def null_space_dimension(matrix: np.ndarray, rtol: float = DEGENERACY_TOL) -> int:
    """Number of singular values of ``matrix`` below ``rtol`` times the largest."""
    s = np.linalg.svd(matrix, compute_uv=False)
    if s[0] == 0.0:
        return DIM
    return int(np.sum(s < rtol * s[0]))


def steady_state(liouvillian: Liouvillian) -> DensityMatrix:
    """Unique unit-trace solution of L rho = 0 via the bordered linear system.

    Raises
    ------
    DegenerateSteadyState
        If the numerical null space of L has dimension > 1.
    SolveFailure
        If the bordered system is singular or the residual is too large.
    """
    matrix = np.asarray(liouvillian.matrix)
    if matrix.shape != (DIM, DIM):
        raise ValueError("steady_state expects a single 16x16 Liouvillian; "
                         "use solve_steady_states for batches")
    if null_space_dimension(matrix) > 1:
        raise DegenerateSteadyState("Liouvillian null space has dimension > 1; "
                                    "the relaxation model does not fix a unique steady state")
    rho_vec = _solve(matrix)
    return DensityMatrix(unvec(rho_vec), _provenance(liouvillian))


def steady_state_svd(liouvillian: Liouvillian) -> DensityMatrix:
    """Steady state from the right singular vector of the smallest singular value."""
    matrix = np.asarray(liouvillian.matrix)
    _, s, vh = np.linalg.svd(matrix)
    if s[0] == 0.0 or s[-2] < DEGENERACY_TOL * s[0]:
        raise DegenerateSteadyState("Liouvillian null space has dimension > 1")
    null = vh[-1].conj()
    trace = _TRACE_ROW @ null
    if abs(trace) < 1e-14:
        raise SolveFailure("null vector has vanishing trace")
    return DensityMatrix(unvec(null / trace), _provenance(liouvillian))


def solve_steady_states(matrices: np.ndarray) -> np.ndarray:
    """Batched bordered solve for a (..., 16, 16) stack; returns (..., 4, 4).

    No degeneracy check is made here; callers that need one should check a
    representative member with :func:`steady_state`.
    """
    return unvec(_solve(np.asarray(matrices)))


def _solve(matrix: np.ndarray) -> np.ndarray:
    rhs = np.zeros(matrix.shape[:-1], dtype=complex)
    rhs[..., 0] = 1.0
    try:
        rho_vec = np.linalg.solve(_bordered(matrix), rhs[..., None])[..., 0]
    except np.linalg.LinAlgError as exc:
        raise SolveFailure(f"bordered steady-state system is singular: {exc}") from exc
    _check_residual(matrix, rho_vec)
    return rho_vec


def _provenance(liouvillian: Liouvillian) -> dict:
    d = liouvillian.drives
    return {
        "omega_p": d.omega_p, "omega_c": d.omega_c, "omega_s": d.omega_s,
        "delta_p": d.delta_p, "delta_c": d.delta_c, "delta_s": d.delta_s,
        "gamma2": liouvillian.atom.gamma2, "gamma3": liouvillian.atom.gamma3,
        "gamma4": liouvillian.atom.gamma4,
    }
