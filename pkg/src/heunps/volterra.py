"""Discrete Volterra algebra on a uniform grid.

A kernel ``f(z', z) Theta(z' - z)`` sampled on grid points becomes a lower
triangular matrix (diagonal included, ``Theta(0) = 1``).  Volterra
composition becomes a trapezoid-weighted matrix product and the resolvent
``(1 - f)^{*-1}`` becomes a triangular solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DimensionMismatch, NearSingularDiagonal

#: Smallest admissible magnitude of a diagonal entry of a resolvent system.
DIAGONAL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class TriangularKernel:
    """Lower-triangular sampling ``F[i, j] = f(z_i, z_j)`` for ``i >= j`` with grid step ``step``."""

    entries: np.ndarray
    step: complex

    def __post_init__(self):
        F = np.tril(np.asarray(self.entries, dtype=complex))
        if F.ndim != 2 or F.shape[0] != F.shape[1]:
            raise ValueError(f"kernel matrix must be square, got shape {F.shape}")
        object.__setattr__(self, "entries", F)
        object.__setattr__(self, "step", complex(self.step))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def diag(self) -> np.ndarray:
        return np.diagonal(self.entries).copy()

    @classmethod
    def from_function(cls, points, step, f) -> "TriangularKernel":
        """Sample ``f(z_i, z_j)`` (vectorised over broadcast arguments) on the grid."""
        z = np.asarray(points, dtype=complex)
        return cls(f(z[:, None], z[None, :]) * np.ones((len(z), len(z))), step)

    @classmethod
    def constant(cls, n: int, step, value=1.0) -> "TriangularKernel":
        return cls(np.full((n, n), value, dtype=complex), step)


def _check_pair(F: TriangularKernel, L: TriangularKernel) -> None:
    if F.dim != L.dim:
        raise DimensionMismatch(f"kernel sizes differ: {F.dim} vs {L.dim}")
    if F.step != L.step:
        raise DimensionMismatch(f"kernel steps differ: {F.step!r} vs {L.step!r}")


def star_product(F: TriangularKernel, L: TriangularKernel) -> TriangularKernel:
    """Trapezoid-rule Volterra composition ``(f * l)(z_i, z_j)``.

    Computes ``(dz/2)(F - dF) L + (dz/2) F (L - dL)``, i.e. the trapezoid rule
    in the intermediate variable with half weights at both ends.
    """
    _check_pair(F, L)
    A, B = F.entries, L.entries
    h = F.step / 2
    out = h * ((A - np.diag(np.diagonal(A))) @ B + A @ (B - np.diag(np.diagonal(B))))
    return TriangularKernel(out, F.step)


def resolvent_matrix(K: TriangularKernel) -> np.ndarray:
    """``Id - dz K + (dz/2) dK``, the system matrix of the discrete resolvent."""
    dz = K.step
    A = -dz * K.entries
    A[np.diag_indices(K.dim)] += 1 + dz / 2 * np.diagonal(K.entries)
    return A


def resolvent_solve(K: TriangularKernel, rhs, tol: float = DIAGONAL_TOL) -> np.ndarray:
    """Solve ``(Id - dz K + (dz/2) dK) x = rhs`` by forward substitution.

    Raises
    ------
    NearSingularDiagonal
        When a diagonal entry has magnitude ``<= tol``.
    """
    v = np.asarray(rhs, dtype=complex)
    if v.shape != (K.dim,):
        raise DimensionMismatch(f"right-hand side has shape {v.shape}, kernel dimension is {K.dim}")
    A = resolvent_matrix(K)
    d = np.abs(np.diagonal(A))
    bad = np.flatnonzero(~(d > tol))
    if bad.size:
        i = int(bad[0])
        raise NearSingularDiagonal(i, A[i, i], tol)
    return solve_triangular(A, v, lower=True, check_finite=False)


def resolvent_column(K: TriangularKernel, tol: float = DIAGONAL_TOL) -> np.ndarray:
    """First column ``G(z_i, z_0)`` of ``(1 - K)^{*-1} - 1``.

    ``G`` solves ``G = K + K * G`` with the trapezoid product.  With
    ``x = A^{-1} e_0`` from :func:`resolvent_solve` the column is

        G[0] = K[0, 0],    G[k] = x[k] (1 - (dz K[0,0] / 2)^2) / dz   (k >= 1)

    which reproduces the trapezoid Volterra solution exactly.
    """
    v = np.zeros(K.dim, dtype=complex)
    v[0] = 1
    x = resolvent_solve(K, v, tol)
    dz = K.step
    k00 = K.entries[0, 0]
    g = x * ((1 - (dz * k00 / 2) ** 2) / dz)
    g[0] = k00
    return g


def cumulative_integral(f, step) -> np.ndarray:
    """Cumulative trapezoid ``g[0] = 0``, ``g[i] = g[i-1] + (dz/2)(f[i] + f[i-1])``.

    ``step`` is the complex grid step, or any object with a ``step`` attribute
    such as a :class:`~heunps.core.SegmentGrid`.
    """
    dz = complex(getattr(step, "step", step))
    f = np.asarray(f, dtype=complex)
    g = np.zeros_like(f)
    np.cumsum((dz / 2) * (f[1:] + f[:-1]), out=g[1:])
    return g
