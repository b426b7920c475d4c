"""Independent reference computations used to validate the path-sum evaluator.

Nothing here touches the Volterra machinery: the Runge-Kutta stepper only
shares the scalar coefficient formulas with :mod:`heunps.core`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    CauchyData,
    HeunParameters,
    SegmentGrid,
    _b1,
    _b2,
    _c,
)
from .errors import GridMismatch, PoleEvaluation, SlowConvergence
from .pathsum import SolutionTable

MAX_SERIES_TERMS = 10_000


@dataclass(frozen=True)
class OracleReport:
    max_abs_deviation: float
    observed_order: float | None
    points_compared: int

    def __post_init__(self):
        if self.points_compared < 2:
            raise ValueError("an oracle comparison needs at least 2 points")
        if not self.max_abs_deviation >= 0:
            raise ValueError("max_abs_deviation must be non-negative")


def rk_along(p: HeunParameters, cauchy: CauchyData, points, substeps: int = 10):
    """Classical RK4 for ``u' = v, v' = B1 v + B2 u`` through a sequence of points.

    Each straight piece ``points[k] -> points[k+1]`` is crossed in ``substeps``
    equal steps.  Returns ``(u, v)`` arrays sampled at ``points``.
    """
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    pts = [_c(z) for z in np.asarray(points, dtype=complex)]
    if abs(pts[0] - cauchy.z0) > 1e-14 * (1 + abs(cauchy.z0)):
        raise ValueError("the first point must be the Cauchy anchor")
    g, d, e, t = p.gamma, p.delta, p.epsilon, p.t
    ab, q = p.alpha * p.beta, p.q
    for s in p.singularities:
        if any(z == s for z in pts):
            raise PoleEvaluation(f"RK path hits the pole {s!r}")

    u, v = cauchy.H0, cauchy.H0p
    us, vs = [u], [v]
    for za, zb in zip(pts[:-1], pts[1:]):
        h = (zb - za) / substeps
        h2 = h / 2
        for n in range(substeps):
            z = za + n * h
            zm = z + h2
            z1 = za + (n + 1) * h
            b1, b2 = _b1(z, g, d, e, t), _b2(z, ab, q, t)
            b1m, b2m = _b1(zm, g, d, e, t), _b2(zm, ab, q, t)
            b11, b21 = _b1(z1, g, d, e, t), _b2(z1, ab, q, t)
            k1u, k1v = v, b1 * v + b2 * u
            uu, vv = u + h2 * k1u, v + h2 * k1v
            k2u, k2v = vv, b1m * vv + b2m * uu
            uu, vv = u + h2 * k2u, v + h2 * k2v
            k3u, k3v = vv, b1m * vv + b2m * uu
            uu, vv = u + h * k3u, v + h * k3v
            k4u, k4v = vv, b11 * vv + b21 * uu
            u = u + h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
            v = v + h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        us.append(u)
        vs.append(v)
    return np.array(us), np.array(vs)


def rk_reference(p: HeunParameters, cauchy: CauchyData, grid: SegmentGrid, substeps: int = 10) -> SolutionTable:
    """RK4 solution sampled on ``grid``; global error ``O((step/substeps)^4)``."""
    u, v = rk_along(p, cauchy, grid.points, substeps)
    return SolutionTable(grid.points.copy(), u, v, p, n1=1, n2=grid.n_points,
                         meta={"oracle": "rk4", "substeps": substeps})


def rk_on_table(table: SolutionTable, cauchy: CauchyData, substeps: int = 10) -> SolutionTable:
    """RK4 through the same points as an existing table."""
    u, v = rk_along(table.params, cauchy, table.points, substeps)
    return SolutionTable(table.points.copy(), u, v, table.params, table.n1, table.n2,
                         meta={"oracle": "rk4", "substeps": substeps})


def hyp2f1_series(a, b, c, z, tol: float = 1e-17, max_terms: int = MAX_SERIES_TERMS) -> complex:
    """Partial sums of the Gauss series ``sum (a)_k (b)_k / ((c)_k k!) z^k`` for ``|z| < 1``.

    Stops once a term drops below ``tol * |sum|``.

    Raises
    ------
    SlowConvergence
        If ``max_terms`` terms do not reach the tolerance.
    """
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    if not abs(z) < 1:
        raise ValueError("the Gauss series needs |z| < 1")
    if c.imag == 0 and c.real <= 0 and c.real == math.floor(c.real):
        raise ValueError("c must not be a non-positive integer")
    term = 1 + 0j
    total = 1 + 0j
    for k in range(max_terms):
        term = term * ((a + k) * (b + k)) / ((c + k) * (k + 1)) * z
        total += term
        if abs(term) <= tol * abs(total):
            return total
    raise SlowConvergence(f"2F1 series did not converge in {max_terms} terms at z={z!r}")


def hypergeometric_reduction(p: HeunParameters) -> tuple[complex, complex, complex]:
    """``(a, b, c)`` with ``H_regular(z) = 2F1(a, b; c; z)`` when ``epsilon = 0`` and ``q = alpha*beta*t``.

    In that case the Heun operator reduces to the hypergeometric one with
    ``c = gamma``, ``a + b = gamma + delta - 1`` and ``a b = alpha beta``.
    """
    if p.epsilon != 0 or abs(p.q - p.alpha * p.beta * p.t) > 1e-14 * (1 + abs(p.q)):
        raise ValueError("parameters do not reduce to the hypergeometric equation")
    s = p.gamma + p.delta - 1
    root = cmath.sqrt(s * s - 4 * p.alpha * p.beta)
    return (s + root) / 2, (s - root) / 2, p.gamma


def _shared(coarse: SolutionTable, fine: SolutionTable, tol: float = 1e-12) -> np.ndarray:
    """Fine-table values at the coarse points (fine = coarse with every step halved)."""
    if len(fine) != 2 * len(coarse) - 1:
        raise GridMismatch(f"fine table has {len(fine)} points, expected {2 * len(coarse) - 1}")
    fz = fine.points[::2]
    scale = 1 + np.max(np.abs(coarse.points))
    if np.max(np.abs(fz - coarse.points)) > tol * scale:
        raise GridMismatch("coarse points are not every other fine point")
    return fine.H[::2]


def richardson_error(coarse: SolutionTable, fine: SolutionTable, finest: SolutionTable | None = None,
                     order: int = 2) -> OracleReport:
    """Error estimate of ``fine`` from a step-halving pair, optionally with observed order.

    ``max_abs_deviation`` is ``max |H_fine - H_coarse| / (2^order - 1)`` over
    the coarse points.  With ``finest`` (quarter step) the observed order is
    ``log2(max|H_c - H_f| / max|H_f - H_ff|)``, where both maxima run over
    the coarse points; ``None`` if the differences are at roundoff level.
    """
    hf = _shared(coarse, fine)
    d1 = float(np.max(np.abs(hf - coarse.H)))
    observed = None
    if finest is not None:
        hff = _shared(fine, finest)[::2]
        d2 = float(np.max(np.abs(hff - hf)))
        floor = 1e-13 * (1 + float(np.max(np.abs(coarse.H))))
        if d1 > floor and d2 > floor:
            observed = math.log2(d1 / d2)
    return OracleReport(d1 / (2**order - 1), observed, len(coarse))


def compare_tables(table: SolutionTable, reference: SolutionTable) -> float:
    """Max-norm deviation of ``H`` between two tables on the same points."""
    if len(table) != len(reference) or np.max(np.abs(table.points - reference.points)) > 1e-12 * (
        1 + np.max(np.abs(table.points))
    ):
        raise GridMismatch("tables are not on the same points")
    return float(np.max(np.abs(table.H - reference.H)))


__all__ = [
    "OracleReport",
    "compare_tables",
    "hyp2f1_series",
    "hypergeometric_reduction",
    "richardson_error",
    "rk_along",
    "rk_on_table",
    "rk_reference",
]
