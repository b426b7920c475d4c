"""Path-sum evaluation of the general Heun function on straight segments.

With ``psi = (H, H' - H)`` the Heun equation is a 2x2 linear system whose
evolution operator is written exactly through two Volterra resolvents:

    H(z) = H0 (1 + int_{z0}^{z} G1)
           + (H0' - H0) (e^{z-z0} - 1 + int_{z0}^{z} (e^{z-s} - 1) G2(s) ds)

where ``G_k = sum_{n>=1} K_k^{*n}``.  Only the first column of each
resolvent is needed, so each segment costs two triangular solves.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    PUNCTURE_RADIUS,
    POLE_RTOL,
    CauchyData,
    HeunParameters,
    SegmentGrid,
    _c,
    local_series_seed,
    log_weight_along,
    validate_params,
)
from .errors import InvalidSeed, PoleEvaluation, SegmentAnchorMismatch, SegmentCrossesSingularity
from .volterra import TriangularKernel, cumulative_integral, resolvent_column

SPACINGS = ("uniform", "adaptive")


@dataclass(eq=False)
class SolutionTable:
    """Grid points with ``H`` and ``H'`` values and run metadata.

    ``n1``/``n2`` are the sub-segment count and points per sub-segment.
    Border points are shared, so a chained table has ``n1*(n2-1)+1`` rows
    for uniform subdivisions.
    """

    points: np.ndarray
    H: np.ndarray
    Hp: np.ndarray
    params: HeunParameters
    n1: int = 1
    n2: int = 0
    error_estimate: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (len(self.points) == len(self.H) == len(self.Hp)):
            raise ValueError("points, H and Hp must have equal length")

    def __len__(self):
        return len(self.points)

    def reversed(self) -> "SolutionTable":
        return SolutionTable(self.points[::-1], self.H[::-1], self.Hp[::-1], self.params,
                             self.n1, self.n2, self.error_estimate, dict(self.meta))


def _vec_guard(z: np.ndarray, p: HeunParameters, rtol: float = POLE_RTOL) -> None:
    for s in p.singularities:
        if np.any(np.abs(z - s) < rtol * (1 + abs(s))):
            raise PoleEvaluation(f"grid touches the pole {s!r}")


def _B2_vec(z, p):
    return (p.q - p.alpha * p.beta * z) / (z * (z - 1) * (z - p.t))


def _X_vec(z, p):
    return (-p.gamma / z - p.delta / (z - 1) - p.epsilon / (z - p.t)) + _B2_vec(z, p) - 1


def build_K2(grid: SegmentGrid, p: HeunParameters) -> TriangularKernel:
    """``K2(z_i, z_j) = X(z_i) e^{z_i - z_j} - B2(z_i)`` on the grid."""
    z = grid.points
    _vec_guard(z, p)
    X = _X_vec(z, p)
    D = np.tril(z[:, None] - z[None, :])
    return TriangularKernel(X[:, None] * np.exp(D) - _B2_vec(z, p)[:, None], grid.step)


def build_frakI(grid: SegmentGrid, p: HeunParameters) -> np.ndarray:
    """Cumulative trapezoid integral of ``w(s) X(s)`` from ``z_0`` to each ``z_i``.

    ``w(s) = s^gamma (s-1)^delta (t-s)^epsilon e^s`` with the branch principal
    at ``z_0`` and continued along the segment.
    """
    z = grid.points
    _vec_guard(z, p)
    w = np.exp(log_weight_along(z, p) + z)
    return cumulative_integral(w * _X_vec(z, p), grid.step)


def build_K1(grid: SegmentGrid, p: HeunParameters, frakI: np.ndarray) -> TriangularKernel:
    """``K1(z_i, z_j) = 1 + e^{-z_i} / w0(z_i) * (I_i - I_j)`` from the cumulative integral.

    All columns come from one outer difference of ``frakI``; the diagonal is exactly 1.
    """
    z = grid.points
    frakI = np.asarray(frakI, dtype=complex)
    fac = np.exp(-z - log_weight_along(z, p))
    return TriangularKernel(1 + fac[:, None] * (frakI[:, None] - frakI[None, :]), grid.step)


def _check_anchor(cauchy: CauchyData, za: complex) -> None:
    if abs(cauchy.z0 - za) > 1e-14 * (1 + abs(za)):
        raise SegmentAnchorMismatch(f"segment starts at {za!r} but the Cauchy data sits at {cauchy.z0!r}")


def evaluate_derivative(grid: SegmentGrid, cauchy: CauchyData, g1: np.ndarray, g2: np.ndarray) -> np.ndarray:
    """``H'(z_i)`` from the resolvent columns, by differentiating the path-sum formula."""
    z = grid.points
    ez = np.exp(z - cauchy.z0)
    S = cumulative_integral(np.exp(cauchy.z0 - z) * g2, grid.step)
    Hp = cauchy.H0 * g1 + (cauchy.H0p - cauchy.H0) * (ez + ez * S)
    Hp[0] = cauchy.H0p
    return Hp


def evaluate_segment(p: HeunParameters, cauchy: CauchyData, grid: SegmentGrid) -> SolutionTable:
    """Evaluate ``H`` and ``H'`` on one uniform segment grid starting at ``cauchy.z0``.

    Raises
    ------
    SegmentAnchorMismatch
        ``grid.points[0]`` differs from ``cauchy.z0``.
    NearSingularDiagonal
        The step is too large for one of the resolvent systems.
    """
    _check_anchor(cauchy, grid.points[0])
    z, dz = grid.points, grid.step
    g1 = resolvent_column(build_K1(grid, p, build_frakI(grid, p)))
    g2 = resolvent_column(build_K2(grid, p))

    ez = np.exp(z - cauchy.z0)
    S = cumulative_integral(np.exp(cauchy.z0 - z) * g2, dz)
    u11 = 1 + cumulative_integral(g1, dz)
    u12 = ez - 1 + ez * S - cumulative_integral(g2, dz)
    H = cauchy.H0 * u11 + (cauchy.H0p - cauchy.H0) * u12
    H[0] = cauchy.H0
    Hp = evaluate_derivative(grid, cauchy, g1, g2)
    return SolutionTable(z.copy(), H, Hp, p, n1=1, n2=grid.n_points,
                         meta={"n_total": grid.n_points, "n_nominal": grid.n_points})


def segment_distance(za: complex, zb: complex, s: complex) -> float:
    """Euclidean distance from the point ``s`` to the closed segment ``[za, zb]``."""
    L = zb - za
    if L == 0:
        return abs(s - za)
    u = ((s - za) / L).real
    u = min(1.0, max(0.0, u))
    return abs(za + u * L - s)


def check_segment(p: HeunParameters, za, zb, radius: float = PUNCTURE_RADIUS) -> None:
    """Raise :class:`SegmentCrossesSingularity` if ``[za, zb]`` comes closer than ``radius`` to 0, 1 or t."""
    for s in p.singularities:
        d = segment_distance(_c(za), _c(zb), s)
        # relative slack so a segment that starts exactly on the puncture circle is accepted
        if d < radius * (1 - 1e-9):
            raise SegmentCrossesSingularity(s, d, radius)


def _asinh_potential(s: np.ndarray, za: complex, L: complex, sing) -> np.ndarray:
    # integral of |L| / |za + s L - c| ds, summed over singular points c
    out = np.zeros_like(s, dtype=float)
    for c in sing:
        w = (c - za) / L
        s0, h = w.real, abs(w.imag)
        if h > 0:
            out += np.arcsinh((s - s0) / h)
        else:
            d = s - s0
            out += np.sign(d) * np.log(np.abs(d))
    return out


def subdivision_edges(za, zb, n1: int, p: HeunParameters, spacing: str = "uniform") -> np.ndarray:
    """Sub-segment borders of ``[za, zb]``.

    ``uniform`` gives ``n1`` equal pieces.  ``adaptive`` equidistributes the
    density ``1/|L| + sum_c 1/|z - c|`` over the singular points ``c``, so
    sub-segments shrink in proportion to the distance to the nearest
    singularity.  Each piece is still a uniform grid of its own.
    """
    za, zb = _c(za), _c(zb)
    if n1 < 1:
        raise ValueError("n1 must be >= 1")
    frac = np.arange(n1 + 1) / n1
    if spacing == "adaptive" and n1 > 1:
        L = zb - za
        sing = [c for c in p.singularities]

        def phi(s):
            return s + _asinh_potential(s, za, L, sing)

        lo_v, hi_v = phi(np.array([0.0]))[0], phi(np.array([1.0]))[0]
        targets = lo_v + frac * (hi_v - lo_v)
        lo, hi = np.zeros(n1 + 1), np.ones(n1 + 1)
        for _ in range(64):
            mid = (lo + hi) / 2
            below = phi(mid) < targets
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        frac = (lo + hi) / 2
        frac[0], frac[-1] = 0.0, 1.0
    elif spacing not in SPACINGS:
        raise ValueError(f"unknown spacing {spacing!r}; expected one of {SPACINGS}")
    edges = za + (zb - za) * frac
    edges[0], edges[-1] = za, zb
    edges.imag += 0.0
    return edges


def evaluate_path(p: HeunParameters, cauchy: CauchyData, edges, counts,
                  puncture_radius: float = PUNCTURE_RADIUS) -> SolutionTable:
    """Chain :func:`evaluate_segment` over consecutive sub-segments.

    ``edges`` are the sub-segment borders and ``counts[k]`` the number of grid
    points of sub-segment ``k``.  The end values ``(H, H')`` of each piece are
    the Cauchy data of the next; shared border points appear once.
    """
    validate_params(p)
    edges = [_c(e) for e in edges]
    if len(counts) != len(edges) - 1:
        raise ValueError("need one point count per sub-segment")
    _check_anchor(cauchy, edges[0])
    for a, b in zip(edges[:-1], edges[1:]):
        check_segment(p, a, b, puncture_radius)
    pts, H, Hp = [np.array([cauchy.z0])], [np.array([cauchy.H0])], [np.array([cauchy.H0p])]
    data = CauchyData(edges[0], cauchy.H0, cauchy.H0p)
    for a, b, n in zip(edges[:-1], edges[1:], counts):
        grid = SegmentGrid.for_params(data.z0, b, n, p, puncture_radius)
        seg = evaluate_segment(p, data, grid)
        pts.append(seg.points[1:])
        H.append(seg.H[1:])
        Hp.append(seg.Hp[1:])
        data = CauchyData(seg.points[-1], seg.H[-1], seg.Hp[-1])
    n1 = len(counts)
    n2 = int(max(counts))
    pts, H, Hp = np.concatenate(pts), np.concatenate(H), np.concatenate(Hp)
    meta = {
        "n_total": len(pts),
        "n_nominal": int(sum(counts)),
        "edges": edges,
        "counts": [int(c) for c in counts],
    }
    return SolutionTable(pts, H, Hp, p, n1=n1, n2=n2, meta=meta)


def _richardson_max(coarse: SolutionTable, fine: SolutionTable) -> float:
    # fine halves every sub-segment step, so coarse point k is fine point 2k
    return float(np.max(np.abs(fine.H[::2] - coarse.H))) / 3.0


def evaluate_interval(p: HeunParameters, cauchy: CauchyData, za, zb, n1: int, n2: int,
                      spacing: str = "uniform", puncture_radius: float = PUNCTURE_RADIUS,
                      estimate_error: bool = False) -> SolutionTable:
    """Evaluate on ``[za, zb]`` split into ``n1`` sub-segments of ``n2`` points each.

    Returns ``n1*(n2-1)+1`` points.  With ``estimate_error`` a second run at
    half the step fills ``error_estimate`` (Richardson, order 2).

    Raises
    ------
    SegmentCrossesSingularity
        If the segment passes within ``puncture_radius`` of 0, 1 or t.
    """
    if n2 < 3:
        raise ValueError("n2 must be >= 3")
    za, zb = _c(za), _c(zb)
    _check_anchor(cauchy, za)
    check_segment(p, za, zb, puncture_radius)
    edges = subdivision_edges(za, zb, n1, p, spacing)
    table = evaluate_path(p, cauchy, edges, [n2] * n1, puncture_radius)
    table.meta["spacing"] = spacing
    if estimate_error:
        fine = evaluate_path(p, cauchy, edges, [2 * n2 - 1] * n1, puncture_radius)
        table.error_estimate = _richardson_max(table, fine)
    return table


def split_counts(n_points: int, n2: int) -> tuple[list[int], list[int]]:
    """Cut ``n_points-1`` intervals into as few chunks of at most ``n2-1`` intervals as possible.

    Returns the per-chunk point counts and the cut indices into the global grid.
    """
    if n_points < 2 or n2 < 2:
        raise ValueError("need at least 2 points overall and per sub-segment")
    nint = n_points - 1
    n1 = -(-nint // (n2 - 1))
    cuts = [round(k * nint / n1) for k in range(n1 + 1)]
    return [cuts[k + 1] - cuts[k] + 1 for k in range(n1)], cuts


def evaluate_uniform_points(p: HeunParameters, cauchy: CauchyData, za, zb, n_points: int, n2: int,
                            puncture_radius: float = PUNCTURE_RADIUS, refinement: int = 1) -> SolutionTable:
    """Exactly ``n_points`` equispaced points on ``[za, zb]``, chained in chunks of at most ``n2``.

    With ``refinement = r > 1`` the same chunks are used with every step
    divided by ``r``; the table then has ``r*(n_points-1)+1`` points and its
    every ``r``-th point coincides with the unrefined grid.
    """
    if refinement < 1:
        raise ValueError("refinement must be >= 1")
    za, zb = _c(za), _c(zb)
    counts, cuts = split_counts(n_points, n2)
    counts = [refinement * (c - 1) + 1 for c in counts]
    cuts = [refinement * c for c in cuts]
    step = (zb - za) / (refinement * (n_points - 1))
    edges = [za + c * step for c in cuts]
    edges[-1] = zb
    check_segment(p, za, zb, puncture_radius)
    table = evaluate_path(p, cauchy, edges, counts, puncture_radius)
    table.meta["spacing"] = "uniform"
    return table


def _side_share(total: int, left_len: float, right_len: float, minimum: int) -> tuple[int, int]:
    nl = int(round(total * left_len / (left_len + right_len)))
    nl = min(max(nl, minimum), total - minimum)
    return nl, total - nl


def evaluate_regular_from_origin(p: HeunParameters, z_min, z_max, puncture: float = PUNCTURE_RADIUS,
                                 n1: int = 10, n2: int = 100, spacing: str = "uniform",
                                 n_points: int | None = None, n_terms: int = 10,
                                 refinement: int = 1) -> tuple[SolutionTable, SolutionTable]:
    """Regular solution at 0 (``H(0) = 1``) on both sides of the origin.

    Cauchy data are seeded from the local power series at ``-puncture`` and
    ``+puncture`` (along the direction of ``[z_min, z_max]``) and propagated
    outward.  ``n1`` sub-segments are shared between the two sides in
    proportion to their lengths.  If ``n_points`` is given the two tables
    together hold exactly that many equispaced points instead, chained in
    chunks of at most ``n2``.  ``refinement = r`` divides every step by
    ``r`` on the same sub-segments (for step-refinement error estimates).

    Returns
    -------
    (left, right)
        Tables ordered outward from the origin.
    """
    validate_params(p)
    if p.gamma * p.t == 0:
        raise InvalidSeed("the regular solution at 0 needs gamma*t != 0")
    z_min, z_max = _c(z_min), _c(z_max)
    L = z_max - z_min
    if L == 0:
        raise ValueError("empty interval")
    u = L / abs(L)
    w = -z_min / L
    if abs(w.imag) * abs(L) > 1e-12 * (1 + abs(L)) or not (0 < w.real < 1):
        raise ValueError("the interval must pass through the origin with 0 strictly inside")
    zl, zr = -puncture * u, puncture * u
    len_l, len_r = abs(z_min - zl), abs(z_max - zr)
    seeds = (local_series_seed(p, zl, n_terms), local_series_seed(p, zr, n_terms))
    if n_points is not None:
        nl, nr = _side_share(n_points, len_l, len_r, 2)
        left = evaluate_uniform_points(p, seeds[0], zl, z_min, nl, n2, puncture, refinement)
        right = evaluate_uniform_points(p, seeds[1], zr, z_max, nr, n2, puncture, refinement)
    else:
        if n1 < 2:
            raise ValueError("need n1 >= 2 to cover both sides of the origin")
        n1l, n1r = _side_share(n1, len_l, len_r, 1)
        m2 = refinement * (n2 - 1) + 1
        left = evaluate_interval(p, seeds[0], zl, z_min, n1l, m2, spacing, puncture)
        right = evaluate_interval(p, seeds[1], zr, z_max, n1r, m2, spacing, puncture)
    for side, tab in (("left", left), ("right", right)):
        tab.meta["side"] = side
        tab.meta["seed"] = seeds[0] if side == "left" else seeds[1]
    return left, right


__all__ = [
    "SolutionTable",
    "build_K1",
    "build_K2",
    "build_frakI",
    "check_segment",
    "evaluate_derivative",
    "evaluate_interval",
    "evaluate_path",
    "evaluate_regular_from_origin",
    "evaluate_segment",
    "evaluate_uniform_points",
    "segment_distance",
    "split_counts",
    "subdivision_edges",
]
