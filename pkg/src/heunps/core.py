"""Parameters, Cauchy data, grids and the scalar ingredients of the Heun kernels.

The general Heun equation is written here in the first-order-friendly form

    H'' = B1(z) H' + B2(z) H,

    B1(z) = -gamma/z - delta/(z-1) - epsilon/(z-t),
    B2(z) = (q - alpha*beta*z) / (z (z-1) (z-t)).
"""

from __future__ import annotations

import cmath
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateSingularity,
    InvalidSeed,
    PoleEvaluation,
    SeedDivergence,
    SegmentCrossesSingularity,
)

#: Relative distance below which a point counts as sitting on a pole.
POLE_RTOL = 1e-13
#: Default minimum distance between grid points and singular points.
PUNCTURE_RADIUS = 1e-4
#: Relative tolerance of the Fuchs relation check.
FUCHS_RTOL = 1e-12


def _c(x) -> complex:
    # +0.0 turns a negative-zero imaginary part into +0.0 so the principal
    # branch of log is taken on the upper side of the cut.
    x = complex(x)
    return complex(x.real, x.imag + 0.0)


class FuchsWarning(UserWarning):
    """Emitted when epsilon does not satisfy the Fuchs relation."""


@dataclass(frozen=True)
class HeunParameters:
    """The seven constants of the general Heun equation.

    ``t`` is the fourth regular singular point (besides 0, 1 and infinity) and
    ``q`` the accessory parameter.  Construction does not validate; use
    :func:`validate_params` for that.
    """

    t: complex
    q: complex
    alpha: complex
    beta: complex
    gamma: complex
    delta: complex
    epsilon: complex

    def __post_init__(self):
        for name in ("t", "q", "alpha", "beta", "gamma", "delta", "epsilon"):
            object.__setattr__(self, name, _c(getattr(self, name)))

    @classmethod
    def with_fuchs(cls, t, q, alpha, beta, gamma, delta) -> "HeunParameters":
        """Build a parameter set with epsilon fixed by ``1 + alpha + beta - gamma - delta``."""
        eps = 1 + _c(alpha) + _c(beta) - _c(gamma) - _c(delta)
        return cls(t, q, alpha, beta, gamma, delta, eps)

    @property
    def fuchs_satisfied(self) -> bool:
        expected = 1 + self.alpha + self.beta - self.gamma - self.delta
        return abs(self.epsilon - expected) <= FUCHS_RTOL * (1 + abs(self.epsilon))

    @property
    def singularities(self) -> tuple[complex, complex, complex]:
        return (0j, 1 + 0j, self.t)

    def as_dict(self) -> dict[str, complex]:
        return {k: getattr(self, k) for k in ("t", "q", "alpha", "beta", "gamma", "delta", "epsilon")}


@dataclass(frozen=True)
class CauchyData:
    """Anchor point ``z0`` with the values ``H(z0)`` and ``H'(z0)``."""

    z0: complex
    H0: complex
    H0p: complex

    def __post_init__(self):
        object.__setattr__(self, "z0", _c(self.z0))
        object.__setattr__(self, "H0", _c(self.H0))
        object.__setattr__(self, "H0p", _c(self.H0p))

    def check_ordinary(self, params: HeunParameters, rtol: float = POLE_RTOL) -> "CauchyData":
        for s in params.singularities:
            if abs(self.z0 - s) < rtol * (1 + abs(s)):
                raise PoleEvaluation(f"anchor z0={self.z0!r} sits on the singular point {s!r}")
        return self


@dataclass(frozen=True, eq=False)
class SegmentGrid:
    """Uniform grid ``za + j*step`` on the straight segment from ``za`` to ``zb``.

    The last point is pinned to ``zb``.  When ``avoid`` is given, every grid
    point must stay at least ``puncture_radius`` away from each of its entries.
    """

    za: complex
    zb: complex
    n_points: int
    avoid: tuple = ()
    puncture_radius: float = PUNCTURE_RADIUS
    points: np.ndarray = field(init=False, repr=False)
    step: complex = field(init=False)

    def __post_init__(self):
        za, zb = _c(self.za), _c(self.zb)
        n = int(self.n_points)
        if n < 2:
            raise ValueError(f"a segment grid needs at least 2 points, got {n}")
        step = (zb - za) / (n - 1)
        pts = za + step * np.arange(n)
        pts[-1] = zb
        pts.imag += 0.0
        pts.flags.writeable = False
        object.__setattr__(self, "za", za)
        object.__setattr__(self, "zb", zb)
        object.__setattr__(self, "n_points", n)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "step", step)
        for s in self.avoid:
            d = float(np.min(np.abs(pts - s)))
            if d < self.puncture_radius:
                raise SegmentCrossesSingularity(_c(s), d, self.puncture_radius)

    @classmethod
    def for_params(cls, za, zb, n_points, params: HeunParameters,
                   puncture_radius: float = PUNCTURE_RADIUS) -> "SegmentGrid":
        return cls(za, zb, n_points, params.singularities, puncture_radius)

    def __len__(self):
        return self.n_points


def validate_params(p: HeunParameters) -> HeunParameters:
    """Reject a degenerate singularity layout; warn if the Fuchs relation fails."""
    if p.t == 0 or p.t == 1:
        raise DegenerateSingularity(f"t={p.t!r} collides with a fixed singular point")
    if not p.fuchs_satisfied:
        warnings.warn(
            f"epsilon={p.epsilon!r} violates the Fuchs relation 1+alpha+beta-gamma-delta",
            FuchsWarning,
            stacklevel=2,
        )
    return p


def _guard(z: complex, p: HeunParameters, rtol: float) -> None:
    for s in (0j, 1 + 0j, p.t):
        if abs(z - s) < rtol * (1 + abs(s)):
            raise PoleEvaluation(f"z={z!r} is numerically at the pole {s!r}")


# Unchecked scalar kernels, shared with the Runge-Kutta oracle's inner loop.
def _b1(z, gamma, delta, epsilon, t):
    return -gamma / z - delta / (z - 1) - epsilon / (z - t)


def _b2(z, ab, q, t):
    return (q - ab * z) / (z * (z - 1) * (z - t))


def coeff_B1(z, p: HeunParameters, rtol: float = POLE_RTOL) -> complex:
    """``-gamma/z - delta/(z-1) - epsilon/(z-t)``."""
    z = _c(z)
    _guard(z, p, rtol)
    return _b1(z, p.gamma, p.delta, p.epsilon, p.t)


def coeff_B2(z, p: HeunParameters, rtol: float = POLE_RTOL) -> complex:
    """``-(alpha*beta*z - q) / (z (z-1) (z-t))``."""
    z = _c(z)
    _guard(z, p, rtol)
    return _b2(z, p.alpha * p.beta, p.q, p.t)


def eval_X(z, p: HeunParameters, rtol: float = POLE_RTOL) -> complex:
    """The combination ``B1(z) + B2(z) - 1`` feeding both Volterra kernels.

    This is the lower-left entry of the 2x2 generator acting on
    ``(H, H' - H)``; in terms of the raw parameters

        X(z) = (q - alpha*beta*z)/((z-1) z (z-t)) + epsilon/(t-z) - gamma/z - delta/(z-1) - 1.
    """
    z = _c(z)
    _guard(z, p, rtol)
    return _b1(z, p.gamma, p.delta, p.epsilon, p.t) + _b2(z, p.alpha * p.beta, p.q, p.t) - 1


def _cpow(base: complex, ex: complex) -> complex:
    if base == 0:
        if ex.real < 0 or (ex.real == 0 and ex.imag != 0):
            raise PoleEvaluation(f"0 raised to the power {ex!r}")
        return 1 + 0j if ex == 0 else 0j
    return base ** ex


def weight_w(zeta, p: HeunParameters) -> complex:
    """``zeta^gamma (zeta-1)^delta (t-zeta)^epsilon e^zeta`` on the principal branch."""
    zeta = _c(zeta)
    return (
        _cpow(_c(zeta), p.gamma)
        * _cpow(_c(zeta - 1), p.delta)
        * _cpow(_c(p.t - zeta), p.epsilon)
        * cmath.exp(zeta)
    )


def log_weight_along(points: np.ndarray, p: HeunParameters) -> np.ndarray:
    """Logarithm of ``z^gamma (z-1)^delta (t-z)^epsilon`` continued along a path.

    The branch is principal at ``points[0]`` and followed continuously from
    there, so ratios of the weight at two path points are those of the
    analytic continuation even when the path crosses a principal cut.
    """
    pts = np.asarray(points, dtype=complex)
    out = np.zeros(pts.shape, dtype=complex)
    for base, ex in ((pts, p.gamma), (pts - 1, p.delta), (p.t - pts, p.epsilon)):
        if ex == 0:
            continue
        base = base.real + 1j * (base.imag + 0.0)
        if np.any(base == 0):
            raise PoleEvaluation("weight evaluated on one of its branch points")
        arg = np.unwrap(np.angle(base))
        out += ex * (np.log(np.abs(base)) + 1j * arg)
    return out


def regular_series_coefficients(p: HeunParameters, n_terms: int) -> list[complex]:
    """Taylor coefficients of the local solution at 0 with ``H(0) = 1``.

    Three-term recurrence (DLMF 31.3.3):

        t (k+1)(k+gamma) c[k+1] = (k((k-1+gamma)(1+t) + t delta + epsilon) + q) c[k]
                                  - (k-1+alpha)(k-1+beta) c[k-1]
    """
    t, g = p.t, p.gamma
    if g * t == 0:
        raise InvalidSeed("the regular solution at 0 needs gamma*t != 0")
    if n_terms < 2:
        raise ValueError("n_terms must be at least 2")
    c = [1 + 0j, p.q / (g * t)]
    for k in range(1, n_terms - 1):
        r = t * (k + 1) * (k + g)
        if r == 0:
            raise InvalidSeed(f"recurrence breaks down at order {k + 1} (gamma is a non-positive integer)")
        qk = k * ((k - 1 + g) * (1 + t) + t * p.delta + p.epsilon)
        pk = (k - 1 + p.alpha) * (k - 1 + p.beta)
        c.append(((qk + p.q) * c[k] - pk * c[k - 1]) / r)
    return c


def local_series_seed(p: HeunParameters, z0, n_terms: int = 10) -> CauchyData:
    """Cauchy data at ``z0`` for the regular solution at 0 (``H(0)=1``, ``H'(0)=q/(gamma t)``).

    Parameters
    ----------
    p : HeunParameters
    z0 : complex
        Anchor inside the convergence disc ``|z0| < min(1, |t|)``.
    n_terms : int
        Number of Taylor terms summed.

    Raises
    ------
    InvalidSeed
        ``gamma * t == 0`` or ``z0`` outside the disc.
    SeedDivergence
        The last terms of the truncated series are not decreasing.
    """
    z0 = _c(z0)
    c = regular_series_coefficients(p, n_terms)
    if not abs(z0) < min(1.0, abs(p.t)):
        raise InvalidSeed(f"|z0|={abs(z0):.3g} is outside the convergence disc of the series at 0")
    terms = [ck * z0**k for k, ck in enumerate(c)]
    mags = [abs(x) for x in terms[-3:]]
    if len(terms) >= 3 and mags[-1] > 0 and mags[-1] >= mags[0]:
        raise SeedDivergence(f"series terms at z0={z0!r} are not decreasing: {mags}")
    H = sum(terms[::-1])
    Hp = sum((k * ck * z0 ** (k - 1) for k, ck in enumerate(c) if k), 0j)
    return CauchyData(z0, H, Hp)
