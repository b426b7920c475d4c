"""Exception hierarchy for the Heun path-sum evaluator."""


class HeunError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(HeunError, ValueError):
    """Invalid user-supplied parameters."""


class DegenerateSingularity(ParameterError):
    """The singularity ``t`` coincides with 0 or 1."""


class InvalidSeed(ParameterError):
    """The regular local solution at 0 cannot be seeded (``gamma * t == 0`` or bad anchor)."""


class SegmentAnchorMismatch(ParameterError):
    """The first grid point is not the anchor of the Cauchy data."""


class DimensionMismatch(ParameterError):
    """Two kernels do not live on the same grid."""


class PoleEvaluation(HeunError, ArithmeticError):
    """A coefficient was evaluated at (or numerically at) one of its poles."""


class SegmentCrossesSingularity(HeunError):
    """A straight segment passes within the puncture radius of a singular point."""

    def __init__(self, singularity: complex, distance: float, radius: float):
        self.singularity = singularity
        self.distance = distance
        self.radius = radius
        super().__init__(
            f"segment passes within {distance:.3g} of the singular point {singularity!r} "
            f"(puncture radius {radius:.3g})"
        )


class NumericalError(HeunError, ArithmeticError):
    """Base class for failures of the numerical scheme itself."""


class NearSingularDiagonal(NumericalError):
    """A diagonal entry of a resolvent system is too small for forward substitution."""

    def __init__(self, index: int, value: complex, tol: float):
        self.index = index
        self.value = value
        super().__init__(
            f"diagonal entry {index} of the resolvent system has magnitude {abs(value):.3g} "
            f"<= {tol:.1e}; use a smaller step (more points per sub-segment)"
        )


class SeedDivergence(NumericalError):
    """The local power series at 0 is not converging at the requested anchor."""


class SlowConvergence(NumericalError):
    """A series oracle hit its term cap before reaching tolerance."""


class GridMismatch(HeunError, ValueError):
    """Two solution tables cannot be aligned on shared points."""
