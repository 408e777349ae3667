"""Exception types shared across the package."""


class NonHermitianInput(ValueError):
    """An operator that must be hermitian is not, within tolerance."""


class InvalidSharpness(ValueError):
    """Sharpness parameter outside (0, 1]."""


class ZeroProbabilityBranch(RuntimeError):
    """Measurement branch with vanishing probability.

    Callers must skip the branch; renormalising it would propagate NaNs
    through parameter scans at measurement-orthogonal points.
    """


class NegativeRate(ValueError):
    """Decay rate must be nonnegative."""


class StepCountTooSmall(ValueError):
    """Fixed-step integrator called with too few steps."""


class DimensionMismatch(ValueError):
    """Operator dimensions disagree."""


class NonDichotomic(ValueError):
    """Operation requires outcomes labeled +1/-1."""


class ArityMismatch(ValueError):
    """Correlator count inconsistent with the requested sum length."""


class InvalidDimension(ValueError):
    """Unsupported Hilbert-space dimension."""
