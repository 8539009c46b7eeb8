"""Exception types shared across the package."""


class GradeMismatch(ArithmeticError):
    """Two values with incompatible radical grades were combined.

    The exact field is rationals times (sqrt2, sqrt pi) powers; sums and
    comparisons are only defined within a single grade.  This is raised
    rather than coercing to floating point.
    """


class SchemeInfeasible(RuntimeError):
    """A denominator eigenvalue required by the weight scheme is not positive."""


class PrecisionExhausted(RuntimeError):
    """Interval quadrature could not reach the target width at the given precision."""


class MalformedCertificate(ValueError):
    """A certificate document is structurally invalid."""
