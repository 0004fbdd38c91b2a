"""Exception types raised across the package."""


class ZerovarError(Exception):
    """Base class for all package errors."""


class PreconditionError(ZerovarError, ValueError):
    """An argument violates a documented precondition."""


class RootAtInfinity(ZerovarError):
    """Leading coefficient is negligible; a zero sits (numerically) at infinity."""


class NearBoundaryZero(ZerovarError):
    """Contour refinement ran out of budget because a zero lies too close to the contour."""


class DegenerateSystem(ZerovarError):
    """The polynomial system has a common factor or failed the Bezout/residual gate."""


class RootFindingFailure(ZerovarError):
    """Simultaneous iteration did not pass the residual gate."""


class PoleError(ZerovarError, ZeroDivisionError):
    """Evaluation hit the pole 1 + <z, w> = 0 of the kernel gradient."""


class SingularityError(ZerovarError, ValueError):
    """Derivative of F requested at lambda <= 0."""


class DiagonalEvaluation(ZerovarError, ValueError):
    """A two-point quantity was requested on (or numerically at) the diagonal."""


class QuadratureError(ZerovarError, RuntimeError):
    """Adaptive quadrature failed to converge within its node budget."""


class SolverAbort(ZerovarError, RuntimeError):
    """A Monte Carlo run rejected more trials than allowed."""
