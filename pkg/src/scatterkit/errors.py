"""Exception types raised by the numerical routines."""


class ScatterkitError(Exception):
    """Base class for all package errors."""


class InvalidParams(ScatterkitError, ValueError):
    """Model parameters violate a standing assumption (flux range, periodicity...)."""


class ThresholdEnergy(ScatterkitError, ValueError):
    """The requested energy coincides with a threshold lambda_j +- 2."""


class SingularAtEnergy(ScatterkitError, ArithmeticError):
    """The boundary-value matrix is (numerically) singular.

    This happens exactly at eigenvalues of the perturbed operator.
    """


class InsideBand(ScatterkitError, ValueError):
    """An energy outside the continuous spectrum was required."""


class OutOfBranch(ScatterkitError, ValueError):
    """A closed-form expression was evaluated outside its interval of validity."""


class NonConvergent(ScatterkitError, ArithmeticError):
    """A limiting procedure (threshold ladder, bisection) did not stabilise."""


class BracketAtBoundary(ScatterkitError, ArithmeticError):
    """A sign change touches the edge of the search domain."""


class PhaseJump(ScatterkitError, ArithmeticError):
    """Phase tracking could not resolve the argument to below pi/4 per step."""


class Unstable(ScatterkitError, ArithmeticError):
    """Truncated-lattice eigenvalue count changes under doubling of the cutoff."""


class IdentityViolation(ScatterkitError, AssertionError):
    """The Levinson identity failed; ``report`` carries the full diagnostics."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
