"""Exception hierarchy and the process exit codes they map to.

Exit code convention: 0 success, 1 usage error, 2 numerical failure,
3 I/O failure.
"""


class RidgepathError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class UsageError(RidgepathError):
    """Invalid parameters or inconsistent inputs. Exit code 1."""

    exit_code = 1


class NumericalError(RidgepathError):
    """A computation failed for numerical reasons. Exit code 2."""

    exit_code = 2


class IoError(RidgepathError):
    """File missing, unreadable, or malformed. Exit code 3."""

    exit_code = 3


class DimensionMismatch(UsageError):
    pass


class InvalidRank(UsageError):
    pass


class InvalidThreshold(UsageError):
    pass


class DegenerateSamples(UsageError):
    pass


class InsufficientSamples(UsageError):
    pass


class EmptyValidationSet(UsageError):
    pass


class HypothesisViolated(UsageError):
    pass


class NotSymmetric(NumericalError):
    pass


class NotPositiveDefinite(NumericalError):
    pass


class ConvergenceFailure(NumericalError):
    pass


class SingularInterpolant(NumericalError):
    pass


class BadFormat(IoError):
    pass
