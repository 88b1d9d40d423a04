"""Exception hierarchy.

Three families map onto the CLI exit codes: bad input (2), violated
preconditions (3) and I/O failures (4).
"""


class TgsError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class InputError(TgsError, ValueError):
    exit_code = 2


class PreconditionError(TgsError):
    exit_code = 3


class IoFailure(TgsError, OSError):
    exit_code = 4


class BadOrder(InputError):
    pass


class IndexOutOfRange(InputError, IndexError):
    pass


class DuplicateIndex(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NonPositiveScale(InputError):
    pass


class NonPositiveWeight(InputError):
    pass


class NonPositiveShift(InputError):
    pass


class NonPositiveStart(InputError):
    pass


class ScaleOutOfRange(InputError):
    pass


class BadBox(InputError):
    pass


class NotNonnegative(PreconditionError):
    pass


class NotIrreducible(PreconditionError):
    pass


class NotBalanced(PreconditionError):
    pass


class OutsideRegion(PreconditionError):
    pass


class ExpansionOverflow(TgsError, RuntimeError):
    """Ray expansion found no sign change; the region is bounded, so this is a bug."""
