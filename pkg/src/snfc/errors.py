"""Exception hierarchy shared across the package."""


class SNFCError(Exception):
    """Base class for all library errors."""


class FieldMismatch(SNFCError):
    pass


class ShapeError(SNFCError, ValueError):
    pass


class RankError(SNFCError, ValueError):
    pass


class EmptyInput(SNFCError, ValueError):
    pass


class TooLarge(SNFCError):
    """An exhaustive enumeration would exceed its configured cap."""


class IncompleteCode(SNFCError):
    pass


class ConstructionFailed(SNFCError):
    pass


class SelectionFailed(ConstructionFailed):
    pass


class SamplingExhausted(ConstructionFailed):
    pass


class InternalError(SNFCError):
    """A post-condition that should hold by construction did not."""


class InputError(SNFCError, ValueError):
    """A malformed or inconsistent input file or argument."""
