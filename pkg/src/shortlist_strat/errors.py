"""Exception hierarchy shared by all solver modules."""


class ShortlistError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(ShortlistError, ValueError):
    pass


class InfeasibleDemandError(ShortlistError, ValueError):
    """Approval demands cannot be realized by the requested number of ballots."""


class UnsupportedVariantError(ShortlistError, ValueError):
    pass


class InvalidProgramError(ShortlistError, ValueError):
    pass


class TooLargeError(ShortlistError):
    """An exhaustive oracle would exceed its enumeration guard."""


class InternalConsistencyError(ShortlistError, RuntimeError):
    """A solver certificate failed re-simulation. Indicates a bug."""
