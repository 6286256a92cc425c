"""Exception hierarchy shared by every solver module."""


class UcgError(Exception):
    """Base class for all errors raised by the toolkit."""


class InputError(UcgError, ValueError):
    """Malformed or invariant-violating input."""


class CapabilityError(UcgError):
    """The request is well formed but outside what the solver supports."""


class UnboundedError(UcgError):
    """An optimization direction is unbounded over the feasible region."""
