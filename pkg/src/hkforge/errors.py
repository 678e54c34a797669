"""Exception hierarchy shared by the library and the CLI."""


class HKError(Exception):
    """Base class for all hkforge errors."""


class ParseError(HKError, ValueError):
    """Malformed ideal, family or half-space input."""


class PreconditionError(HKError, ValueError):
    """An operation was called on inputs violating its contract.

    ``witness`` carries whatever concrete object demonstrates the violation
    (a generator, an exponent, an index), when there is one.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DimensionMismatch(PreconditionError):
    pass


class InclusionError(PreconditionError):
    pass


class InfiniteColengthError(PreconditionError):
    pass
