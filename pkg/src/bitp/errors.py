"""Exception hierarchy shared by all bitp modules."""


class BitpError(Exception):
    """Base class for all errors raised by this package."""


class LoadError(BitpError):
    """A table or JSON artifact could not be parsed or validated."""


class UndefinedMeasureError(BitpError):
    """A frequency or fractile was requested over an empty row set."""


class EvaluationError(BitpError):
    """A formula references observables or relations the data cannot support."""


class ContractError(BitpError):
    """A documented precondition of an operation was violated."""


class NoCandidateError(BitpError):
    """No bound predicate satisfied the mining constraints."""


class StagnationError(BitpError):
    """Internal signal: a mining round made no progress (reported, not raised to callers)."""


class PixelConflictError(BitpError):
    """A pixel received both an upper and a lower bound predicate."""


class GenerationError(BitpError):
    """A synthetic dataset specification cannot be realized."""
