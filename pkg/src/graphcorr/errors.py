"""Exception types shared across the package."""


class GraphCorrError(Exception):
    """Base class for all errors raised by graphcorr."""


class MalformedInputError(GraphCorrError, ValueError):
    """Input data does not describe a valid object (bad JSON, broken invariant)."""


class MismatchError(GraphCorrError, ValueError):
    """Operands live over different graphs, representations or levels."""


class VerificationError(GraphCorrError):
    """A construction failed its own numerical verification.

    This signals a bug in the implementation rather than bad input.
    """
