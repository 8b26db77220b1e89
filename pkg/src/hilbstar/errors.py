"""Exception types shared across the toolkit.

Every exception carries a human-readable message; the numeric ops attach the
offending residual or shape so failures are diagnosable from the message alone.
"""


class HilbstarError(Exception):
    """Base class for all toolkit errors."""


class ShapeMismatch(HilbstarError):
    pass


class FieldMismatch(HilbstarError):
    pass


class PreconditionViolated(HilbstarError):
    pass


class ConvergenceFailure(HilbstarError):
    pass


class NotPositive(HilbstarError):
    pass


class NotHermitian(PreconditionViolated):
    pass


class NotMonotone(HilbstarError):
    pass


class NoBound(HilbstarError):
    pass


class GramMismatch(HilbstarError):
    pass


class NotContraction(HilbstarError):
    pass


class NotOrthogonal(HilbstarError):
    pass


class NoTailCertificate(HilbstarError):
    pass


class NotL2Span(HilbstarError):
    pass


class NotOrthogonalCospan(HilbstarError):
    pass


class NotIsometric(HilbstarError):
    pass


class NotComposable(HilbstarError):
    pass


class NotCone(HilbstarError):
    pass


class NotCocone(HilbstarError):
    pass


class InvarianceViolation(HilbstarError):
    pass


class UnknownSuite(HilbstarError):
    pass
