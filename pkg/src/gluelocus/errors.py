"""Exception hierarchy shared by every module."""


class GeometryError(Exception):
    """Base class for all errors raised by gluelocus."""


class DivisionByZeroJet(GeometryError, ZeroDivisionError):
    pass


class DomainError(GeometryError, ValueError):
    pass


class NotDeflatable(GeometryError):
    pass


class ParseError(GeometryError):
    """Raised by the expression parser.

    ``offset`` is the byte offset of the offending token and ``expected``
    the set of token kinds that would have been accepted there.
    """

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(detail)


class ArityError(GeometryError):
    pass


class DegenerateNormal(GeometryError):
    pass


class FrameInvalid(GeometryError):
    def __init__(self, message, t=None, invariant=None):
        self.t = t
        self.invariant = invariant
        super().__init__(message)


class SingularCurvePoint(GeometryError):
    pass


class AssumptionViolated(GeometryError):
    def __init__(self, message, t=None, which=None):
        self.t = t
        self.which = which
        super().__init__(message)


class CylindricalAt(GeometryError):
    def __init__(self, t):
        self.t = t
        super().__init__(f"ruled surface is cylindrical (beta = 0) at t={t!r}")


class SingularPoint(GeometryError):
    pass


class PreconditionFailed(GeometryError):
    pass


class GluingMismatch(GeometryError):
    def __init__(self, deviation, t):
        self.deviation = deviation
        self.t = t
        super().__init__(
            f"surfaces do not share the gluing locus: deviation {deviation:.3e} at t={t!r}"
        )


class NotApplicable(GeometryError):
    pass


class ConfigError(GeometryError):
    pass
