"""Exception hierarchy shared by every module."""


class MkinError(Exception):
    """Base class for all library errors."""


class ZeroVector(MkinError, ValueError):
    pass


class NonSmoothBoundary(MkinError, ValueError):
    """Raised when a tangent is requested at a vertex of a polygonal ball."""


class NonSmoothBall(MkinError, ValueError):
    pass


class DomainViolation(MkinError, ValueError):
    pass


class IrregularCurve(MkinError, ValueError):
    pass


class NoIntersection(MkinError, ValueError):
    pass


class BadParams(MkinError, ValueError):
    pass


class BadBall(MkinError, ValueError):
    pass


class NotStarlike(MkinError, ValueError):
    pass


class DegenerateDensity(MkinError, ValueError):
    pass


class MeasureMismatch(MkinError, ValueError):
    pass


class CenterPoint(MkinError, ValueError):
    pass


class NoCommonContact(MkinError, ValueError):
    pass


class TangentMismatch(MkinError, ValueError):
    pass


class PoleCoincidence(MkinError, ValueError):
    pass


class TranslativeMotion(MkinError, ValueError):
    pass


class NoRoot(MkinError, ValueError):
    pass


class OnInflectionCurve(MkinError, ValueError):
    pass


class ParseError(MkinError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(loc + message)


class UnknownKey(ParseError):
    pass


class UnresolvedName(ParseError):
    pass
