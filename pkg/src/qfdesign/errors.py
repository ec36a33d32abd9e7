"""Exception hierarchy shared by the library and the command line tool."""


class DesignError(Exception):
    """Base class for every error raised by qfdesign."""


class InvalidLevelCount(DesignError, ValueError):
    pass


class ShapeError(DesignError, ValueError):
    pass


class InvalidProjection(DesignError, ValueError):
    pass


class EmptyDesign(DesignError, ValueError):
    pass


class InconsistentCoefficients(DesignError, ValueError):
    pass


class InvalidSize(DesignError, ValueError):
    pass


class ValidationError(DesignError, ValueError):
    """Input is well formed but violates a bound (level range, index range)."""


class ParseError(DesignError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
