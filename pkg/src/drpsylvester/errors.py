"""Exception hierarchy shared by all modules."""


class DRPError(Exception):
    """Base class for every error raised by this package."""


class SizingError(DRPError, ValueError):
    """Grid sizes, counts or speeds outside their admissible range."""


class UnknownSchemeError(DRPError, KeyError):
    """A preset scheme name that is not registered."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown scheme"


class DimensionError(DRPError, ValueError):
    """Matrix or vector shapes that do not fit together."""


class SingularSystemError(DRPError, ArithmeticError):
    """Normal equations (or a KKT system) that cannot be solved uniquely."""


class RankError(DRPError, ArithmeticError):
    """A retained singular value is zero where an inverse is required."""


class InfeasibleError(DRPError, ArithmeticError):
    """A linear constraint with zero multipliers and nonzero right-hand side."""


class NotExplicitError(DRPError, ValueError):
    """The scheme cannot be solved for the new time level (alpha == 0)."""


class MissingLevelError(DRPError, ValueError):
    """A three-level scheme was stepped with a single prior level."""


class InstabilityError(DRPError, FloatingPointError):
    """The solution blew up during time stepping.

    ``step`` is the time level at which the blow-up was detected and
    ``partial`` holds whatever diagnostics were collected before it.
    """

    def __init__(self, message, step, partial=None):
        super().__init__(message)
        self.step = step
        self.partial = partial


class ConfigError(DRPError, ValueError):
    """Invalid run configuration (parse failure or precondition violation)."""

    def __init__(self, message, field=None, line=None):
        super().__init__(message)
        self.field = field
        self.line = line
