"""Exception and warning classes shared across the package."""


class GenIBError(Exception):
    """Base class for all errors raised by genib."""


class SimplexViolation(GenIBError, ValueError):
    """A vector that should be a probability distribution is not one.

    ``row`` is the offending row index (None for a flat vector) and
    ``deviation`` the distance of its total mass from one.
    """

    def __init__(self, message, row=None, deviation=None):
        super().__init__(message)
        self.row = row
        self.deviation = deviation


class AlphabetMismatch(GenIBError, ValueError):
    pass


class ZeroMarginalRow(GenIBError, ValueError):
    """Conditioning on a symbol that has zero marginal probability."""

    def __init__(self, message, rows=()):
        super().__init__(message)
        self.rows = tuple(rows)


class NumericYRequired(GenIBError, ValueError):
    pass


class UnsupportedActionSpace(GenIBError, TypeError):
    pass


class AlphaOutOfRange(GenIBError, ValueError):
    pass


class AllMassCollapsed(GenIBError, FloatingPointError):
    pass


class ParseError(GenIBError, ValueError):
    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + loc)
        self.line = line
        self.column = column


class ReproductionMismatch(GenIBError):
    def __init__(self, message, max_deviation=None):
        super().__init__(message)
        self.max_deviation = max_deviation


class NotConvergedWarning(UserWarning):
    pass


class GridTooCoarseWarning(UserWarning):
    pass
