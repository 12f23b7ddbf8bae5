"""Exception and warning classes raised across the toolkit."""


class WFError(Exception):
    """Base class for all errors raised by :mod:`wfts`."""


class EmptySeries(WFError, ValueError):
    pass


class BadGrid(WFError, ValueError):
    pass


class ZeroPower(WFError, ValueError):
    pass


class LagOutOfRange(WFError, ValueError):
    pass


class PhaseLengthMismatch(WFError, ValueError):
    pass


class BadOrder(WFError, ValueError):
    pass


class EmptyFamily(WFError, ValueError):
    pass


class WeightMismatch(WFError, ValueError):
    pass


class AsymmetricSpectrum(WFError, ValueError):
    pass


class TooFewMembers(WFError, ValueError):
    pass


class BadK(WFError, ValueError):
    pass


class IndexOutOfRange(WFError, IndexError):
    pass


class GridMismatch(WFError, ValueError):
    pass


class SingleClass(WFError, ValueError):
    pass


class EmptyTraining(WFError, ValueError):
    pass


class FoldMismatch(WFError, ValueError):
    pass


class ParseError(WFError, ValueError):
    """Malformed dataset file; ``row`` and ``column`` are 1-based when known."""

    def __init__(self, message, row=None, column=None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.row = row
        self.column = column


class RaggedRows(ParseError):
    pass


class BadSpec(WFError, ValueError):
    pass


class WFDiagnostic(UserWarning):
    """Numerical diagnostic: the result is usable but an assumption was bent
    (clipped negative spectrum, non-monotone exp-map, degenerate PCA, ...)."""
