"""Exception types raised by skelfac."""


class SkelfacError(Exception):
    """Base class for all library errors."""


class GridSizeError(SkelfacError):
    """The grid-sizing heuristic hit its per-dimension node limit."""


class SingularMatrixError(SkelfacError):
    """A square matrix is singular (or singular to working precision).

    ``index`` is the elimination step at which the zero pivot appeared,
    or ``None`` when singularity was detected by a conditioning check.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class EmptySelectionError(SkelfacError):
    """Pivot selection found nothing to select (numerically zero matrix)."""


class DenseGuardError(SkelfacError):
    """A dense computation would exceed the configured size guard."""
