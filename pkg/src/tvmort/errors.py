"""Exception hierarchy shared by all tvmort modules."""


class TvmortError(Exception):
    """Base class for all library errors."""


class ParseError(TvmortError):
    """A data file row could not be parsed; carries the 1-based line number."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class StructureError(TvmortError):
    """File-level structure violated (column layout, year ordering)."""


class DataError(TvmortError):
    """Inconsistent observations (duplicate keys)."""


class DomainError(TvmortError):
    """An observation lies outside its admissible domain (negative rate)."""


class CompletenessError(TvmortError):
    """The age x year grid has holes the active policy does not repair."""

    def __init__(self, message, holes=()):
        super().__init__(message)
        self.holes = tuple(holes)


class ArgumentError(TvmortError, ValueError):
    """Invalid argument to a library operation."""


class DegenerateWindowError(TvmortError):
    """Kernel window contains too few positive weights for the factor count."""


class DegenerateDataError(TvmortError):
    """Input carries no usable signal (all-zero eigenvalue spectrum)."""


class RankError(TvmortError):
    """A normal-equation system is singular; carries the offending period."""

    def __init__(self, message, t=None):
        if t is not None:
            message = f"t={t}: {message}"
        super().__init__(message)
        self.t = t


class EstimationError(TvmortError):
    """Time-series estimation failed (non-convergence, rejected candidate,
    degenerate input)."""


class LocalWindowError(TvmortError):
    """Local-regression design is singular; the window width is too small."""


class McRunError(TvmortError):
    """Monte Carlo run aborted (too many failed replications)."""


class ConfigError(TvmortError):
    """Invalid run configuration (unknown key, unusable value)."""
