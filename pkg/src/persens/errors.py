"""Exception types shared across the package.

Every error raised on a validated boundary derives from :class:`PersensError`,
so callers (and the CLI) can catch one type and report cleanly.
"""


class PersensError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PersensError):
    """A value violates the invariants of its declared type."""


class EnsembleSizeError(PersensError):
    """An ensemble operation was attempted with fewer than two members."""


class DuplicateRecordError(PersensError):
    """Two detection records share the same (scenario, model, distance)."""


class EmptyTraceError(PersensError):
    """A trace was requested from an empty record stream."""


class FrameLookupError(PersensError):
    """A referenced distance does not correspond to any frame in the trace."""


class CoverageError(PersensError):
    """A trace does not cover the distance range required by the assessment."""


class ManifestError(PersensError):
    """A campaign manifest is structurally invalid."""


class GridMismatchError(PersensError):
    """Traces with different distance grids were mixed in one aggregation."""


class EmptyCellError(PersensError):
    """A heatmap cell has no supporting scenarios (non-factorial campaign)."""


class LogFormatError(PersensError):
    """A detection log file violates the log schema."""


class DocumentError(PersensError):
    """A structured document (campaign, safety, profiles...) is invalid."""
