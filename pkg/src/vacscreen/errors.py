"""Shared exception types.

Every module raises subclasses of :class:`VacscreenError` so the CLI can
surface failures with a module-prefixed message and a nonzero exit code.
"""


class VacscreenError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(VacscreenError):
    """Invalid or missing configuration (empty rosters, bad grids, ...)."""


class SchemaError(VacscreenError):
    """A file does not conform to its documented format."""


class EmptyInputError(VacscreenError):
    """An operation received input it cannot meaningfully process."""


class CatalogError(ConfigError):
    """A term catalog failed to parse or compile."""


class DataError(VacscreenError):
    """Inconsistent data passed between pipeline stages (misaligned labels,
    uneven rater counts, duplicate ids, ...)."""


class MissingVectorError(VacscreenError):
    """A contextual-embedding lookup found no vector for a sentence id."""


class UndefinedMetricError(VacscreenError):
    """A metric is undefined for the given inputs (e.g. no positives)."""
