"""Exception types shared across the package."""


class GlyphometricsError(Exception):
    """Base class for all domain errors."""


class InvalidInputError(GlyphometricsError, ValueError):
    pass


class DegenerateGlyphError(GlyphometricsError):
    """Raised when a glyph has no spatial extent (zero-diagonal bounding box)."""


class CurvatureUndefinedError(GlyphometricsError):
    """Raised at parameters where the first derivative vanishes (cusps)."""


class MetricUndefinedError(GlyphometricsError):
    """Raised when a metric's denominator or prerequisite degenerates."""


class MetricUnavailableError(GlyphometricsError):
    """Raised when a metric's required input (e.g. baseline) is absent."""


class ReconstructionFailedError(GlyphometricsError):
    """Raised when no viable traversal is found within search limits."""


class UnsupportedVersionError(GlyphometricsError):
    pass


class CorpusFormatError(GlyphometricsError):
    """Malformed corpus file; message carries element context."""


class ReferentialIntegrityError(CorpusFormatError):
    pass
