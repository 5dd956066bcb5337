"""Quantitative analysis of handwritten glyph geometry and writing dynamics.

Glyphs are cubic B-spline segment collections; trajectories describe writing
order; segmentation cuts trajectories into primitive strokes at landmark
points; metrics quantify shape and movement per glyph and per script.
"""

from .errors import (
    CorpusFormatError,
    CurvatureUndefinedError,
    DegenerateGlyphError,
    GlyphometricsError,
    InvalidInputError,
    MetricUnavailableError,
    MetricUndefinedError,
    ReconstructionFailedError,
    ReferentialIntegrityError,
    UnsupportedVersionError,
)
from .geometry import Point, Rect, SplineSegment, fit_spline
from .glyph_model import (
    DIRECTION_CODES,
    DirectedPass,
    Glyph,
    LandmarkPoint,
    PenStroke,
    PrimitiveStroke,
    ScriptCorpus,
    Trajectory,
    normalize,
    validate,
    validate_trajectory,
)
from .segmentation import SegmentationConfig, SegmentationResult, segment
from .reconstruction import ReconstructionConfig, reconstruct, score_trajectory
from .metrics import MetricRecord, compute_all, distinctivity
from .script_analysis import BigramModel, ScriptMetrics, aggregate, build_bigram_model
from .corpus_io import CorpusDocument, load_corpus, save_corpus

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "GlyphometricsError",
    "InvalidInputError",
    "DegenerateGlyphError",
    "CurvatureUndefinedError",
    "MetricUndefinedError",
    "MetricUnavailableError",
    "ReconstructionFailedError",
    "UnsupportedVersionError",
    "CorpusFormatError",
    "ReferentialIntegrityError",
    "Point",
    "Rect",
    "SplineSegment",
    "fit_spline",
    "DIRECTION_CODES",
    "Glyph",
    "DirectedPass",
    "PenStroke",
    "Trajectory",
    "PrimitiveStroke",
    "LandmarkPoint",
    "ScriptCorpus",
    "validate",
    "validate_trajectory",
    "normalize",
    "SegmentationConfig",
    "SegmentationResult",
    "segment",
    "ReconstructionConfig",
    "reconstruct",
    "score_trajectory",
    "MetricRecord",
    "compute_all",
    "distinctivity",
    "ScriptMetrics",
    "BigramModel",
    "aggregate",
    "build_bigram_model",
    "CorpusDocument",
    "load_corpus",
    "save_corpus",
]
