"""Two-dimensional direction-dependent structure functions of gridded fields.

Structure functions of orders 2-4 and per-lag skewness and flatness of the
increments, their polar views, and descriptors of convective rolls and swell
derived from them.
"""

from .analysis import Analysis, AnalysisConfig, analyze
from .errors import LagRangeError, NoEstimateError, ParameterError
from .features import (
    classify_asymmetry,
    detect_swell,
    estimate_roll_direction,
    estimate_roll_size,
    summarize_flatness,
)
from .grid import Field2D, Lag, MomentSet, increment_moments, lowpass
from .polarview import PolarMap, Transect, to_polar, transect
from .statmaps import (
    LagGridSpec,
    StatMapSet,
    compute_statmaps,
    fft_cross_moments,
    skew_flat_from_raw,
)
from .synth import GaussianNoise, Rolls, Swell, SynthSpec, generate, oracle_statmaps

__version__ = "0.1.0"

__all__ = [
    "Analysis",
    "AnalysisConfig",
    "analyze",
    "LagRangeError",
    "NoEstimateError",
    "ParameterError",
    "classify_asymmetry",
    "detect_swell",
    "estimate_roll_direction",
    "estimate_roll_size",
    "summarize_flatness",
    "Field2D",
    "Lag",
    "MomentSet",
    "increment_moments",
    "lowpass",
    "PolarMap",
    "Transect",
    "to_polar",
    "transect",
    "LagGridSpec",
    "StatMapSet",
    "compute_statmaps",
    "fft_cross_moments",
    "skew_flat_from_raw",
    "GaussianNoise",
    "Rolls",
    "Swell",
    "SynthSpec",
    "generate",
    "oracle_statmaps",
]
