"""Simulation and second-order theory of the weighted planar Mondrian tessellation."""

from .geometry import Orientation, Rect, Segment, lambda_rect, lambda_segment, rect_translation_overlap
from .sampler import (
    MaximalEdge,
    ResourceLimitError,
    SimParams,
    Tessellation,
    TessellationError,
    cells,
    restrict,
    sample,
    validate,
)

__version__ = "0.1.0"
