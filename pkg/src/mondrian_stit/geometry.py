"""Axis-aligned primitives and the line measure of the weighted Mondrian.

The driving measure puts mass ``p`` on horizontal lines and ``1 - p`` on
vertical lines (both with Lebesgue measure on the offset).  For a rectangle
this gives ``p * height + (1 - p) * width``; a horizontal segment is hit only
by vertical lines, so its measure is ``(1 - p) * length``, and a vertical
segment gets ``p * length``.
"""

from dataclasses import dataclass
from enum import Enum
import math


class Orientation(str, Enum):
    H = "H"  # parallel to e1; fixed coordinate is y
    V = "V"  # parallel to e2; fixed coordinate is x

    def perpendicular(self) -> "Orientation":
        return Orientation.V if self is Orientation.H else Orientation.H


def check_weight(p: float) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"weight p must lie in (0, 1), got {p}")
    return p


@dataclass(frozen=True)
class Rect:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        for name in ("x_min", "x_max", "y_min", "y_max"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(
                f"degenerate rectangle [{self.x_min}, {self.x_max}] x [{self.y_min}, {self.y_max}]"
            )

    @classmethod
    def centered(cls, a: float, b: float) -> "Rect":
        """The window ``[-a, a] x [-b, b]``."""
        return cls(-a, a, -b, b)

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    def as_list(self) -> list:
        return [self.x_min, self.x_max, self.y_min, self.y_max]

    def contains_rect(self, other: "Rect") -> bool:
        return (
            self.x_min <= other.x_min
            and other.x_max <= self.x_max
            and self.y_min <= other.y_min
            and other.y_max <= self.y_max
        )

    def contains_point(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def interior_contains(self, x: float, y: float) -> bool:
        return self.x_min < x < self.x_max and self.y_min < y < self.y_max

    def extent(self, orientation: Orientation) -> tuple:
        """Span of a segment with this orientation crossing the rectangle."""
        if orientation is Orientation.H:
            return self.x_min, self.x_max
        return self.y_min, self.y_max


@dataclass(frozen=True)
class Segment:
    orientation: Orientation
    fixed: float
    lo: float
    hi: float

    def __post_init__(self):
        if not isinstance(self.orientation, Orientation):
            object.__setattr__(self, "orientation", Orientation(self.orientation))
        if not self.lo < self.hi:
            raise ValueError(f"segment needs lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def endpoints(self) -> tuple:
        if self.orientation is Orientation.H:
            return (self.lo, self.fixed), (self.hi, self.fixed)
        return (self.fixed, self.lo), (self.fixed, self.hi)

    def distance_to(self, x: float, y: float) -> float:
        """Euclidean distance from a point to the closed segment."""
        if self.orientation is Orientation.H:
            along, across = x, y
        else:
            along, across = y, x
        d_along = max(self.lo - along, 0.0, along - self.hi)
        return math.hypot(d_along, across - self.fixed)


def lambda_rect(w: Rect, p: float) -> float:
    """Measure of the set of lines hitting ``w``."""
    p = check_weight(p)
    return p * w.height + (1.0 - p) * w.width


def lambda_segment(s: Segment, p: float) -> float:
    """Measure of the set of lines hitting ``s``."""
    p = check_weight(p)
    if s.orientation is Orientation.H:
        return (1.0 - p) * s.length
    return p * s.length


def rect_translation_overlap(w: Rect, dx: float, dy: float) -> float:
    """Area of ``w`` intersected with its translate by ``(-dx, -dy)``."""
    return max(0.0, w.width - abs(dx)) * max(0.0, w.height - abs(dy))
