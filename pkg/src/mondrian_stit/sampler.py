"""Exact simulation of the weighted Mondrian tessellation of a rectangle.

Each live cell ``c`` gets an exponential lifetime with rate
``lambda_rect(c, p)``.  If the cell dies before the time threshold it is cut
by a line drawn from the line measure restricted to the lines hitting it:
horizontal with probability ``p * height / lambda_rect``, at a uniform
position across the cell.  Both halves continue from the split time.
"""

from collections import deque
from dataclasses import dataclass, field
import math

import numpy as np

from .geometry import Orientation, Rect, Segment, check_weight
from .rng import UniformStream, check_seed, make_generator

DEFAULT_CELL_CAP = 10_000_000


class ResourceLimitError(RuntimeError):
    """Raised when a simulation would exceed its cell budget."""


class TessellationError(ValueError):
    """Raised when an edge list violates the tessellation invariants."""


@dataclass(frozen=True)
class SimParams:
    p: float
    t: float
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "p", check_weight(self.p))
        t = float(self.t)
        if not (t > 0.0 and math.isfinite(t)):
            raise ValueError(f"time threshold t must be positive and finite, got {self.t}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "seed", check_seed(self.seed))


@dataclass(frozen=True)
class MaximalEdge:
    seg: Segment
    birth: float

    @property
    def orientation(self) -> Orientation:
        return self.seg.orientation


@dataclass(frozen=True)
class Tessellation:
    window: Rect
    params: SimParams
    edges: tuple = field(default_factory=tuple)

    def __post_init__(self):
        edges = tuple(self.edges)
        object.__setattr__(self, "edges", edges)
        for prev, cur in zip(edges, edges[1:]):
            if not prev.birth < cur.birth:
                raise TessellationError(
                    f"birth times must be strictly increasing, got {prev.birth} then {cur.birth}"
                )
        for e in edges:
            if not 0.0 < e.birth <= self.params.t:
                raise TessellationError(f"birth time {e.birth} outside (0, {self.params.t}]")

    def __len__(self):
        return len(self.edges)

    def arrays(self):
        """Edge list as parallel arrays ``(is_h, fixed, lo, hi, birth)``."""
        n = len(self.edges)
        is_h = np.empty(n, dtype=bool)
        fixed = np.empty(n)
        lo = np.empty(n)
        hi = np.empty(n)
        birth = np.empty(n)
        for i, e in enumerate(self.edges):
            is_h[i] = e.seg.orientation is Orientation.H
            fixed[i] = e.seg.fixed
            lo[i] = e.seg.lo
            hi[i] = e.seg.hi
            birth[i] = e.birth
        return is_h, fixed, lo, hi, birth


def sample(window: Rect, params: SimParams, cell_cap: int = DEFAULT_CELL_CAP) -> Tessellation:
    """Draw one tessellation of ``window`` up to time ``params.t``.

    Cells are processed first-in first-out, which fixes the order in which the
    random stream is consumed: three uniforms per split (lifetime,
    orientation, position) and one per cell that survives past ``t``.

    Raises
    ------
    ResourceLimitError
        If the number of cells would exceed ``cell_cap``.
    """
    p, t = params.p, params.t
    q = 1.0 - p
    stream = UniformStream(make_generator(params.seed))
    queue = deque([(window.x_min, window.x_max, window.y_min, window.y_max, 0.0)])
    n_cells = 1
    raw = []
    while queue:
        x0, x1, y0, y1, born = queue.popleft()
        w = x1 - x0
        h = y1 - y0
        rate = p * h + q * w
        split = born - math.log(stream.next_open_closed()) / rate
        if split > t:
            continue
        n_cells += 1
        if n_cells > cell_cap:
            raise ResourceLimitError(
                f"tessellation exceeds the cap of {cell_cap} cells (p={p}, t={t}, window={window})"
            )
        if stream.next() * rate < p * h:
            y = y0 + h * stream.next()
            raw.append((split, Orientation.H, y, x0, x1))
            queue.append((x0, x1, y0, y, split))
            queue.append((x0, x1, y, y1, split))
        else:
            x = x0 + w * stream.next()
            raw.append((split, Orientation.V, x, y0, y1))
            queue.append((x0, x, y0, y1, split))
            queue.append((x, x1, y0, y1, split))
    raw.sort(key=lambda r: r[0])
    edges = tuple(MaximalEdge(Segment(o, c, lo, hi), s) for s, o, c, lo, hi in raw)
    return Tessellation(window, params, edges)


def restrict(tess: Tessellation, sub: Rect) -> Tessellation:
    """Clip a tessellation to a sub-window, keeping birth times.

    Edges lying on the boundary of ``sub`` or meeting it in a single point are
    dropped.
    """
    if not tess.window.contains_rect(sub):
        raise ValueError(f"{sub} is not contained in the window {tess.window}")
    kept = []
    for e in tess.edges:
        s = e.seg
        if s.orientation is Orientation.H:
            f_lo, f_hi = sub.y_min, sub.y_max
            a, b = sub.x_min, sub.x_max
        else:
            f_lo, f_hi = sub.x_min, sub.x_max
            a, b = sub.y_min, sub.y_max
        if not f_lo < s.fixed < f_hi:
            continue
        lo = max(s.lo, a)
        hi = min(s.hi, b)
        if lo < hi:
            kept.append(MaximalEdge(Segment(s.orientation, s.fixed, lo, hi), e.birth))
    return Tessellation(sub, tess.params, tuple(kept))


def _find_cell(cells, seg: Segment, tol: float):
    # The cell that a new edge cuts: its extent along the edge matches the
    # edge span and the fixed coordinate lies strictly inside it.
    for i, c in enumerate(cells):
        if seg.orientation is Orientation.H:
            span = (c.x_min, c.x_max)
            across = (c.y_min, c.y_max)
        else:
            span = (c.y_min, c.y_max)
            across = (c.x_min, c.x_max)
        if (
            abs(span[0] - seg.lo) <= tol
            and abs(span[1] - seg.hi) <= tol
            and across[0] < seg.fixed < across[1]
        ):
            return i
    return None


def cells(tess: Tessellation, tol: float = 0.0) -> list:
    """Cells of the tessellation, obtained by replaying the splits in birth order."""
    out = [tess.window]
    for e in tess.edges:
        i = _find_cell(out, e.seg, tol)
        if i is None:
            raise TessellationError(f"edge {e} does not span a single cell at its birth")
        c = out[i]
        s = e.seg
        if s.orientation is Orientation.H:
            out[i] = Rect(c.x_min, c.x_max, c.y_min, s.fixed)
            out.append(Rect(c.x_min, c.x_max, s.fixed, c.y_max))
        else:
            out[i] = Rect(c.x_min, s.fixed, c.y_min, c.y_max)
            out.append(Rect(s.fixed, c.x_max, c.y_min, c.y_max))
    return out


def validate(tess: Tessellation, tol: float = 1e-9) -> None:
    """Check the structural invariants of an edge list (e.g. after loading one).

    Raises
    ------
    TessellationError
        On the first violated invariant.
    """
    w = tess.window
    for e in tess.edges:
        s = e.seg
        for x, y in s.endpoints():
            if not (w.x_min - tol <= x <= w.x_max + tol and w.y_min - tol <= y <= w.y_max + tol):
                raise TessellationError(f"edge {e} leaves the window")
    cells(tess, tol=tol)
