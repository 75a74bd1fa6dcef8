"""Observables of a tessellation: edge counts, weighted length, vertices, skeleton."""

from collections import defaultdict
from dataclasses import dataclass
import math
from typing import NamedTuple

import numpy as np

from .geometry import Orientation, lambda_segment
from .sampler import Tessellation, TessellationError


@dataclass(frozen=True)
class Vertex:
    x: float
    y: float
    host_birth: float
    guest_birth: float


@dataclass(frozen=True)
class SkeletonPoint:
    x: float
    y: float
    mass: float


class Skeleton(NamedTuple):
    """Point masses standing in for the length measure of a set of segments."""

    x: np.ndarray
    y: np.ndarray
    mass: np.ndarray
    horizontal: np.ndarray

    @property
    def points(self):
        """The ``(x, y, mass)`` triple used by the pair-sum kernels."""
        return self.x, self.y, self.mass


def sigma_one(tess: Tessellation) -> int:
    """Number of maximal edges."""
    return len(tess.edges)


def sigma_lambda(tess: Tessellation, p: float = None) -> float:
    """Total edge length weighted by the line measure of each edge.

    Horizontal edges carry ``1 - p`` per unit length, vertical edges ``p``.
    ``p`` defaults to the tessellation's own weight.
    """
    if p is None:
        p = tess.params.p
    return math.fsum(lambda_segment(e.seg, p) for e in tess.edges)


def sigma_lambda_swapped(tess: Tessellation) -> float:
    """Weighted length with the weights exchanged (``p`` on horizontal edges).

    This is the reading where edges parallel to e1 get factor ``p``; kept to
    show that it does not reproduce the first and second moments.
    """
    return sigma_lambda(tess, 1.0 - tess.params.p)


def total_length(tess: Tessellation) -> float:
    return math.fsum(e.seg.length for e in tess.edges)


def _host_index(tess: Tessellation):
    index = {Orientation.H: defaultdict(list), Orientation.V: defaultdict(list)}
    for e in tess.edges:
        index[e.seg.orientation][e.seg.fixed].append(e)
    return index


def _find_host(index, tess, guest, x, y, tol):
    # A guest endpoint on a horizontal host has y equal to the host's fixed
    # coordinate and vice versa.  The sampler copies that coordinate, so exact
    # lookup succeeds; the tolerant scan is for edge lists read from disk.
    host_o = guest.seg.orientation.perpendicular()
    key, along = (y, x) if host_o is Orientation.H else (x, y)
    for h in index[host_o].get(key, ()):
        if h.birth < guest.birth and h.seg.lo <= along <= h.seg.hi:
            return h
    if tol > 0.0:
        for h in tess.edges:
            if (
                h.seg.orientation is host_o
                and h.birth < guest.birth
                and abs(h.seg.fixed - key) <= tol
                and h.seg.lo - tol <= along <= h.seg.hi + tol
            ):
                return h
    return None


def vertices(tess: Tessellation, tol: float = 0.0) -> list:
    """T-junctions: edge endpoints in the window interior, with their host edge.

    Raises
    ------
    TessellationError
        If an interior endpoint has no older perpendicular edge through it.
    """
    w = tess.window
    index = _host_index(tess)
    out = []
    for e in tess.edges:
        for x, y in e.seg.endpoints():
            if not w.interior_contains(x, y):
                continue
            host = _find_host(index, tess, e, x, y, tol)
            if host is None:
                raise TessellationError(f"endpoint ({x}, {y}) of {e} has no host edge")
            out.append(Vertex(x, y, host.birth, e.birth))
    return out


def vertex_array(tess: Tessellation) -> np.ndarray:
    """Vertex coordinates as an ``(n, 2)`` array, without the host lookup."""
    w = tess.window
    pts = []
    for e in tess.edges:
        for x, y in e.seg.endpoints():
            if w.interior_contains(x, y):
                pts.append((x, y))
    return np.array(pts, dtype=float).reshape(-1, 2)


def segment_skeleton(is_h, fixed, lo, hi, delta: float, rng=None) -> Skeleton:
    """Skeleton points of axis-parallel segments given as parallel arrays.

    Each segment of length ``L`` is cut into ``ceil(L / delta)`` equal pieces,
    each represented by one point carrying the piece length.  Without ``rng``
    the point is the piece midpoint.  With ``rng`` it is uniform on the piece
    (stratified jitter), which makes pair sums between distinct pieces
    unbiased for the continuous length measure; midpoints of parallel edges
    ending on a common host line up and bias pair counts at zero offset.
    """
    if not delta > 0.0:
        raise ValueError(f"delta must be positive, got {delta}")
    is_h = np.asarray(is_h, dtype=bool)
    fixed = np.asarray(fixed, dtype=float)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    length = hi - lo
    n = np.maximum(1, np.ceil(length / delta)).astype(np.intp)
    owner = np.repeat(np.arange(len(n)), n)
    first = np.cumsum(n) - n
    k = np.arange(owner.size) - first[owner]
    piece = length[owner] / n[owner]
    offset = 0.5 if rng is None else rng.random(owner.size)
    along = lo[owner] + (k + offset) * piece
    across = fixed[owner]
    h = is_h[owner]
    x = np.where(h, along, across)
    y = np.where(h, across, along)
    return Skeleton(x, y, piece, h)


def within_piece_sum(skel: Skeleton, ux, uy, area: float) -> np.ndarray:
    """Pair mass inside single skeleton pieces, for each rectangle ``[0, ux] x [0, uy]``.

    A point skeleton drops the pairs whose two ends fall in the same piece.
    For a piece of length ``m`` along a direction with rectangle extent ``u``
    their ordered-pair measure is ``m u - u^2/2`` when ``m >= u`` and ``m^2/2``
    otherwise; the translation weight is taken at zero offset, ``1/area``.
    """
    m = np.asarray(skel.mass, dtype=float)[:, None]
    u = np.where(np.asarray(skel.horizontal)[:, None], np.asarray(ux)[None, :], np.asarray(uy)[None, :])
    inside = np.where(m >= u, m * u - 0.5 * u * u, 0.5 * m * m)
    return inside.sum(axis=0) / area


def skeleton_arrays(tess: Tessellation, delta: float, rng=None) -> Skeleton:
    """Skeleton of every edge from pieces of length at most ``delta``.

    The masses of one edge sum to its length; see :func:`segment_skeleton`.
    """
    is_h, fixed, lo, hi, _ = tess.arrays()
    return segment_skeleton(is_h, fixed, lo, hi, delta, rng)


def skeleton_points(tess: Tessellation, delta: float) -> list:
    x, y, m = skeleton_arrays(tess, delta).points
    return [SkeletonPoint(float(a), float(b), float(c)) for a, b, c in zip(x, y, m)]
