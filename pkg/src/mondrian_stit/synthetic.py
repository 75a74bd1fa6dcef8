"""Reference processes with known K-functions, for checking the estimators.

* Poisson points: every K-function equals ``area(R_{r,p}) = p (1-p) r^2``.
* Poisson points with i.i.d. masses (an independently marked CSR measure):
  the mass-weighted K-function is also ``p (1-p) r^2``.
* Poisson points against an independent Poisson segment process: the cross
  K-function is also ``p (1-p) r^2``.
* Rectangular Poisson lines with intensity measure ``t Lambda_p``: horizontal
  lines at rate ``t p`` per unit height, vertical ones at rate ``t (1-p)`` per
  unit width.  Slivnyak's theorem gives

      K_E(r)  = p(1-p) r^2 + 2 p (1-p) r / t
      K_V(r)  = p(1-p) r^2 + (p^2 + (1-p)^2) r / (t p (1-p))
      K_VE(r) = p(1-p) r^2 + r / t
"""

import numpy as np

from .estimation import build_k_report, measure_points, rect_extents
from .functionals import segment_skeleton
from .geometry import Rect
from .rng import derive_seed, make_generator


def poisson_points(window: Rect, intensity: float, rng):
    n = rng.poisson(intensity * window.area)
    x = window.x_min + window.width * rng.random(n)
    y = window.y_min + window.height * rng.random(n)
    return x, y, np.ones(n)


def poisson_segments(window: Rect, intensity: float, length: float, p: float, rng):
    """Stationary axis-parallel segments of fixed length, clipped to the window.

    Centres form a Poisson process of the given intensity on the window
    dilated by ``length / 2`` (so segments entering from outside are kept);
    each segment is horizontal with probability ``p``.  Returns
    ``(is_h, fixed, lo, hi)`` for the segments that meet the window.
    """
    h = length / 2.0
    big = Rect(window.x_min - h, window.x_max + h, window.y_min - h, window.y_max + h)
    n = rng.poisson(intensity * big.area)
    cx = big.x_min + big.width * rng.random(n)
    cy = big.y_min + big.height * rng.random(n)
    is_h = rng.random(n) < p
    fixed = np.where(is_h, cy, cx)
    centre = np.where(is_h, cx, cy)
    f_lo = np.where(is_h, window.y_min, window.x_min)
    f_hi = np.where(is_h, window.y_max, window.x_max)
    lo = np.maximum(centre - h, np.where(is_h, window.x_min, window.y_min))
    hi = np.minimum(centre + h, np.where(is_h, window.x_max, window.y_max))
    keep = (fixed > f_lo) & (fixed < f_hi) & (lo < hi)
    return is_h[keep], fixed[keep], lo[keep], hi[keep]


def poisson_lines(window: Rect, p: float, t: float, rng):
    """Rectangular Poisson line process: chords ``(is_h, fixed, lo, hi)`` and crossings."""
    nh = rng.poisson(t * p * window.height)
    nv = rng.poisson(t * (1.0 - p) * window.width)
    ys = window.y_min + window.height * rng.random(nh)
    xs = window.x_min + window.width * rng.random(nv)
    is_h = np.concatenate([np.ones(nh, bool), np.zeros(nv, bool)])
    fixed = np.concatenate([ys, xs])
    lo = np.concatenate([np.full(nh, window.x_min), np.full(nv, window.y_min)])
    hi = np.concatenate([np.full(nh, window.x_max), np.full(nv, window.y_max)])
    vx, vy = np.meshgrid(xs, ys)
    return (is_h, fixed, lo, hi), (vx.ravel(), vy.ravel(), np.ones(vx.size))


def poisson_lines_k_theory(kind: str, p: float, t: float, r):
    r = np.asarray(r, dtype=float)
    pq = p * (1.0 - p)
    base = pq * r * r
    if kind == "edge":
        return base + 2.0 * pq * r / t
    if kind == "vertex":
        return base + (p * p + (1.0 - p) ** 2) * r / (t * pq)
    if kind == "cross":
        return base + r / t
    raise ValueError(f"unknown kind {kind!r}")


def _run(kind, window, p, r_grid, n, master_seed, draw, theory, backend=None):
    rows = []
    for i in range(n):
        rng = make_generator(derive_seed(master_seed, i))
        vertices, skeleton = draw(rng)
        rows.append(measure_points(kind, window, p, r_grid, vertices, skeleton, backend))
    return build_k_report(kind, p, float("nan"), r_grid, rows, theory)


def csr_k(kind: str, window: Rect, p: float, intensity: float, r_grid, n: int,
          master_seed: int = 0, delta: float = 0.05, backend=None):
    """K-function estimate on independent processes whose K-function is ``p (1-p) r^2``.

    ``vertex`` uses Poisson points; ``edge`` uses Poisson points carrying
    i.i.d. exponential masses in place of a skeleton; ``cross`` pairs Poisson
    points with the skeleton of independent Poisson segments.
    """
    seg_len = 0.5

    def draw(rng):
        v = poisson_points(window, intensity, rng)
        sk = None
        if kind == "edge":
            x, y, _ = poisson_points(window, intensity, rng)
            v, sk = None, (x, y, rng.exponential(delta, len(x)))
        elif kind == "cross":
            sk = segment_skeleton(*poisson_segments(window, intensity, seg_len, p, rng), delta, rng)
        return v, sk

    ux, uy = rect_extents(p, r_grid)
    theory = ux * uy
    return _run(kind, window, p, r_grid, n, master_seed, draw, theory, backend)


def poisson_lines_k(kind: str, window: Rect, p: float, t: float, r_grid, n: int,
                    master_seed: int = 0, delta: float = 0.02, backend=None):
    """K-function estimate for rectangular Poisson lines, with the Slivnyak theory attached."""
    def draw(rng):
        segs, verts = poisson_lines(window, p, t, rng)
        return verts, segment_skeleton(*segs, delta, rng)

    theory = poisson_lines_k_theory(kind, p, t, r_grid)
    return _run(kind, window, p, r_grid, n, master_seed, draw, theory, backend)
