"""Monte Carlo estimation of moments and anisotropic K-functions.

K-functions use ordered pairs and the anchored rectangle
``R_{r,p} = [0, (1-p) r] x [0, p r]`` with translation edge correction: a
pair at offset ``h`` is weighted by ``1 / area(W intersect (W + h))``.  Per
replicate this gives an unbiased estimate ``S(r)`` of ``lambda_a lambda_b K(r)``;
replicates are pooled as ``mean(S) / (mean(lambda_a) mean(lambda_b))``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import logging
import math
import os

import numpy as np

from . import kernels
from .functionals import (
    Skeleton,
    segment_skeleton,
    sigma_lambda,
    sigma_lambda_swapped,
    sigma_one,
    vertex_array,
    within_piece_sum,
)
from .geometry import Rect
from .rng import BOOTSTRAP_STREAM, SKELETON_STREAM, check_seed, derive_seed, make_generator
from .sampler import SimParams, sample
from .theory.formulas import ModelParams, PcfCurve, k_from_pcf, moments_rect, vertex_intensity

log = logging.getLogger(__name__)

K_KINDS = ("vertex", "edge", "cross")
MOMENT_STATS = ("mean_sigma_lambda", "mean_sigma_one", "var_sigma_lambda", "var_sigma_one", "cov")
DEFAULT_BOOTSTRAP = 1000
POOLING = "ratio of means: mean(S_i) / (mean(lambda_a_i) * mean(lambda_b_i)); SE by delta method"


@dataclass(frozen=True)
class McConfig:
    window: Rect
    params: SimParams
    n_replicates: int
    r_grid: tuple = (0.5, 1.0, 2.0)
    delta: float = None
    master_seed: int = 0
    n_bootstrap: int = DEFAULT_BOOTSTRAP
    threads: int = None

    def __post_init__(self):
        if int(self.n_replicates) != self.n_replicates or self.n_replicates < 2:
            raise ValueError(f"n_replicates must be an integer >= 2, got {self.n_replicates}")
        object.__setattr__(self, "n_replicates", int(self.n_replicates))
        grid = tuple(float(r) for r in self.r_grid)
        if not grid or any(not (r > 0 and math.isfinite(r)) for r in grid):
            raise ValueError(f"r_grid must be non-empty and positive, got {self.r_grid}")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError(f"r_grid must be strictly increasing, got {self.r_grid}")
        object.__setattr__(self, "r_grid", grid)
        p = self.params.p
        reach = grid[-1] * max(p, 1.0 - p)
        if not reach < min(self.window.width, self.window.height):
            raise ValueError(
                f"largest rectangle extent {reach} must be below the window extent "
                f"{min(self.window.width, self.window.height)} for the edge correction"
            )
        if self.delta is None:
            object.__setattr__(self, "delta", default_delta(p, grid))
        elif not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        object.__setattr__(self, "master_seed", check_seed(self.master_seed))
        if self.n_bootstrap < 2:
            raise ValueError(f"n_bootstrap must be >= 2, got {self.n_bootstrap}")
        if self.threads is not None and self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")

    @property
    def model(self) -> ModelParams:
        return ModelParams(self.params.p, self.params.t)

    def replicate_params(self, i: int) -> SimParams:
        return SimParams(self.params.p, self.params.t, derive_seed(self.master_seed, i))


def default_delta(p: float, r_grid) -> float:
    return min(p, 1.0 - p) * min(r_grid) / 10.0


@dataclass
class MomentReport:
    """Sample moments against their closed forms.

    ``z_printed`` compares the same estimates with the printed variance
    formulas; ``swapped_*`` repeats the Sigma_Lambda statistics with the
    direction weights exchanged (``p`` on horizontal edges).
    """

    n: int
    estimate: dict
    se: dict
    theory: dict
    z: dict
    theory_printed: dict = field(default_factory=dict)
    z_printed: dict = field(default_factory=dict)
    swapped_estimate: dict = field(default_factory=dict)
    swapped_z: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "estimate": self.estimate,
            "se": self.se,
            "theory": self.theory,
            "z": self.z,
            "theory_printed": self.theory_printed,
            "z_printed": self.z_printed,
            "swapped_estimate": self.swapped_estimate,
            "swapped_z": self.swapped_z,
        }


@dataclass
class KReport:
    kind: str
    p: float
    t: float
    r_grid: np.ndarray
    k: np.ndarray
    se: np.ndarray
    theory: np.ndarray
    z: np.ndarray
    k_replicates: np.ndarray
    influence: np.ndarray
    k_theory_intensity: np.ndarray
    intensity_a: float
    intensity_b: float
    degenerate: list
    pooling: str = POOLING

    @property
    def spread(self) -> np.ndarray:
        """Standard deviation of the per-replicate estimates."""
        return self.k_replicates.std(axis=0, ddof=1)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "p": self.p,
            "t": self.t,
            "r_grid": self.r_grid.tolist(),
            "k": self.k.tolist(),
            "se": self.se.tolist(),
            "theory": self.theory.tolist(),
            "z": self.z.tolist(),
            "spread": self.spread.tolist(),
            "k_theory_intensity": self.k_theory_intensity.tolist(),
            "intensity_a": self.intensity_a,
            "intensity_b": self.intensity_b,
            "degenerate": list(self.degenerate),
            "pooling": self.pooling,
        }


# --- parallel map ------------------------------------------------------------

def _n_workers(cfg_threads):
    if cfg_threads is not None:
        return cfg_threads
    env = os.environ.get("MONDRIAN_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def map_replicates(fn, n: int, threads: int = None) -> list:
    """``[fn(0), ..., fn(n-1)]``, evaluated on a thread pool, in index order."""
    workers = min(_n_workers(threads), n)
    if workers <= 1:
        return [fn(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n)))


# --- moments -----------------------------------------------------------------

def _moment_stats(s1, sl):
    n = s1.shape[-1]
    m1 = s1.mean(axis=-1)
    ml = sl.mean(axis=-1)
    d1 = s1 - m1[..., None]
    dl = sl - ml[..., None]
    return {
        "mean_sigma_lambda": ml,
        "mean_sigma_one": m1,
        "var_sigma_lambda": (dl * dl).sum(axis=-1) / (n - 1),
        "var_sigma_one": (d1 * d1).sum(axis=-1) / (n - 1),
        "cov": (d1 * dl).sum(axis=-1) / (n - 1),
    }


def bootstrap_generator(master_seed: int):
    return make_generator((check_seed(master_seed) ^ BOOTSTRAP_STREAM))


def _zscores(est, theory, se, keys):
    return {k: (est[k] - theory[k]) / se[k] if se[k] > 0 else math.nan for k in keys}


def mc_moments(cfg: McConfig) -> MomentReport:
    """Sample moments of ``(Sigma_1, Sigma_Lambda)`` with bootstrap standard errors.

    The theory is evaluated on ``[-a, a] x [-b, b]`` with the window's half
    widths; by stationarity the window's position does not matter.
    """
    def one(i):
        tess = sample(cfg.window, cfg.replicate_params(i))
        return sigma_one(tess), sigma_lambda(tess), sigma_lambda_swapped(tess)

    rows = np.array(map_replicates(one, cfg.n_replicates, cfg.threads), dtype=float)
    s1, sl, sw = rows[:, 0], rows[:, 1], rows[:, 2]
    est = {k: float(v) for k, v in _moment_stats(s1, sl).items()}
    swapped = {k: float(v) for k, v in _moment_stats(s1, sw).items()}

    rng = bootstrap_generator(cfg.master_seed)
    idx = rng.integers(0, cfg.n_replicates, size=(cfg.n_bootstrap, cfg.n_replicates))
    se = {k: float(np.std(v, ddof=1)) for k, v in _moment_stats(s1[idx], sl[idx]).items()}
    se_sw = {k: float(np.std(v, ddof=1)) for k, v in _moment_stats(s1[idx], sw[idx]).items()}

    a = cfg.window.width / 2.0
    b = cfg.window.height / 2.0
    theory = moments_rect(cfg.model, a, b).as_dict()
    printed = moments_rect(cfg.model, a, b, as_printed=True).as_dict()
    lam_keys = ("mean_sigma_lambda", "var_sigma_lambda", "cov")
    return MomentReport(
        n=cfg.n_replicates,
        estimate=est,
        se=se,
        theory=theory,
        z=_zscores(est, theory, se, MOMENT_STATS),
        theory_printed=printed,
        z_printed=_zscores(est, printed, se, MOMENT_STATS),
        swapped_estimate={k: swapped[k] for k in lam_keys},
        swapped_z=_zscores(swapped, theory, se_sw, lam_keys),
    )


# --- K-functions -------------------------------------------------------------

def rect_extents(p: float, r_grid):
    r = np.asarray(r_grid, dtype=float)
    return (1.0 - p) * r, p * r


def pair_sum(window: Rect, p: float, r_grid, a, b=None, backend=None) -> np.ndarray:
    """Cumulative translation-corrected pair sums ``S(r)`` for each ``r``.

    ``a`` and ``b`` are ``(x, y, weight)`` triples.  Without ``b`` the pairs are
    taken within ``a``, excluding each point paired with itself.
    """
    fn = kernels.pair_sums if backend is None else kernels.get_backend(backend)
    ux, uy = rect_extents(p, r_grid)
    same = b is None
    if same:
        b = a
    hist = fn(
        *(np.ascontiguousarray(v, dtype=float) for v in a),
        *(np.ascontiguousarray(v, dtype=float) for v in b),
        ux, uy, window.x_min, window.y_min, window.width, window.height, same,
    )
    return np.cumsum(hist)


def _vertex_points(tess):
    v = vertex_array(tess)
    return v[:, 0], v[:, 1], np.ones(len(v))


def _skeleton_points(tess, delta):
    # The jitter stream is keyed by the replicate seed, so it does not depend
    # on which thread handles the replicate.
    is_h, fixed, lo, hi, _ = tess.arrays()
    rng = make_generator(tess.params.seed ^ SKELETON_STREAM)
    return segment_skeleton(is_h, fixed, lo, hi, delta, rng)


def _points(obj):
    return obj.points if isinstance(obj, Skeleton) else obj


def measure_points(kind, window, p, r_grid, vertices, skeleton, backend=None):
    """Per-replicate ``(S, lambda_a, lambda_b, degenerate)`` from point sets.

    ``vertices`` is an ``(x, y, weight)`` triple.  ``skeleton`` is either a
    :class:`Skeleton`, in which case the edge kind adds back the pairs inside
    single pieces, or a plain triple of point masses.  Only the inputs the
    kind needs are used.
    """
    area = window.area
    pieces = skeleton if isinstance(skeleton, Skeleton) else None
    vertices = _points(vertices) if vertices is not None else None
    skeleton = _points(skeleton) if skeleton is not None else None
    if kind == "vertex":
        a, b = vertices, None
        la = lb = len(a[0]) / area
        degenerate = len(a[0]) < 2
    elif kind == "edge":
        a, b = skeleton, None
        la = lb = float(np.sum(a[2])) / area
        degenerate = len(a[0]) < 2
    elif kind == "cross":
        a, b = vertices, skeleton
        la = len(a[0]) / area
        lb = float(np.sum(b[2])) / area
        degenerate = len(a[0]) == 0 or len(b[0]) == 0
    else:
        raise ValueError(f"unknown K kind {kind!r}; expected one of {K_KINDS}")
    if degenerate:
        s = np.zeros(len(r_grid))
    else:
        s = pair_sum(window, p, r_grid, a, b, backend=backend)
        if kind == "edge" and pieces is not None:
            s = s + within_piece_sum(pieces, *rect_extents(p, r_grid), area)
    return s, la, lb, degenerate


def pool_k(s, la, lb):
    """Pool per-replicate sums into ``(K, SE, influence)``.

    ``s`` has shape ``(n, m)``; ``la`` and ``lb`` shape ``(n,)``.
    """
    s = np.asarray(s, dtype=float)
    la = np.asarray(la, dtype=float)
    lb = np.asarray(lb, dtype=float)
    n = s.shape[0]
    sbar = s.mean(axis=0)
    abar = la.mean()
    bbar = lb.mean()
    if abar <= 0 or bbar <= 0:
        zero = np.zeros_like(sbar)
        return zero, zero.copy(), np.zeros_like(s)
    denom = abar * bbar
    k = sbar / denom
    infl = (
        (s - sbar) / denom
        - np.outer((la - abar) / abar, k)
        - np.outer((lb - bbar) / bbar, k)
    )
    se = np.sqrt((infl ** 2).sum(axis=0) / (n * (n - 1)))
    return k, se, infl


def _z(est, theory, se):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(se > 0, (est - theory) / se, np.nan)


def build_k_report(kind, p, t, r_grid, rows, theory, intensity_theory=None) -> KReport:
    """Assemble a report from per-replicate ``(S, lambda_a, lambda_b, degenerate)`` rows."""
    r = np.asarray(r_grid, dtype=float)
    s = np.array([row[0] for row in rows], dtype=float).reshape(len(rows), len(r))
    la = np.array([row[1] for row in rows], dtype=float)
    lb = np.array([row[2] for row in rows], dtype=float)
    degenerate = [i for i, row in enumerate(rows) if row[3]]
    k, se, infl = pool_k(s, la, lb)
    with np.errstate(divide="ignore", invalid="ignore"):
        per_rep = np.where((la * lb)[:, None] > 0, s / (la * lb)[:, None], 0.0)
    if intensity_theory is None:
        k_th_int = np.full_like(k, np.nan)
    else:
        k_th_int = s.mean(axis=0) / (intensity_theory[0] * intensity_theory[1])
    theory = np.asarray(theory, dtype=float)
    return KReport(
        kind=kind, p=p, t=t, r_grid=r, k=k, se=se, theory=theory, z=_z(k, theory, se),
        k_replicates=per_rep, influence=infl, k_theory_intensity=k_th_int,
        intensity_a=float(la.mean()), intensity_b=float(lb.mean()), degenerate=degenerate,
    )


def _theory_intensities(kind, mp):
    lv = vertex_intensity(mp)
    le = mp.t
    return {"vertex": (lv, lv), "edge": (le, le), "cross": (lv, le)}[kind]


def _k_mondrian(kind: str, cfg: McConfig, backend=None) -> KReport:
    need_v = kind in ("vertex", "cross")
    need_s = kind in ("edge", "cross")

    def one(i):
        tess = sample(cfg.window, cfg.replicate_params(i))
        v = _vertex_points(tess) if need_v else None
        sk = _skeleton_points(tess, cfg.delta) if need_s else None
        return measure_points(kind, cfg.window, cfg.params.p, cfg.r_grid, v, sk, backend)

    rows = map_replicates(one, cfg.n_replicates, cfg.threads)
    mp = cfg.model
    theory = [k_from_pcf(mp, kind, r) for r in cfg.r_grid]
    report = build_k_report(kind, mp.p, mp.t, cfg.r_grid, rows, theory, _theory_intensities(kind, mp))
    if report.degenerate:
        log.warning("%d of %d replicates had too few points for the %s K-function",
                    len(report.degenerate), cfg.n_replicates, kind)
    return report


def k_vertex(cfg: McConfig, backend=None) -> KReport:
    """Empirical K-function of the vertex process."""
    return _k_mondrian("vertex", cfg, backend)


def k_edge(cfg: McConfig, backend=None) -> KReport:
    """Empirical K-function of the edge length measure.

    Uses a jittered skeleton of piece length ``cfg.delta`` plus the exact
    within-piece term, so the result does not depend on ``delta`` beyond
    Monte Carlo noise.
    """
    return _k_mondrian("edge", cfg, backend)


def k_cross(cfg: McConfig, backend=None) -> KReport:
    """Empirical cross K-function of vertices against edge length."""
    return _k_mondrian("cross", cfg, backend)


# --- pair correlation from K -------------------------------------------------

def pcf_estimate(report: KReport, bandwidth: float) -> PcfCurve:
    """Pair correlation from the slope of a local linear fit to K.

    At each grid point whose symmetric window ``[r - bandwidth/2, r + bandwidth/2]``
    lies inside the grid, the least-squares slope of K over the grid points in
    that window is divided by ``2 p (1-p) r``.  Differentiation amplifies
    noise, so standard errors are propagated from the replicate influence
    values.

    Raises
    ------
    ValueError
        If no window contains at least three grid points.
    """
    r = np.asarray(report.r_grid, dtype=float)
    half = 0.5 * float(bandwidth)
    rows, centers = [], []
    for i, c in enumerate(r):
        if c - half < r[0] - 1e-12 * abs(c) or c + half > r[-1] + 1e-12 * abs(c):
            continue
        sel = np.flatnonzero(np.abs(r - c) <= half * (1.0 + 1e-12))
        if len(sel) < 3:
            continue
        x = r[sel] - c
        xc = x - x.mean()
        w = np.zeros(len(r))
        w[sel] = xc / np.dot(xc, xc)
        rows.append(w)
        centers.append(i)
    if not rows:
        raise ValueError(f"bandwidth {bandwidth} does not span three grid points anywhere on the grid")
    log.warning("pair correlation by differentiation of K amplifies Monte Carlo noise")
    L = np.array(rows)
    rc = r[centers]
    scale = 2.0 * report.p * (1.0 - report.p) * rc
    g = L @ report.k / scale
    infl = report.influence
    n = infl.shape[0]
    if n > 1:
        se = np.sqrt(((infl @ L.T) ** 2).sum(axis=0) / (n * (n - 1))) / scale
    else:
        se = np.full_like(g, np.nan)
    return PcfCurve(rc, g, report.kind, se)
