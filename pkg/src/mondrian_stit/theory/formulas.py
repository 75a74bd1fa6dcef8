"""Closed-form first and second order quantities of the weighted Mondrian.

All correlation functions below use the anchored rectangle
``R_{r,p} = [0, (1-p) r] x [0, p r]`` in place of a disc, so the reference
value of every K-function is ``area(R_{r,p}) = p (1-p) r^2`` and the pair
correlation is ``K'(r) / (2 p (1-p) r)``.

Each correlation function has the form ``1 + c(r)`` where ``c`` is a sum of
three building blocks evaluated at ``x = t r p^2`` and ``y = t r (1-p)^2``:

    phi(x) = (1 - e^-x) / x
    psi(x) = 1 - e^-x / 2 - (1 - e^-x) / (2 x)
    chi(x) = 2 - 2/x + 1/x^2 - e^-x (1/2 - 1/x + 1/x^2)

They lose every significant digit to cancellation for small ``x``, so they
are evaluated from their Taylor series there.
"""

from dataclasses import dataclass
import math

import numpy as np

from ..geometry import check_weight
from .quadrature import integrate
from .series import g1, g2, g3

MONDRIAN_KINDS = ("edge", "cross", "vertex")
BASELINE_KINDS = ("iso_edge", "iso_cross", "iso_vertex",
                  "poisson_edge", "poisson_cross", "poisson_vertex")
PCF_KINDS = MONDRIAN_KINDS + BASELINE_KINDS


@dataclass(frozen=True)
class ModelParams:
    p: float
    t: float

    def __post_init__(self):
        object.__setattr__(self, "p", check_weight(self.p))
        t = float(self.t)
        if not (t > 0.0 and math.isfinite(t)):
            raise ValueError(f"t must be positive and finite, got {self.t}")
        object.__setattr__(self, "t", t)

    @property
    def q(self) -> float:
        return 1.0 - self.p


@dataclass(frozen=True)
class RectMoments:
    mean_sigma_lambda: float
    mean_sigma_one: float
    var_sigma_lambda: float
    var_sigma_one: float
    cov: float

    def as_dict(self) -> dict:
        return {
            "mean_sigma_lambda": self.mean_sigma_lambda,
            "mean_sigma_one": self.mean_sigma_one,
            "var_sigma_lambda": self.var_sigma_lambda,
            "var_sigma_one": self.var_sigma_one,
            "cov": self.cov,
        }

    def is_admissible(self, rtol: float = 1e-12) -> bool:
        """Non-negative variances and a covariance within Cauchy-Schwarz."""
        if self.var_sigma_lambda < 0 or self.var_sigma_one < 0:
            return False
        bound = math.sqrt(self.var_sigma_lambda * self.var_sigma_one)
        return abs(self.cov) <= bound * (1.0 + rtol)


@dataclass(frozen=True)
class PcfCurve:
    """A correlation function tabulated on an increasing grid of radii.

    ``se`` is filled in for curves estimated from simulation.
    """

    r_grid: np.ndarray
    values: np.ndarray
    kind: str
    se: np.ndarray = None

    def __post_init__(self):
        r = np.asarray(self.r_grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape:
            raise ValueError("r_grid and values must be 1-d arrays of equal length")
        if np.any(r <= 0) or np.any(np.diff(r) <= 0):
            raise ValueError("r_grid must be strictly increasing and positive")
        if not np.all(np.isfinite(v)):
            raise ValueError("pcf values must be finite")
        object.__setattr__(self, "r_grid", r)
        object.__setattr__(self, "values", v)
        if self.se is not None:
            object.__setattr__(self, "se", np.asarray(self.se, dtype=float))


# --- intensities -------------------------------------------------------------

def point_intersection_measure(mp: ModelParams, area: float) -> float:
    """Measure of pairs of lines meeting inside a set of the given area."""
    if area < 0:
        raise ValueError(f"area must be non-negative, got {area}")
    return 2.0 * mp.p * mp.q * area


def edge_length_intensity(mp: ModelParams) -> float:
    """Mean total edge length per unit area."""
    return mp.t


def edge_count_intensity(mp: ModelParams) -> float:
    """Mean number of maximal edges per unit area (bulk term)."""
    return mp.t ** 2 * mp.p * mp.q


def vertex_intensity(mp: ModelParams) -> float:
    """Mean number of T-junctions per unit area.

    Every maximal edge ends in two T-junctions and every T-junction ends
    exactly one edge, so this is twice the edge count intensity.
    """
    return 2.0 * edge_count_intensity(mp)


# --- first and second moments on [-a, a] x [-b, b] ---------------------------

def _check_half_widths(a, b):
    if not (a > 0 and b > 0):
        raise ValueError(f"half-widths must be positive, got a={a}, b={b}")


def mean_sigma_lambda(mp: ModelParams, a: float, b: float) -> float:
    _check_half_widths(a, b)
    return 8.0 * mp.t * mp.p * mp.q * a * b


def mean_sigma_one(mp: ModelParams, a: float, b: float) -> float:
    _check_half_widths(a, b)
    p, q, t = mp.p, mp.q, mp.t
    return 4.0 * t * t * p * q * a * b + 2.0 * t * (p * b + q * a)


def moments_rect(mp: ModelParams, a: float, b: float, as_printed: bool = False) -> RectMoments:
    """Means, variances and covariance of the edge count and weighted length.

    By default the variances use equal weights on the two directional terms
    and a minus sign in front of the g2 term of ``Var(Sigma_1)``; this is what
    the integral computation gives and what simulation reproduces.
    ``as_printed=True`` returns the variant that weights the directional
    terms by ``(1-p)`` and ``p`` and adds the g2 term; it is kept only so the
    two can be compared against Monte Carlo output.
    """
    _check_half_widths(a, b)
    p, q, t = mp.p, mp.q, mp.t
    xa = 2.0 * a * t * q
    xb = 2.0 * b * t * p
    wa, wb = (q, p) if as_printed else (1.0, 1.0)
    sign2 = 1.0 if as_printed else -1.0
    var_l = -8.0 * a * b * p * q * (wa * g1(xa) + wb * g1(xb))
    var_1 = (
        2.0 * t * b * p
        + 2.0 * t * a * q
        + 12.0 * a * b * t * t * p * q
        + sign2 * 16.0 * a * b * t * t * p * q * (wa * g2(xa) + wb * g2(xb))
    )
    cov = 8.0 * t * a * b * p * q * (1.0 - (wa * g3(xa) + wb * g3(xb)))
    return RectMoments(
        mean_sigma_lambda=mean_sigma_lambda(mp, a, b),
        mean_sigma_one=mean_sigma_one(mp, a, b),
        var_sigma_lambda=var_l,
        var_sigma_one=var_1,
        cov=cov,
    )


def variance_asymptotics(mp: ModelParams, r: float, as_printed: bool = False) -> tuple:
    """Leading terms of (Var Sigma_Lambda, Var Sigma_1, Cov) on ``[-r, r]^2``.

    Each g behaves like ``-c log x`` (c = 1, 1/2, 1 for g1, g2, g3), so both
    directional terms contribute ``log r`` and the common leading term is
    ``16 p (1-p) r^2 log r`` times ``1, t^2, t``.  ``as_printed=True`` uses the
    constant 4 instead of 16.
    """
    if not r > 1.0:
        raise ValueError(f"asymptotics need r > 1, got {r}")
    c = 4.0 if as_printed else 16.0
    base = c * mp.p * mp.q * r * r * math.log(r)
    return base, mp.t ** 2 * base, mp.t * base


# --- stable building blocks --------------------------------------------------

_SERIES_CUT = 2.0
_N_TERMS = 40


def _taylor(x, coeffs):
    acc = np.zeros_like(x)
    for c in coeffs[::-1]:
        acc = acc * x + c
    return acc


def _coeffs_phi():
    # (1 - e^-x)/x = sum_k (-1)^k x^k / (k+1)!
    return [(-1) ** k / math.factorial(k + 1) for k in range(_N_TERMS)]


def _coeffs_psi_over_x():
    # psi(x) = -1/2 sum_{k>=1} (-x)^k (k+2)/(k+1)!; divided by x
    return [-0.5 * (-1) ** k * (k + 2) / math.factorial(k + 1) for k in range(1, _N_TERMS + 1)]


def _coeffs_chi_over_x():
    # chi(x) = -sum_{k>=1} (-1)^k (1/(2 k!) + 1/(k+1)! + 1/(k+2)!) x^k; divided by x
    return [
        -((-1) ** k) * (0.5 / math.factorial(k) + 1.0 / math.factorial(k + 1) + 1.0 / math.factorial(k + 2))
        for k in range(1, _N_TERMS + 1)
    ]


_PHI = _coeffs_phi()
_PSI_X = _coeffs_psi_over_x()
_CHI_X = _coeffs_chi_over_x()


def _blend(x, small_fn, large_fn):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < _SERIES_CUT
    out[small] = small_fn(x[small])
    xl = x[~small]
    out[~small] = large_fn(xl)
    return out


def phi(x):
    return _blend(x, lambda s: _taylor(s, _PHI), lambda s: -np.expm1(-s) / s)


def psi_over_x(x):
    def large(s):
        e = np.exp(-s)
        return (1.0 - 0.5 * e + 0.5 * np.expm1(-s) / s) / s
    return _blend(x, lambda s: _taylor(s, _PSI_X), large)


def chi_over_x(x):
    def large(s):
        e = np.exp(-s)
        return (2.0 - 2.0 / s + 1.0 / s ** 2 - e * (0.5 - 1.0 / s + 1.0 / s ** 2)) / s
    return _blend(x, lambda s: _taylor(s, _CHI_X), large)


# --- correlation functions ---------------------------------------------------
#
# Each ``_excess_*`` returns r * (g(r) - 1), which stays bounded as r -> 0;
# the pair correlation is 1 + excess / r and the K-function integrates it.

def _excess_edge(mp, r):
    p, q, t = mp.p, mp.q, mp.t
    return (phi(t * r * p * p) + phi(t * r * q * q)) / (2.0 * t)


def _excess_cross_printed(mp, r):
    p, q, t = mp.p, mp.q, mp.t
    return (psi_over_x(t * r * p * p) / q + psi_over_x(t * r * q * q) / p) / t


def _excess_vertex_printed(mp, r):
    p, q, t = mp.p, mp.q, mp.t
    return (chi_over_x(t * r * p * p) / (q * q) + chi_over_x(t * r * q * q) / (p * p)) / t


# The printed vertex and cross functions normalize the reduced second moment
# measures by a vertex intensity of t^2 p (1-p).  Every maximal edge has two
# T-junction endpoints, so the intensity is twice that; renormalizing divides
# the vertex excess by 4 and the cross excess by 2.

def _excess_cross(mp, r):
    return 0.5 * _excess_cross_printed(mp, r)


def _excess_vertex(mp, r):
    return 0.25 * _excess_vertex_printed(mp, r)


def _excess_iso_edge(mp, r):
    t = mp.t
    return phi(2.0 * t * r / math.pi) / (math.pi * t)


def _excess_iso_cross(mp, r):
    t = mp.t
    return 2.0 * psi_over_x(2.0 * t * r / math.pi) / (math.pi * t)


def _excess_iso_vertex(mp, r):
    t = mp.t
    return 2.0 * chi_over_x(2.0 * t * r / math.pi) / (math.pi * t)


def _excess_poisson_edge(mp, r):
    return np.full_like(np.asarray(r, dtype=float), 1.0 / mp.t)


def _excess_poisson_cross(mp, r):
    return np.full_like(np.asarray(r, dtype=float), 1.0 / (4.0 * mp.t * mp.p * mp.q))


def _excess_poisson_vertex(mp, r):
    return np.full_like(np.asarray(r, dtype=float), 1.0 / (2.0 * mp.t * (mp.p * mp.q) ** 2))


def _excess_csr(mp, r):
    return np.zeros_like(np.asarray(r, dtype=float))


_EXCESS = {
    "edge": _excess_edge,
    "cross": _excess_cross,
    "vertex": _excess_vertex,
    "iso_edge": _excess_iso_edge,
    "iso_cross": _excess_iso_cross,
    "iso_vertex": _excess_iso_vertex,
    "poisson_edge": _excess_poisson_edge,
    "poisson_cross": _excess_poisson_cross,
    "poisson_vertex": _excess_poisson_vertex,
    "csr": _excess_csr,
}

_PRINTED = {"cross": _excess_cross_printed, "vertex": _excess_vertex_printed}


def _check_r(r):
    arr = np.asarray(r, dtype=float)
    if np.any(~(arr > 0)) or np.any(~np.isfinite(arr)):
        raise ValueError(f"correlation functions need finite r > 0, got {r}")
    return arr


def _scalar_or_array(value, like):
    return float(value) if np.ndim(like) == 0 else value


def _excess_fn(kind, as_printed):
    if kind not in _EXCESS:
        raise ValueError(f"unknown correlation kind {kind!r}")
    if as_printed:
        return _PRINTED.get(kind, _EXCESS[kind])
    return _EXCESS[kind]


def pcf(mp: ModelParams, kind: str, r, as_printed: bool = False):
    """Pair or cross correlation function of the given kind at ``r > 0``.

    ``as_printed=True`` selects the vertex and cross functions normalized by a
    vertex intensity of ``t^2 p (1-p)``; it has no effect on other kinds.
    """
    fn = _excess_fn(kind, as_printed)
    arr = _check_r(r)
    value = 1.0 + fn(mp, arr) / arr
    return _scalar_or_array(value, r)


def pcf_edge(mp: ModelParams, r):
    """Pair correlation of the edge length measure."""
    return pcf(mp, "edge", r)


def pcf_cross(mp: ModelParams, r, as_printed: bool = False):
    """Cross correlation of vertices and edge length."""
    return pcf(mp, "cross", r, as_printed)


def pcf_vertex(mp: ModelParams, r, as_printed: bool = False):
    """Pair correlation of the vertex process."""
    return pcf(mp, "vertex", r, as_printed)


def pcf_curve(mp: ModelParams, kind: str, r_grid, as_printed: bool = False) -> PcfCurve:
    r = np.asarray(r_grid, dtype=float)
    return PcfCurve(r, pcf(mp, kind, r, as_printed), kind)


def baseline_pcf(kind: str, mp: ModelParams, r):
    """Isotropic STIT and rectangular Poisson line comparison curves."""
    if kind not in BASELINE_KINDS:
        raise ValueError(f"unknown baseline {kind!r}; expected one of {BASELINE_KINDS}")
    return pcf(mp, kind, r)


def k_from_pcf(mp: ModelParams, kind: str, r: float, abs_tol: float = 1e-10,
               as_printed: bool = False) -> float:
    """K-function ``int_0^r 2 p (1-p) s g(s) ds``.

    Integrates the bounded product ``s (g(s) - 1)`` and adds the reference
    area ``p (1-p) r^2`` exactly.

    Raises
    ------
    QuadratureError
        If the integral does not converge to ``abs_tol``.
    """
    fn = _excess_fn(kind, as_printed)
    r = float(r)
    if not r > 0:
        raise ValueError(f"K-function needs r > 0, got {r}")
    pq = mp.p * mp.q
    extra, _ = integrate(lambda s: fn(mp, s), 0.0, r, abs_tol=abs_tol / (2.0 * pq))
    return pq * r * r + 2.0 * pq * extra
