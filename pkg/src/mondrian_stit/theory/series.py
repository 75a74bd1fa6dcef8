"""The alternating series g1, g2, g3 that appear in the variance formulas.

    g1(x) = sum_{k>=1} (-1)^k x^k / (k (k+1)!)
    g2(x) = sum_{k>=1} (-1)^k x^k / (k (k+1) (k+2)!)
    g3(x) = sum_{k>=1} (-1)^k x^k / (k (k+1) (k+1)!)

For moderate ``x`` the series is summed exactly in rational arithmetic (the
float argument is an exact dyadic rational), so the result is correctly
rounded however large the intermediate terms get.  For large ``x`` the
terms peak near ``k ~ x`` and that becomes slow, so we switch to integral
representations.  With ``h(u) = sum (-1)^k u^k / (k k!) = -Ein(u)``,

    g1(x) = (1/x)    int_0^x h(u) du
    g3(x) = (1/x)    int_0^x h(u) log(x/u) du
    g2(x) = (1/x^2)  int_0^x h(u) (x log(x/u) - x + u) du

(g3 averages g1 once more, g2 applies ``f -> x^-2 int_0^x y f(y) dy`` to g3).
"""

from fractions import Fraction
import math

import numpy as np
from scipy.special import exp1

from .quadrature import integrate

EULER_GAMMA = 0.57721566490153286061

SERIES_MAX_X = 30.0

_KINDS = ("g1", "g2", "g3")


def _coefficient(kind: str, k: int) -> Fraction:
    if kind == "g1":
        return Fraction(1, k * math.factorial(k + 1))
    if kind == "g2":
        return Fraction(1, k * (k + 1) * math.factorial(k + 2))
    return Fraction(1, k * (k + 1) * math.factorial(k + 1))


def _check(kind: str, x: float) -> float:
    if kind not in _KINDS:
        raise ValueError(f"unknown series {kind!r}")
    x = float(x)
    if not x >= 0.0 or math.isnan(x):
        raise ValueError(f"{kind} is defined for x >= 0, got {x}")
    return x


def series_bracket(kind: str, x: float, tol: float = 1e-30):
    """Sum the series exactly until the terms fall below ``tol``.

    Returns ``(value, lower, upper)`` where ``lower``/``upper`` are the last two
    partial sums, which enclose the limit once the terms are decreasing.
    """
    x = _check(kind, x)
    if x == 0.0:
        return 0.0, 0.0, 0.0
    xf = Fraction(x)
    power = Fraction(1)
    total = Fraction(0)
    prev = Fraction(0)
    ftol = Fraction(tol)
    k = 0
    while True:
        k += 1
        power *= xf
        term = power * _coefficient(kind, k)
        prev = total
        total = total - term if k % 2 else total + term
        if k > x and term < ftol:
            break
    lo, hi = sorted((prev, total))
    return float(total), float(lo), float(hi)


def g_series(kind: str, x: float) -> float:
    return series_bracket(kind, x)[0]


def ein(u):
    """Entire exponential integral ``int_0^u (1 - e^-s)/s ds`` for ``u >= 0``."""
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    small = u < 1.0
    us = u[small]
    # Power series; 20 terms are plenty below 1.
    acc = np.zeros_like(us)
    term = np.ones_like(us)
    for k in range(1, 21):
        term = term * us / k
        acc += (term / k) if k % 2 else -(term / k)
    out[small] = acc
    ul = u[~small]
    out[~small] = exp1(ul) + EULER_GAMMA + np.log(ul)
    return out


def _breakpoints(x: float):
    pts = []
    b = 1.0
    while b < x:
        pts.append(b)
        b *= 2.0
    return pts


def g_integral(kind: str, x: float, abs_tol: float = 1e-10) -> float:
    """Evaluate g1/g2/g3 through their integral representations."""
    x = _check(kind, x)
    if x == 0.0:
        return 0.0
    if kind == "g1":
        def f(u):
            return -ein(u)
        scale = x
    elif kind == "g3":
        def f(u):
            return -ein(u) * np.log(x / u)
        scale = x
    else:
        def f(u):
            return -ein(u) * (x * np.log(x / u) - x + u)
        scale = x * x
    # The tolerance is on g itself, so scale it up to the raw integral.
    value, _ = integrate(f, 0.0, x, abs_tol=abs_tol * scale, breakpoints=_breakpoints(x),
                         max_intervals=4000)
    return value / scale


def _g(kind: str, x: float) -> float:
    x = _check(kind, x)
    if x == 0.0:
        return 0.0
    if x <= SERIES_MAX_X:
        return g_series(kind, x)
    return g_integral(kind, x)


def g1(x: float) -> float:
    """Non-positive, decreasing; behaves like ``-log x`` for large ``x``."""
    return _g("g1", x)


def g2(x: float) -> float:
    """Non-positive; behaves like ``-(log x)/2`` for large ``x``."""
    return _g("g2", x)


def g3(x: float) -> float:
    """Non-positive; behaves like ``-log x`` for large ``x``."""
    return _g("g3", x)
