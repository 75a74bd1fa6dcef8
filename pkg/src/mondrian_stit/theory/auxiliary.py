"""Helper integrals used in the second-order computations.

``I^j(f; t)`` denotes the j-fold iterated integral of ``f`` over ``[0, t]``,

    I^j(f; t) = 1/(j-1)! int_0^t (t - s)^(j-1) f(s) ds.
"""

import math

import numpy as np

from .quadrature import integrate

_J_VALUES = (1, 2, 3)
_K_VALUES = (0, 1)
# Below this value of q*t the closed form cancels badly and the series is used.
_SMALL_QT = 2.0


def segment_pair_overlap(z: float, u: float) -> float:
    """Measure of ``{(x, y) in [0, |z|]^2 : 0 <= y - x <= u}``."""
    if not u > 0:
        raise ValueError(f"u must be positive, got {u}")
    z = abs(float(z))
    if z >= u:
        return z * u - 0.5 * u * u
    return 0.5 * z * z


def _check_j(j):
    if j not in _J_VALUES:
        raise ValueError(f"j must be one of {_J_VALUES}, got {j}")


def _I_series(j, q, t):
    # I^j(s^2 e^{-sq}; t) = sum_n (-q)^n / n! * (n+2)! / (n+2+j)! * t^(n+2+j)
    x = q * t
    total = 0.0
    term_x = 1.0
    for n in range(60):
        c = math.factorial(n + 2) / math.factorial(n + 2 + j) / math.factorial(n)
        total += c * term_x
        term_x *= -x
        if abs(term_x) / math.factorial(n + 1) < 1e-18 * abs(total):
            break
    return total * t ** (2 + j)


def _I_formula(j, q, t):
    x = q * t
    poly = math.fsum(
        (-1) ** (r + j + 1) * x ** r * math.factorial(j + 1 - r)
        / (math.factorial(j - 1 - r) * math.factorial(r))
        for r in range(j)
    )
    tail = math.exp(-x) * (x * (x + 2 * j) + math.factorial(j + 1) / math.factorial(j - 1))
    return (poly + (-1) ** j * tail) / q ** (j + 2)


def I_closed(j: int, q: float, t: float) -> float:
    """``I^j(s^2 e^{-s q}; t)`` for ``j`` in 1..3.

    The exponential term carries the sign ``(-1)^j``; with a fixed minus sign
    the j = 2 case disagrees with direct quadrature.
    """
    _check_j(j)
    q = float(q)
    t = float(t)
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    return _I_any(j, q, t)


def _tail_formula(j, k, q, t, y):
    x = q * y * t
    poly = math.fsum((-1) ** r * (k + j - r) / math.factorial(r) * x ** r for r in range(j))
    bracket = (-1) ** (j + 1) * poly + (-1) ** j * math.exp(-x) * ((k + j) + x)
    return bracket / (y ** (j + 1 - k) * q ** (j + 2))


def I_tail(j: int, k: int, q: float, t: float, y: float) -> float:
    """``int_y^inf z^k I^j(s^2 e^{-s q z}; t) dz``.

    ``I^j(s^2 e^{-sqz}; t)`` decays like ``z^-3``, so the integral is finite
    only for ``k`` in {0, 1}, and only when ``q > 0`` and ``y > 0``.

    For small ``q t y`` the closed form cancels; there the tail from
    ``y1 = 1/(q t)`` is taken in closed form and ``[y, y1]`` by quadrature.
    """
    _check_j(j)
    if k not in _K_VALUES:
        raise ValueError(f"the tail integral diverges unless k is in {_K_VALUES}, got k={k}")
    q, t, y = float(q), float(t), float(y)
    if not 0.0 < q <= 1.0:
        raise ValueError(f"q must lie in (0, 1] for a finite tail, got {q}")
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if not y > 0:
        raise ValueError(f"y must be positive, got {y}")
    if q * t * y >= 1.0:
        return _tail_formula(j, k, q, t, y)
    y1 = 1.0 / (q * t)
    head = _tail_formula(j, k, q, t, y1)

    def f(z):
        return np.array([zz ** k * _I_any(j, q * zz, t) for zz in np.atleast_1d(z)])

    mid, _ = integrate(f, y, y1, abs_tol=1e-15 * max(1.0, abs(head)), rel_tol=1e-14)
    return head + mid


def _I_any(j, q, t):
    # Same integral without the q <= 1 restriction of the public function.
    if q * t < _SMALL_QT:
        return _I_series(j, q, t)
    return _I_formula(j, q, t)
