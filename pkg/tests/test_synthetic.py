import numpy as np
import pytest

from mondrian_stit.geometry import Rect
from mondrian_stit.rng import make_generator
from mondrian_stit.synthetic import (
    csr_k,
    poisson_lines,
    poisson_lines_k,
    poisson_lines_k_theory,
    poisson_points,
    poisson_segments,
)

W = Rect(0.0, 5.0, 0.0, 5.0)
R = np.array([0.5, 1.0, 2.0, 3.0])


def test_poisson_points_in_window():
    x, y, w = poisson_points(W, 3.0, make_generator(1))
    assert np.all((x >= 0) & (x <= 5) & (y >= 0) & (y <= 5)) and np.all(w == 1)


def test_poisson_segments_clipped_and_stationary():
    rng = make_generator(2)
    total = []
    for _ in range(200):
        is_h, fixed, lo, hi = poisson_segments(W, 2.0, 0.5, 0.3, rng)
        assert np.all(hi > lo) and np.all(hi - lo <= 0.5 + 1e-12)
        assert np.all((lo >= 0) & (hi <= 5))
        total.append(np.sum(hi - lo))
    # Length intensity is intensity * length inside the window.
    assert np.mean(total) / W.area == pytest.approx(1.0, rel=0.03)


def test_poisson_lines_crossings():
    (is_h, fixed, lo, hi), (vx, vy, vw) = poisson_lines(W, 0.7, 2.0, make_generator(3))
    assert len(vx) == np.count_nonzero(is_h) * np.count_nonzero(~is_h)


def test_poisson_lines_theory_unknown_kind():
    with pytest.raises(ValueError):
        poisson_lines_k_theory("x", 0.5, 1.0, 1.0)


@pytest.mark.parametrize("kind", ["vertex", "edge", "cross"])
def test_csr_oracle(kind):
    rep = csr_k(kind, W, 0.4, 2.0, R, 300, master_seed=11)
    assert np.all(np.abs(rep.z) < 4), rep.z
    assert np.allclose(rep.k, 0.24 * R * R, rtol=0.1)


@pytest.mark.parametrize("kind", ["vertex", "edge", "cross"])
def test_poisson_lines_oracle(kind):
    rep = poisson_lines_k(kind, W, 0.7, 2.0, R, 300, master_seed=5)
    assert np.all(np.abs(rep.z) < 4), rep.z
    assert np.allclose(rep.k, poisson_lines_k_theory(kind, 0.7, 2.0, R), rtol=0.1)
