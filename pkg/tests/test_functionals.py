import math

import numpy as np
import pytest

from mondrian_stit.functionals import (
    segment_skeleton,
    within_piece_sum,
    sigma_lambda,
    sigma_lambda_swapped,
    sigma_one,
    skeleton_arrays,
    skeleton_points,
    total_length,
    vertex_array,
    vertices,
)
from mondrian_stit.geometry import Orientation, Rect, Segment
from mondrian_stit.rng import derive_seed
from mondrian_stit.sampler import MaximalEdge, SimParams, Tessellation, TessellationError, sample

UNIT = Rect(0, 1, 0, 1)


def _tess(edges, p=0.5, t=1.0, window=UNIT):
    return Tessellation(window, SimParams(p, t), tuple(edges))


def _three_splits():
    return _tess([
        MaximalEdge(Segment(Orientation.V, 0.5, 0.0, 1.0), 0.1),
        MaximalEdge(Segment(Orientation.H, 0.4, 0.0, 0.5), 0.2),
        MaximalEdge(Segment(Orientation.V, 0.2, 0.4, 1.0), 0.3),
    ], p=0.25)


def test_empty_tessellation():
    t = _tess([])
    assert sigma_one(t) == 0
    assert sigma_lambda(t) == 0.0
    assert vertices(t) == []
    assert skeleton_points(t, 0.1) == []


def test_three_split_example():
    t = _three_splits()
    assert sigma_one(t) == 3
    # V edges weighted p = 0.25, H edge 1 - p = 0.75
    assert sigma_lambda(t) == pytest.approx(0.25 * 1.0 + 0.75 * 0.5 + 0.25 * 0.6)
    assert sigma_lambda_swapped(t) == pytest.approx(0.75 * 1.0 + 0.25 * 0.5 + 0.75 * 0.6)
    vs = vertices(t)
    assert sorted((v.x, v.y) for v in vs) == [(0.2, 0.4), (0.5, 0.4)]
    for v in vs:
        assert v.host_birth < v.guest_birth


def test_single_h_edge_weight():
    t = _tess([MaximalEdge(Segment(Orientation.H, 0.5, 0.0, 1.0), 0.1)], p=0.25, window=Rect(0, 1, 0, 1))
    assert sigma_lambda(t) == 0.75
    t2 = _tess([MaximalEdge(Segment(Orientation.H, 0.5, 0.0, 2.0), 0.1)], p=0.25, window=Rect(0, 2, 0, 1))
    assert sigma_lambda(t2) == 1.5
    assert vertices(t2) == []


def test_vertex_without_host_raises():
    t = _tess([MaximalEdge(Segment(Orientation.H, 0.5, 0.0, 0.7), 0.1)])
    with pytest.raises(TessellationError):
        vertices(t)


def test_tolerant_host_lookup():
    t = _tess([
        MaximalEdge(Segment(Orientation.V, 0.5, 0.0, 1.0), 0.1),
        MaximalEdge(Segment(Orientation.H, 0.4, 0.0, 0.5 + 1e-12), 0.2),
    ])
    with pytest.raises(TessellationError):
        vertices(t)
    assert len(vertices(t, tol=1e-9)) == 1


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_vertex_properties_on_samples(seed):
    t = sample(Rect(0, 2, 0, 1), SimParams(0.6, 10.0, seed))
    vs = vertices(t)
    assert len(vs) <= 2 * sigma_one(t)
    on_boundary = sum(
        not t.window.interior_contains(x, y) for e in t.edges for x, y in e.seg.endpoints()
    )
    assert len(vs) == 2 * sigma_one(t) - on_boundary
    by_birth = {e.birth: e for e in t.edges}
    for v in vs:
        assert by_birth[v.host_birth].seg.distance_to(v.x, v.y) <= 1e-9
        assert by_birth[v.guest_birth].seg.distance_to(v.x, v.y) <= 1e-9
        assert by_birth[v.host_birth].seg.orientation is not by_birth[v.guest_birth].seg.orientation
    assert np.array_equal(vertex_array(t), np.array([(v.x, v.y) for v in vs]).reshape(-1, 2))


def test_weight_complement_sums_to_length():
    t = sample(UNIT, SimParams(0.3, 12.0, 5))
    assert sigma_lambda(t, 0.3) + sigma_lambda(t, 0.7) == pytest.approx(total_length(t), rel=1e-12)


def test_skeleton_single_edge():
    t = _tess([MaximalEdge(Segment(Orientation.H, 0.5, 0.0, 1.0), 0.1)])
    pts = skeleton_points(t, 0.25)
    assert [p.x for p in pts] == [0.125, 0.375, 0.625, 0.875]
    assert all(p.y == 0.5 and p.mass == 0.25 for p in pts)


@pytest.mark.parametrize("delta", [0.1, 0.01])
def test_skeleton_mass_equals_length(delta):
    t = sample(Rect(0, 3, 0, 2), SimParams(0.4, 5.0, 6))
    x, y, m = skeleton_arrays(t, delta).points
    assert math.fsum(m) == pytest.approx(total_length(t), rel=1e-12)
    assert np.all(m <= delta * (1 + 1e-12))


def test_segment_skeleton_vertical_and_bad_delta():
    x, y, m, h = segment_skeleton([False], [0.3], [1.0], [2.0], 0.6)
    assert np.allclose(x, 0.3) and np.allclose(y, [1.25, 1.75]) and np.allclose(m, 0.5)
    assert not h.any()
    with pytest.raises(ValueError):
        segment_skeleton([True], [0.0], [0.0], [1.0], 0.0)


def test_jittered_skeleton_stays_in_pieces():
    rng = np.random.default_rng(0)
    sk = segment_skeleton([True, False], [0.5, 0.2], [0.0, 0.1], [1.0, 0.4], 0.1, rng)
    horiz = sk.x[sk.horizontal]
    assert np.all(np.floor(horiz / 0.1) == np.arange(10))
    assert np.all(sk.y[sk.horizontal] == 0.5)
    assert np.all((sk.y[~sk.horizontal] > 0.1) & (sk.y[~sk.horizontal] < 0.4))
    assert math.fsum(sk.mass) == pytest.approx(1.3)


def test_within_piece_sum():
    sk = segment_skeleton([True, False], [0.5, 0.5], [0.0, 0.0], [0.2, 0.2], 0.1)
    # Horizontal pieces use ux, vertical pieces uy.
    got = within_piece_sum(sk, np.array([0.05, 1.0]), np.array([1.0, 0.05]), 2.0)
    big = 0.5 * 0.1 ** 2
    small = 0.1 * 0.05 - 0.5 * 0.05 ** 2
    assert np.allclose(got, [(2 * small + 2 * big) / 2.0, (2 * big + 2 * small) / 2.0])


def test_vertex_intensity_is_twice_edge_intensity():
    # Every maximal edge ends in two T-junctions: intensity 2 t^2 p (1-p).
    w, p, t, n = Rect(0, 4, 0, 4), 0.5, 2.0, 400
    dens = np.array([len(vertex_array(sample(w, SimParams(p, t, derive_seed(21, i))))) / w.area
                     for i in range(n)])
    se = dens.std(ddof=1) / math.sqrt(n)
    assert abs(dens.mean() - 2 * t * t * p * (1 - p)) <= 3 * se
    assert abs(dens.mean() - t * t * p * (1 - p)) > 10 * se
