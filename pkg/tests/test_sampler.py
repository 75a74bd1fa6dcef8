import math

import numpy as np
import pytest
from scipy import stats

from mondrian_stit.geometry import Orientation, Rect, Segment, lambda_rect
from mondrian_stit.rng import derive_seed
from mondrian_stit.sampler import (
    MaximalEdge,
    ResourceLimitError,
    SimParams,
    Tessellation,
    TessellationError,
    cells,
    restrict,
    sample,
    validate,
)

UNIT = Rect(0, 1, 0, 1)


def test_sim_params_validation():
    with pytest.raises(ValueError):
        SimParams(0.0, 1.0)
    with pytest.raises(ValueError):
        SimParams(0.5, 0.0)
    with pytest.raises(ValueError):
        SimParams(0.5, math.inf)
    with pytest.raises(ValueError):
        SimParams(0.5, 1.0, -3)


def test_sample_is_deterministic():
    a = sample(UNIT, SimParams(0.3, 8.0, 42))
    b = sample(UNIT, SimParams(0.3, 8.0, 42))
    c = sample(UNIT, SimParams(0.3, 8.0, 43))
    assert a.edges == b.edges
    assert a.edges != c.edges


@pytest.mark.parametrize("p, t, seed", [(0.5, 10.0, 1), (0.9, 15.0, 2), (0.2, 5.0, 3)])
def test_sample_invariants(p, t, seed):
    w = Rect(-1, 2, 0, 1.5)
    tess = sample(w, SimParams(p, t, seed))
    validate(tess, tol=0.0)
    births = [e.birth for e in tess.edges]
    assert all(0 < b <= t for b in births)
    assert births == sorted(births)
    cs = cells(tess)
    assert len(cs) == len(tess.edges) + 1
    assert math.fsum(c.area for c in cs) == pytest.approx(w.area, rel=1e-12)


def test_cells_examples():
    empty = Tessellation(UNIT, SimParams(0.5, 1.0), ())
    assert cells(empty) == [UNIT]
    one = Tessellation(UNIT, SimParams(0.5, 1.0), (MaximalEdge(Segment(Orientation.V, 0.3, 0.0, 1.0), 0.5),))
    assert sorted(cells(one), key=lambda c: c.x_min) == [Rect(0, 0.3, 0, 1), Rect(0.3, 1, 0, 1)]


def test_cells_tile_without_overlap():
    tess = sample(UNIT, SimParams(0.6, 12.0, 9))
    cs = cells(tess)
    rng = np.random.default_rng(0)
    pts = rng.random((500, 2))
    for x, y in pts:
        hits = sum(c.interior_contains(x, y) for c in cs)
        assert hits == 1


def test_tiny_t_gives_empty_tessellation():
    tess = sample(UNIT, SimParams(0.5, 1e-300, 5))
    assert tess.edges == ()


def test_empty_probability_matches_exponential():
    w, p, t, n = Rect(0, 1, 0, 2), 0.5, 0.4, 4000
    empty = sum(len(sample(w, SimParams(p, t, derive_seed(77, i)))) == 0 for i in range(n))
    prob = math.exp(-t * lambda_rect(w, p))
    assert abs(empty - n * prob) <= 3 * math.sqrt(n * prob * (1 - prob))


def test_first_edge_orientation_frequency():
    w, n = Rect(0, 1, 0, 3), 4000
    horiz = 0
    for i in range(n):
        tess = sample(w, SimParams(0.5, 5.0, derive_seed(5, i)))
        horiz += tess.edges[0].seg.orientation is Orientation.H
    prob = 0.75
    assert abs(horiz - n * prob) <= 3 * math.sqrt(n * prob * (1 - prob))


def test_mean_edge_count_unit_square():
    n = 20000
    counts = np.array([len(sample(UNIT, SimParams(0.5, 1.0, derive_seed(11, i)))) for i in range(n)])
    se = counts.std(ddof=1) / math.sqrt(n)
    assert abs(counts.mean() - 1.25) <= 3 * se


def test_cell_cap_raises():
    with pytest.raises(ResourceLimitError):
        sample(UNIT, SimParams(0.5, 200.0, 1), cell_cap=100)


def test_restrict_identity_and_empty():
    tess = sample(UNIT, SimParams(0.5, 10.0, 4))
    assert restrict(tess, tess.window).edges == tess.edges
    empty = Tessellation(UNIT, SimParams(0.5, 1.0), ())
    assert restrict(empty, Rect(0, 0.5, 0, 0.5)).edges == ()
    with pytest.raises(ValueError):
        restrict(tess, Rect(0.5, 1.5, 0, 1))


def test_restrict_is_valid_and_clips():
    tess = sample(Rect(0, 2, 0, 2), SimParams(0.4, 6.0, 8))
    sub = Rect(0.3, 1.4, 0.2, 1.9)
    r = restrict(tess, sub)
    validate(r, tol=0.0)
    for e in r.edges:
        (x1, y1), (x2, y2) = e.seg.endpoints()
        assert sub.contains_point(x1, y1) and sub.contains_point(x2, y2)


def test_restrict_drops_boundary_edges():
    edge = MaximalEdge(Segment(Orientation.V, 1.0, 0.0, 2.0), 0.1)
    tess = Tessellation(Rect(0, 2, 0, 2), SimParams(0.5, 1.0), (edge,))
    assert restrict(tess, Rect(0, 1, 0, 2)).edges == ()


def test_tessellation_rejects_bad_births():
    e1 = MaximalEdge(Segment(Orientation.V, 0.5, 0.0, 1.0), 0.3)
    e2 = MaximalEdge(Segment(Orientation.H, 0.5, 0.0, 0.5), 0.3)
    with pytest.raises(TessellationError):
        Tessellation(UNIT, SimParams(0.5, 1.0), (e1, e2))
    with pytest.raises(TessellationError):
        Tessellation(UNIT, SimParams(0.5, 0.2), (e1,))


def test_validate_rejects_dangling_edge():
    e1 = MaximalEdge(Segment(Orientation.V, 0.5, 0.0, 1.0), 0.1)
    e2 = MaximalEdge(Segment(Orientation.H, 0.5, 0.0, 0.7), 0.2)
    with pytest.raises(TessellationError):
        validate(Tessellation(UNIT, SimParams(0.5, 1.0), (e1, e2)))


def test_restriction_consistency_ks():
    # Smaller version of the acceptance check: p-value well above 0.01.
    n = 3000
    big = Rect(0, 2, 0, 2)
    a = [len(restrict(sample(big, SimParams(0.5, 3.0, derive_seed(1, i))), UNIT)) for i in range(n)]
    b = [len(sample(UNIT, SimParams(0.5, 3.0, derive_seed(2, i)))) for i in range(n)]
    assert stats.ks_2samp(a, b).pvalue > 0.01
