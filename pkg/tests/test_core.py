import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kmustar.core import Dataset, DimensionError, assign, centroid, sse
from kmustar.datagen import GridSpec, gen_grid, grid_block_centers


def brute_partition(points, centers):
    """Nearest and runner-up by scanning every pair in plain Python."""
    near, a2, second, b2 = [], [], [], []
    for x in points:
        dists = [float(sum((xi - ci) ** 2 for xi, ci in zip(x, c))) for c in centers]
        order = sorted(range(len(dists)), key=lambda j: (dists[j], j))
        near.append(order[0])
        a2.append(dists[order[0]])
        if len(order) > 1:
            second.append(order[1])
            b2.append(dists[order[1]])
    return near, a2, second, b2


def test_dataset_is_immutable():
    ds = Dataset([[0.0, 1.0], [2.0, 3.0]])
    assert (ds.n, ds.d) == (2, 2)
    with pytest.raises(ValueError):
        ds.points[0, 0] = 5.0
    with pytest.raises(Exception):
        ds.name = "other"


@pytest.mark.parametrize("bad", [np.empty((0, 2)), [[np.nan, 1.0]], [[np.inf]]])
def test_dataset_rejects_bad_points(bad):
    with pytest.raises(ValueError):
        Dataset(bad)


def test_sse_two_points_one_center():
    assert sse([[0.0, 0.0], [2.0, 0.0]], [[1.0, 0.0]]) == 2.0


def test_sse_centers_on_points():
    pts = np.array([[0.0, 1.0], [3.0, -2.0], [5.0, 5.0]])
    assert sse(pts, pts) == 0.0


def test_sse_dimension_mismatch():
    with pytest.raises(DimensionError):
        sse([[0.0, 0.0]], [[1.0, 0.0, 0.0]])
    with pytest.raises(DimensionError):
        assign([[0.0, 0.0]], [[1.0, 0.0, 0.0]])


def test_sse_grid_a_one_center_per_cluster():
    assert sse(gen_grid(), grid_block_centers(split=1)) == pytest.approx(1.45833, abs=1e-5)


def test_assign_1d():
    part = assign([0.0, 10.0], [1.0, 9.0])
    assert part.nearest_idx.tolist() == [0, 1]
    assert part.second_idx.tolist() == [1, 0]


def test_assign_tie_goes_to_lowest_index():
    part = assign([[0.0, 0.0]], [[1.0, 0.0], [-1.0, 0.0]])
    assert part.nearest_idx[0] == 0
    assert part.second_idx[0] == 1


def test_assign_single_center_flags_second_absent():
    part = assign([[0.0], [1.0]], [[0.5]])
    assert part.second_idx.tolist() == [-1, -1]
    assert np.all(np.isinf(part.second_sqdist))


def test_assign_matches_brute_force(rng):
    pts = rng.normal(size=(20, 3))
    centers = rng.normal(size=(4, 3))
    part = assign(pts, centers)
    near, a2, second, b2 = brute_partition(pts.tolist(), centers.tolist())
    assert part.nearest_idx.tolist() == near
    assert part.second_idx.tolist() == second
    np.testing.assert_allclose(part.nearest_sqdist, a2, rtol=1e-12)
    np.testing.assert_allclose(part.second_sqdist, b2, rtol=1e-12)


def test_centroid():
    np.testing.assert_array_equal(centroid([[0.0, 0.0], [2.0, 0.0]]), [1.0, 0.0])
    np.testing.assert_array_equal(centroid([[3.5, -1.0]]), [3.5, -1.0])
    with pytest.raises(ValueError):
        centroid(np.empty((0, 2)))


def test_centroid_of_a_grid_cluster():
    spec = GridSpec()
    pts = gen_grid(spec).points
    # lower-left cluster: the 36 points with both coordinates below the first pitch
    block = pts[(pts[:, 0] < spec.cluster_pitch) & (pts[:, 1] < spec.cluster_pitch)]
    assert len(block) == 36
    expected = [sum(p[0] for p in block) / 36, sum(p[1] for p in block) / 36]
    np.testing.assert_allclose(centroid(block), expected, rtol=1e-14)
    np.testing.assert_allclose(centroid(block), [spec.cluster_pitch / 2] * 2, rtol=1e-12)


instances = st.tuples(st.integers(1, 40), st.integers(1, 8), st.integers(1, 4)).flatmap(
    lambda nkd: st.tuples(
        arrays(np.float64, (nkd[0], nkd[2]), elements=st.floats(-50, 50)),
        arrays(np.float64, (nkd[1], nkd[2]), elements=st.floats(-50, 50)),
    )
)


@settings(max_examples=100, deadline=None)
@given(instances)
def test_partition_properties(inst):
    pts, centers = inst
    part = assign(pts, centers)
    full = ((pts[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    np.testing.assert_allclose(part.nearest_sqdist, full.min(axis=1), rtol=1e-12)
    assert part.voronoi_count.sum() == len(pts)
    total = sse(pts, centers)
    assert part.voronoi_sse.sum() == pytest.approx(total, rel=1e-9, abs=1e-12)
    assert np.all(part.nearest_sqdist <= part.second_sqdist)
    if len(centers) >= 2:
        assert np.all(part.nearest_idx != part.second_idx)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_assign_permutation_covariant(seed):
    r = np.random.default_rng(seed)
    pts = r.normal(size=(30, 2))
    centers = r.normal(size=(5, 2))
    perm = r.permutation(5)
    p1 = assign(pts, centers)
    p2 = assign(pts, centers[perm])
    # continuous draws: ties have probability zero
    np.testing.assert_array_equal(perm[p2.nearest_idx], p1.nearest_idx)


def test_assign_brute_force_many(rng):
    for n, k in itertools.product([1, 7, 200], [1, 3, 20]):
        pts = rng.uniform(size=(n, 2))
        centers = rng.uniform(size=(k, 2))
        near, a2, _, _ = brute_partition(pts.tolist(), centers.tolist())
        part = assign(pts, centers)
        assert part.nearest_idx.tolist() == near
        np.testing.assert_allclose(part.nearest_sqdist, a2, rtol=1e-12)
