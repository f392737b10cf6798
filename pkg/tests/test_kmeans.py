import numpy as np
import pytest

from kmustar.core import assign, sse
from kmustar.datagen import grid_block_centers
from kmustar.kmeans import LloydConfig, kmeans, lloyd_iteration, run_lloyd, seed_random


def test_iteration_at_fixed_point():
    pts = np.array([[0.0], [1.0], [8.0], [9.0]])
    centers = np.array([[0.5], [8.5]])
    new, _, changed = lloyd_iteration(pts, centers)
    np.testing.assert_array_equal(new, centers)
    assert not changed


def test_iteration_moves_to_voronoi_means():
    # sets {0, 1} and {8, 9}: means 0.5 and 8.5
    new, part, _ = lloyd_iteration([0.0, 1.0, 8.0, 9.0], [0.0, 9.0])
    np.testing.assert_array_equal(new, [[0.5], [8.5]])
    assert part.nearest_idx.tolist() == [0, 0, 1, 1]


def test_empty_cluster_relocated_to_worst_point():
    pts = np.array([[0.0], [1.0], [2.0]])
    centers = np.array([[1.0], [100.0]])
    before = sse(pts, centers)
    new, part, changed = lloyd_iteration(pts, centers)
    # center 0 -> mean 1.0; farthest points 0 and 2 tie, lowest index wins
    np.testing.assert_array_equal(new, [[1.0], [0.0]])
    assert changed
    assert part.sse < before
    assert part.sse == pytest.approx(1.0)


def test_several_empty_clusters_get_distinct_points():
    pts = np.array([[0.0], [1.0], [2.0], [10.0]])
    new, part, _ = lloyd_iteration(pts, [[1.0], [100.0], [200.0]])
    assert len({float(c) for c in new[:, 0]}) == 3
    assert np.all(part.voronoi_count > 0)


def test_run_lloyd_global_fixed_point(grid_a):
    res = run_lloyd(grid_a, grid_block_centers(split=1))
    assert res.iterations == 1
    assert res.converged
    assert res.sse == pytest.approx(1.458333333, abs=1e-8)


def test_run_lloyd_small():
    res = run_lloyd([0.0, 1.0, 8.0, 9.0], [0.0, 9.0])
    np.testing.assert_array_equal(res.centers, [[0.5], [8.5]])
    assert res.sse == 1.0
    assert res.converged


def test_run_lloyd_sse_matches_recomputation(rng):
    pts = rng.normal(size=(150, 3))
    res = run_lloyd(pts, seed_random(pts, 7, rng))
    assert res.sse == pytest.approx(sse(pts, res.centers), rel=1e-12)
    assert res.history[-1] == res.sse
    assert all(b <= a for a, b in zip(res.history, res.history[1:]))


def test_run_lloyd_respects_iteration_cap(rng):
    pts = rng.normal(size=(500, 2))
    res = run_lloyd(pts, seed_random(pts, 30, rng), LloydConfig(max_iterations=2))
    assert res.iterations == 2
    assert not res.converged


def test_run_lloyd_tolerance_stops_early(rng):
    pts = rng.normal(size=(500, 2))
    init = seed_random(pts, 30, rng)
    exact = run_lloyd(pts, init)
    loose = run_lloyd(pts, init, LloydConfig(tolerance=1.0))
    assert loose.converged
    assert loose.iterations <= exact.iterations


def test_run_lloyd_is_pure(rng):
    pts = rng.normal(size=(200, 2))
    init = seed_random(pts, 8, rng)
    a, b = run_lloyd(pts, init), run_lloyd(pts, init)
    np.testing.assert_array_equal(a.centers, b.centers)
    assert a.history == b.history


def test_run_lloyd_more_centers_than_points():
    res = run_lloyd([0.0, 1.0], [0.0, 0.5, 1.0])
    assert res.sse == 0.0


@pytest.mark.parametrize("cfg", [dict(max_iterations=0), dict(tolerance=-1.0)])
def test_lloyd_config_validation(cfg):
    with pytest.raises(ValueError):
        LloydConfig(**cfg)


def test_seed_random_k_equals_n(rng):
    pts = np.arange(12.0).reshape(6, 2)
    c = seed_random(pts, 6, rng)
    assert sorted(map(tuple, c)) == sorted(map(tuple, pts))


def test_seed_random_deterministic():
    pts = np.arange(40.0).reshape(20, 2)
    a = seed_random(pts, 5, np.random.default_rng(3))
    b = seed_random(pts, 5, np.random.default_rng(3))
    np.testing.assert_array_equal(a, b)


def test_seed_random_rejects_large_k(rng):
    with pytest.raises(ValueError):
        seed_random(np.zeros((3, 1)), 4, rng)


def test_seed_random_uniform_frequency():
    rng = np.random.default_rng(7)
    pts = np.arange(10.0)[:, None]
    counts = np.zeros(10)
    for _ in range(10_000):
        counts[int(seed_random(pts, 1, rng)[0, 0])] += 1
    np.testing.assert_allclose(counts / 10_000, 0.1, atol=0.02)


def test_kmeans_random_restarts_are_monotone(grid_a, rng):
    for _ in range(5):
        res = kmeans(grid_a, 36, rng)
        assert all(b <= a for a, b in zip(res.history, res.history[1:]))
        assert res.sse >= 1.458333 - 1e-9
        assert np.all(assign(grid_a, res.centers).voronoi_count > 0)
