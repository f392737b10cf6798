"""Lloyd's algorithm with random seeding and iteration accounting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Partition, as_centers, as_points, assign, sqdist_matrix

# relative slack for the monotone-descent assertion
_DESCENT_RTOL = 1e-12


@dataclass(frozen=True)
class LloydConfig:
    max_iterations: int = 300
    tolerance: float = 0.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.tolerance < 0:
            raise ValueError("tolerance must be >= 0")


@dataclass(frozen=True)
class LloydResult:
    centers: np.ndarray
    sse: float
    iterations: int
    converged: bool
    partition: Partition | None = None
    # Lloyd iterations summed over every pipeline that produced this result
    # (restarts, jumps); equals ``iterations`` for a single run.
    total_iterations: int | None = None
    # SSE after seeding followed by the SSE after each iteration
    history: tuple = ()

    @property
    def k(self) -> int:
        return self.centers.shape[0]


def update_centers(x: np.ndarray, centers: np.ndarray, part: Partition) -> np.ndarray:
    """Move every center to the mean of its Voronoi set.

    Empty centers are relocated, in ascending index order, onto the data
    point currently farthest from its nearest (already updated) center.
    """
    k, d = centers.shape
    counts = part.voronoi_count
    sums = np.zeros((k, d))
    np.add.at(sums, part.nearest_idx, x)
    new = centers.copy()
    filled = counts > 0
    new[filled] = sums[filled] / counts[filled, None]

    empty = np.flatnonzero(~filled)
    if empty.size:
        worst = sqdist_matrix(x, new[filled]).min(axis=1)
        for j in empty:
            idx = int(worst.argmax())
            new[j] = x[idx]
            dj = x - new[j]
            worst = np.minimum(worst, np.einsum("ij,ij->i", dj, dj))
    return new


def lloyd_iteration(data, centers, part: Partition | None = None):
    """One assignment + update pass.

    Returns ``(new_centers, new_partition, changed)`` where ``new_partition``
    is the assignment to ``new_centers`` and ``changed`` tells whether it
    differs from the assignment to ``centers``.
    """
    x = as_points(data)
    c = as_centers(centers, x.shape[1])
    if part is None:
        part = assign(x, c)
    new = update_centers(x, c, part)
    new_part = assign(x, new)
    changed = not np.array_equal(part.nearest_idx, new_part.nearest_idx)
    return new, new_part, changed


def run_lloyd(data, init, cfg: LloydConfig | None = None) -> LloydResult:
    """Iterate Lloyd steps until the assignment is stable.

    Stops on an unchanged assignment, on an SSE gain below ``cfg.tolerance``
    (if positive), or after ``cfg.max_iterations`` iterations.
    """
    cfg = cfg or LloydConfig()
    x = as_points(data)
    centers = as_centers(init, x.shape[1]).copy()
    part = assign(x, centers)
    phi = part.sse
    history = [phi]
    converged = False
    it = 0
    while it < cfg.max_iterations:
        centers, new_part, changed = lloyd_iteration(x, centers, part)
        it += 1
        new_phi = new_part.sse
        assert new_phi <= phi + _DESCENT_RTOL * max(phi, 1.0), (
            f"Lloyd SSE increased: {phi!r} -> {new_phi!r}"
        )
        gain = phi - new_phi
        part, phi = new_part, new_phi
        history.append(phi)
        if not changed or (cfg.tolerance > 0 and gain < cfg.tolerance):
            converged = True
            break
    return LloydResult(centers, phi, it, converged, part, it, tuple(history))


def seed_random(data, k: int, rng: np.random.Generator) -> np.ndarray:
    """Pick ``k`` distinct data points uniformly without replacement."""
    x = as_points(data)
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    idx = rng.choice(n, size=k, replace=False)
    return x[idx].copy()


def kmeans(data, k: int, rng: np.random.Generator, cfg: LloydConfig | None = None) -> LloydResult:
    """Plain k-means: random-from-data seeding followed by Lloyd."""
    return run_lloyd(data, seed_random(data, k, rng), cfg)
