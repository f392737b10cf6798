"""k-means++ seeding with greedy candidate selection, and the restart wrapper."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import as_points, sqdist_matrix
from .kmeans import LloydConfig, LloydResult, run_lloyd


class DegenerateWeights(ValueError):
    """Every point coincides with a center, so D^2 sampling is undefined."""


def default_candidates(k: int) -> int:
    return 2 + int(math.log(k))


@dataclass(frozen=True)
class SeedingConfig:
    """k-means++ parameters.

    ``n_candidates=None`` resolves to ``2 + floor(ln k)``; 1 gives plain D^2
    sampling without the greedy step.
    """

    k: int
    n_candidates: int | None = None
    restarts: int = 10

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.n_candidates is None:
            object.__setattr__(self, "n_candidates", default_candidates(self.k))
        if self.n_candidates < 1:
            raise ValueError("n_candidates must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


def _normalize(closest: np.ndarray) -> np.ndarray:
    total = closest.sum()
    if not total > 0:
        raise DegenerateWeights("all points coincide with a center")
    return closest / total


def d2_weights(data, centers) -> np.ndarray:
    """Probability of each point under D^2 sampling w.r.t. ``centers``."""
    closest = sqdist_matrix(as_points(data), centers).min(axis=1)
    return _normalize(closest)


def seed_kmpp(data, cfg: SeedingConfig, rng: np.random.Generator) -> np.ndarray:
    """Place ``cfg.k`` seeds on data points by greedy D^2 sampling.

    Each insertion draws ``n_candidates`` points (with replacement) from the
    D^2 distribution and keeps the one giving the lowest total SSE.
    """
    x = as_points(data)
    n = x.shape[0]
    k = cfg.k
    if k > n:
        raise ValueError(f"k={k} exceeds the number of points n={n}")
    idx = np.empty(k, dtype=np.intp)
    idx[0] = rng.integers(n)
    closest = sqdist_matrix(x, x[idx[:1]])[:, 0]

    for i in range(1, k):
        try:
            probs = _normalize(closest)
        except DegenerateWeights:
            probs = None
        cand = rng.choice(n, size=cfg.n_candidates, replace=True, p=probs)
        cand_d2 = sqdist_matrix(x, x[cand])
        np.minimum(cand_d2, closest[:, None], out=cand_d2)
        pots = cand_d2.sum(axis=0)
        best = int(pots.argmin())
        # greedy choice never loses against the first (pure D^2) candidate
        assert pots[best] <= pots[0]
        idx[i] = cand[best]
        closest = cand_d2[:, best]
    return x[idx].copy()


def kmpp(
    data,
    cfg: SeedingConfig,
    lloyd_cfg: LloydConfig | None = None,
    rng: np.random.Generator | None = None,
) -> LloydResult:
    """Best of ``cfg.restarts`` k-means++ pipelines (seeding + Lloyd).

    ``total_iterations`` on the returned result counts Lloyd iterations over
    all restarts.
    """
    rng = rng if rng is not None else np.random.default_rng()
    streams = rng.spawn(cfg.restarts)
    best = None
    total = 0
    for stream in streams:
        res = run_lloyd(data, seed_kmpp(data, cfg, stream), lloyd_cfg)
        total += res.iterations
        if best is None or res.sse < best.sse:
            best = res
    return replace(best, total_iterations=total)
