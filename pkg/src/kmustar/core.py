"""Geometric primitives shared by every clustering routine.

Centers are plain ``(k, d)`` float64 arrays (``CenterSet``); row order is the
center identity and decides ties. Distances are always squared Euclidean.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CenterSet = np.ndarray

# upper bound on elements of one (chunk, k, d) difference block
_CHUNK_ELEMS = 1 << 22


class DimensionError(ValueError):
    """Points and centers live in spaces of different dimension."""


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable ``n x d`` point collection.

    The coordinate array is copied on construction and marked read-only.
    """

    points: np.ndarray
    name: str = "data"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"dataset needs shape (n>=1, d>=1), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("dataset contains non-finite coordinates")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.name == other.name and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash((self.name, self.points.shape, self.points.tobytes()))


@dataclass(frozen=True, eq=False)
class Partition:
    """Nearest / runner-up assignment of every point plus Voronoi aggregates.

    With a single center the runner-up fields are absent: ``second_idx`` is -1
    and ``second_sqdist`` is ``inf``.
    """

    nearest_idx: np.ndarray
    nearest_sqdist: np.ndarray
    second_idx: np.ndarray
    second_sqdist: np.ndarray
    voronoi_sse: np.ndarray
    voronoi_count: np.ndarray

    @property
    def k(self) -> int:
        return self.voronoi_sse.shape[0]

    @property
    def sse(self) -> float:
        return float(self.nearest_sqdist.sum())

    @property
    def has_second(self) -> bool:
        return self.k >= 2


def as_points(data) -> np.ndarray:
    """Return the ``(n, d)`` coordinate array of a Dataset or array-like."""
    if isinstance(data, Dataset):
        return data.points
    pts = np.asarray(data, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    return pts


def as_centers(centers, d: int | None = None) -> np.ndarray:
    c = np.asarray(centers, dtype=np.float64)
    if c.ndim == 1:
        # a bare 1-D sequence is k scalar centers unless d says otherwise
        c = c.reshape(-1, 1) if d in (None, 1) else c.reshape(1, -1)
    if c.ndim != 2 or c.shape[0] < 1:
        raise ValueError(f"centers need shape (k>=1, d), got {c.shape}")
    if d is not None and c.shape[1] != d:
        raise DimensionError(f"centers have dimension {c.shape[1]}, data has {d}")
    return c


def sqdist_matrix(points, centers) -> np.ndarray:
    """Exact pairwise squared distances, shape ``(n, k)``.

    Computed from coordinate differences rather than the norm expansion so
    that geometrically equal distances compare equal.
    """
    x = as_points(points)
    c = as_centers(centers, x.shape[1])
    n, d = x.shape
    k = c.shape[0]
    out = np.empty((n, k))
    step = max(1, _CHUNK_ELEMS // max(1, k * d))
    for lo in range(0, n, step):
        diff = x[lo:lo + step, None, :] - c[None, :, :]
        np.einsum("ijk,ijk->ij", diff, diff, out=out[lo:lo + step])
    return out


def assign(data, centers) -> Partition:
    """Map each point to its nearest center (lowest index wins ties)."""
    x = as_points(data)
    c = as_centers(centers, x.shape[1])
    k = c.shape[0]
    dist = sqdist_matrix(x, c)
    rows = np.arange(x.shape[0])
    near = dist.argmin(axis=1)
    a2 = dist[rows, near]
    if k >= 2:
        dist[rows, near] = np.inf
        second = dist.argmin(axis=1)
        b2 = dist[rows, second]
    else:
        second = np.full(x.shape[0], -1, dtype=np.intp)
        b2 = np.full(x.shape[0], np.inf)
    return Partition(
        nearest_idx=near,
        nearest_sqdist=a2,
        second_idx=second,
        second_sqdist=b2,
        voronoi_sse=np.bincount(near, weights=a2, minlength=k),
        voronoi_count=np.bincount(near, minlength=k),
    )


def sse(data, centers) -> float:
    """Summed squared error of ``data`` against its nearest centers."""
    x = as_points(data)
    return float(sqdist_matrix(x, centers).min(axis=1).sum())


def centroid(points) -> np.ndarray:
    pts = as_points(points)
    if pts.shape[0] == 0:
        raise ValueError("centroid of an empty point set is undefined")
    return pts.mean(axis=0)
