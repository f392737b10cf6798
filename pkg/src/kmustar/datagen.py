"""Synthetic benchmark datasets and closed-form seeding probabilities.

Dataset A is a 6x6 arrangement of square clusters, each a 6x6 lattice with
pitch 1/72, cluster centers 1/6 apart on the unit square. With this
geometry one center per cluster gives SSE 36*210/72^2 = 1.458333 and four
centers per cluster (one per 3x3 quadrant) give 36*48/72^2 = 0.333333.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset


@dataclass(frozen=True)
class GridSpec:
    clusters_per_side: int = 6
    points_per_side: int = 6
    intra_spacing: float = 1 / 72
    cluster_pitch: float = 1 / 6

    def __post_init__(self):
        if min(self.clusters_per_side, self.points_per_side) < 1:
            raise ValueError("grid counts must be >= 1")
        if not (self.intra_spacing > 0 and self.cluster_pitch > 0):
            raise ValueError("grid spacings must be > 0")
        width = (self.points_per_side - 1) * self.intra_spacing
        if width >= self.cluster_pitch:
            raise ValueError(f"cluster width {width} does not fit pitch {self.cluster_pitch}")


@dataclass(frozen=True)
class OneDSpec:
    g: int
    h: int
    a: float = 1.0
    eta: float = 10.0

    def __post_init__(self):
        if self.g < 1 or self.h < 1:
            raise ValueError("g and h must be >= 1")
        if not (self.a > 0 and self.eta > 0):
            raise ValueError("a and eta must be > 0")


@dataclass(frozen=True)
class MixtureSpec:
    d: int = 5
    g: int = 50
    sigma: float = 1e-5
    n: int = 2000

    def __post_init__(self):
        if min(self.d, self.g, self.n) < 1:
            raise ValueError("d, g and n must be >= 1")
        if not self.sigma > 0:
            raise ValueError("sigma must be > 0")


def _grid_axis(spec: GridSpec) -> np.ndarray:
    """1-D coordinates of one row of the grid, sorted."""
    p = spec.points_per_side
    local = (np.arange(p) - (p - 1) / 2) * spec.intra_spacing
    mids = (np.arange(spec.clusters_per_side) + 0.5) * spec.cluster_pitch
    return (mids[:, None] + local[None, :]).ravel()


def gen_grid(spec: GridSpec | None = None, name: str = "grid-a") -> Dataset:
    spec = spec or GridSpec()
    axis = _grid_axis(spec)
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    return Dataset(pts, name=name, meta={"generator": "grid", **spec.__dict__})


def grid_block_centers(spec: GridSpec | None = None, split: int = 1) -> np.ndarray:
    """Centroids of each cluster cut into ``split x split`` equal blocks.

    ``split=1`` is the one-center-per-cluster optimum, ``split=2`` the
    four-per-cluster one.
    """
    spec = spec or GridSpec()
    p = spec.points_per_side
    if split < 1 or p % split:
        raise ValueError(f"points_per_side={p} is not divisible by split={split}")
    axis = _grid_axis(spec).reshape(spec.clusters_per_side * split, p // split)
    mids = axis.mean(axis=1)
    xx, yy = np.meshgrid(mids, mids, indexing="ij")
    return np.column_stack([xx.ravel(), yy.ravel()])


def gen_uniform_grid(n_side: int = 36, name: str = "flat-b") -> Dataset:
    """Dataset B: an ``n_side x n_side`` lattice with pitch ``1/n_side``."""
    if n_side < 1:
        raise ValueError("n_side must be >= 1")
    axis = np.arange(n_side) / n_side
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    return Dataset(np.column_stack([xx.ravel(), yy.ravel()]), name=name,
                   meta={"generator": "uniform-grid", "n_side": n_side})


def gen_1d(spec: OneDSpec, name: str = "oned") -> Dataset:
    """``g`` segments of length ``a`` holding ``h`` evenly spaced points each,
    separated by gaps of ``a * eta``."""
    starts = np.arange(spec.g) * spec.a * (1 + spec.eta)
    if spec.h == 1:
        local = np.zeros(1)
    else:
        local = np.linspace(0.0, spec.a, spec.h)
    pts = (starts[:, None] + local[None, :]).ravel()
    return Dataset(pts[:, None], name=name, meta={"generator": "oned", **spec.__dict__})


def gen_mixture(spec: MixtureSpec, rng: np.random.Generator, name: str = "gmm") -> Dataset:
    means = rng.uniform(0.0, 1.0, size=(spec.g, spec.d))
    comp = rng.integers(spec.g, size=spec.n)
    pts = means[comp] + rng.normal(0.0, spec.sigma, size=(spec.n, spec.d))
    return Dataset(pts, name=name, meta={"generator": "mixture", **spec.__dict__,
                                         "components": comp.tolist()})


# -- closed-form analysis of D^2 seeding on the 1-D cluster chain ----------

def f_one(a: float = 1.0) -> float:
    """Integrated squared distance over a segment of length ``a`` with one
    center in the middle."""
    return a ** 3 / 12


def f_two(a: float = 1.0) -> float:
    """Same, with two centers at 25% and 75% of the segment."""
    return a ** 3 / 48


def f_ratio() -> float:
    return f_one(1.0) / f_two(1.0)


def pf_wrong_seeding(i: int, g: int, eta: float) -> float:
    """Upper bound on the chance that the next D^2 seed lands in one of the
    ``i`` already covered clusters (out of ``g``)."""
    if not 1 <= i < g:
        raise ValueError(f"need 1 <= i < g, got i={i}, g={g}")
    if not eta > 0:
        raise ValueError("eta must be > 0")
    return 1.0 / (1.0 + 12.0 * (g / i - 1.0) * eta ** 2)


def pcorr_step(i: int, g: int) -> float:
    """Chance that, with ``i`` of ``g`` clusters doubly covered, the next
    seed goes to a singly covered one."""
    return (g - i) / (g - 0.75 * i)


def pcorr(g: int) -> float:
    """Chance that seeds ``g+1 .. 2g`` all land in distinct clusters."""
    if g < 1:
        raise ValueError("g must be >= 1")
    return float(np.prod([pcorr_step(i, g) for i in range(1, g)]))
