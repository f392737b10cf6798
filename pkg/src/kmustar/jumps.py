"""Utility-driven non-local jumps: k-means-u and k-means-u*.

Starting from a converged Lloyd state, the least useful center (``lam``,
smallest SSE increase on removal) is moved next to the center with the
largest Voronoi error (``mu``). Both are displaced by a small random offset
in opposite directions and Lloyd is rerun. A jump is kept only if it strictly
lowers the SSE. k-means-u stops at the first failure; k-means-u* rewinds to
the best state and retries the jump with a fresh offset, up to ``retry_max``
times per error level.

Because both loops only ever return a configuration at least as good as
their input, any quality bound that holds for the input (e.g. the k-means++
expectation bound) carries over.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .core import Partition, as_centers, as_points, assign
from .kmeans import LloydConfig, LloydResult, run_lloyd

_MIN_NORM = 1e-12


@dataclass(frozen=True)
class JumpConfig:
    epsilon: float = 0.01
    retry_max: int = 2
    max_jumps: int | None = None  # None -> 10 * k

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if self.retry_max < 0:
            raise ValueError("retry_max must be >= 0")
        if self.max_jumps is not None and self.max_jumps < 1:
            raise ValueError("max_jumps must be >= 1")

    def jump_cap(self, k: int) -> int:
        return self.max_jumps if self.max_jumps is not None else 10 * k


@dataclass
class JumpRecord:
    jump: int
    lam: int
    mu: int
    offset: list
    sse_before: float
    sse_after: float
    accepted: bool
    retry: int


@dataclass
class JumpTrace:
    """Every attempted jump of one run, in order.

    ``sse_before`` of a record is the best SSE at the time of the attempt;
    ``lloyd_iterations`` counts the Lloyd iterations spent after jumps.
    """

    phi_init: float
    phi_best: float
    records: list = field(default_factory=list)
    lloyd_iterations: int = 0
    capped: bool = False

    @property
    def attempted(self) -> int:
        return len(self.records)

    @property
    def accepted(self) -> int:
        return sum(r.accepted for r in self.records)

    @property
    def retries(self) -> int:
        """Attempts made after a rewind (retry ordinal > 0)."""
        return sum(r.retry > 0 for r in self.records)

    def best_sequence(self) -> list:
        """phi_best after each accepted jump, starting from the input SSE."""
        return [self.phi_init] + [r.sse_after for r in self.records if r.accepted]

    def trailing_failures(self) -> int:
        count = 0
        for r in reversed(self.records):
            if r.accepted:
                break
            count += 1
        return count

    def to_jsonl(self, fh) -> None:
        for r in self.records:
            fh.write(json.dumps(asdict(r)) + "\n")

    @staticmethod
    def read_jsonl(fh) -> list:
        return [JumpRecord(**json.loads(line)) for line in fh if line.strip()]


class Jump(NamedTuple):
    centers: np.ndarray
    lam: int
    mu: int
    offset: np.ndarray


def utilities(data, centers, part: Partition | None = None) -> np.ndarray:
    """SSE increase caused by deleting each center.

    Uses the runner-up distances: a center's utility is the sum of
    ``b^2 - a^2`` over its Voronoi set.
    """
    x = as_points(data)
    c = as_centers(centers, x.shape[1])
    if c.shape[0] < 2:
        raise ValueError("utility needs at least two centers")
    if part is None:
        part = assign(x, c)
    gain = part.second_sqdist - part.nearest_sqdist
    return np.bincount(part.nearest_idx, weights=gain, minlength=c.shape[0])


def select_lambda(util) -> int:
    return int(np.argmin(util))


def select_mu(part: Partition) -> int:
    return int(np.argmax(part.voronoi_sse))


def select_pair(util, part: Partition) -> tuple[int, int]:
    """``(lam, mu)``; if they coincide the second least useful center is used."""
    mu = select_mu(part)
    lam = select_lambda(util)
    if lam == mu:
        order = np.argsort(util, kind="stable")
        lam = int(order[order != mu][0])
    return lam, mu


def unit_random_vector(d: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform direction on the unit sphere in R^d (normalized Gaussian)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    while True:
        v = rng.standard_normal(d)
        norm = np.sqrt(v @ v)
        if norm >= _MIN_NORM:
            return v / norm


def perform_jump(data, centers, part: Partition, cfg: JumpConfig, rng: np.random.Generator) -> Jump:
    """Move ``lam`` next to ``mu`` and push both apart along a random direction.

    The offset length is ``epsilon`` times the RMS distance of ``mu``'s
    Voronoi members to ``mu``.
    """
    x = as_points(data)
    c = as_centers(centers, x.shape[1])
    lam, mu = select_pair(utilities(x, c, part), part)
    count = part.voronoi_count[mu]
    if count == 0:
        raise RuntimeError(f"center {mu} has an empty Voronoi set")
    d_mu = np.sqrt(part.voronoi_sse[mu] / count)
    offset = cfg.epsilon * d_mu * unit_random_vector(x.shape[1], rng)
    new = c.copy()
    old_mu = c[mu]
    new[lam] = old_mu + offset
    new[mu] = old_mu - offset
    return Jump(new, lam, mu, offset)


def _start(data, init: LloydResult):
    x = as_points(data)
    part = init.partition if init.partition is not None else assign(x, init.centers)
    if init.partition is None:
        init = LloydResult(init.centers, part.sse, init.iterations, init.converged, part,
                           init.total_iterations, init.history)
    return x, init


def _stuck(x, best: LloydResult) -> bool:
    return best.k < 2 or best.k >= x.shape[0] or not np.any(best.partition.voronoi_sse > 0)


def _attempt(x, best, lloyd_cfg, cfg, rng, trace, retry):
    jump = perform_jump(x, best.centers, best.partition, cfg, rng)
    res = run_lloyd(x, jump.centers, lloyd_cfg)
    trace.lloyd_iterations += res.iterations
    accepted = res.sse < best.sse
    trace.records.append(JumpRecord(
        jump=len(trace.records), lam=jump.lam, mu=jump.mu,
        offset=jump.offset.tolist(), sse_before=best.sse, sse_after=res.sse,
        accepted=accepted, retry=retry,
    ))
    return res, accepted


def run_kmu(
    data,
    init: LloydResult,
    lloyd_cfg: LloydConfig | None = None,
    cfg: JumpConfig | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[LloydResult, JumpTrace]:
    """k-means-u: jump until the first jump that does not lower the SSE.

    ``cfg.retry_max`` is ignored. Returns the best Lloyd state (``init``
    itself if no jump helped) and the jump trace.
    """
    cfg = cfg or JumpConfig()
    rng = rng if rng is not None else np.random.default_rng()
    x, best = _start(data, init)
    trace = JumpTrace(best.sse, best.sse)
    cap = cfg.jump_cap(best.k)
    while not _stuck(x, best):
        if trace.attempted >= cap:
            trace.capped = True
            break
        res, accepted = _attempt(x, best, lloyd_cfg, cfg, rng, trace, 0)
        if not accepted:
            break
        best = res
    trace.phi_best = best.sse
    return best, trace


def run_kms(
    data,
    init: LloydResult,
    lloyd_cfg: LloydConfig | None = None,
    cfg: JumpConfig | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[LloydResult, JumpTrace]:
    """k-means-u*: k-means-u with greedy retries.

    After a failed jump the state is rewound to the best configuration and
    the jump is retried with a new random offset. Any improvement resets the
    retry counter; the run ends after ``retry_max + 1`` consecutive failures.
    """
    cfg = cfg or JumpConfig()
    rng = rng if rng is not None else np.random.default_rng()
    x, best = _start(data, init)
    trace = JumpTrace(best.sse, best.sse)
    cap = cfg.jump_cap(best.k)
    retry = 0
    while retry <= cfg.retry_max and not _stuck(x, best):
        if trace.attempted >= cap:
            trace.capped = True
            break
        res, accepted = _attempt(x, best, lloyd_cfg, cfg, rng, trace, retry)
        if accepted:
            best = res
            retry = 0
        else:
            # rewind: the next attempt starts again from ``best``
            retry += 1
    trace.phi_best = best.sse
    return best, trace
