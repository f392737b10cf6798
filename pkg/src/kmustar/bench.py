"""Three-phase benchmark harness: k-means++, then k-means-u, then k-means-u*.

Every (k, run) cell draws its randomness from
``SeedSequence([seed, k, run])``, spawned into one child stream per phase,
so a single cell can be rerun in isolation.

Plan files are JSON::

    {
      "dataset": "grid-a",            # or {"kind": "gmm", "d": 5, ...}
                                      # or {"path": "x.csv", "scale": true}
      "k": [36, 72, 144],             # or {"start": 36, "stop": 360, "step": 36}
      "runs": 10,
      "retry_max": 2,
      "restarts": 10,
      "seed": 0,
      "epsilon": 0.01,
      "n_candidates": null,
      "max_iterations": 300
    }
"""

from __future__ import annotations

import csv
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import datagen
from .core import Dataset
from .io import RunReport, load_csv, load_dataset, standardize
from .jumps import JumpConfig, run_kms, run_kmu
from .kmeans import LloydConfig
from .seeding import SeedingConfig, kmpp

log = logging.getLogger(__name__)

SUMMARY_FIELDS = ("k", "algo", "mean_impr", "min_impr", "max_impr", "overhead_pct", "frac_improved")

# k grids used for the stock datasets; any list is accepted
SUGGESTED_K = {
    "grid-a": [9, 18, 36, 54, 72, 108, 144, 216, 288],
    "flat-b": [16, 36, 72, 144, 288, 432],
    "gmm": [10, 25, 50, 75, 100, 150, 200],
}


@dataclass
class ExperimentPlan:
    dataset: object = "grid-a"
    k: list = field(default_factory=lambda: [36])
    runs: int = 10
    retry_max: int = 2
    restarts: int = 10
    seed: int = 0
    epsilon: float = 0.01
    n_candidates: int | None = None
    max_iterations: int = 300

    def __post_init__(self):
        if isinstance(self.k, dict):
            self.k = list(range(self.k["start"], self.k["stop"] + 1, self.k.get("step", 1)))
        elif isinstance(self.k, int):
            self.k = [self.k]
        self.k = [int(k) for k in self.k]
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not self.k or min(self.k) < 1:
            raise ValueError("every k must be >= 1")

    @classmethod
    def from_file(cls, path) -> "ExperimentPlan":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"{path}: unknown plan fields {sorted(unknown)}")
        return cls(**raw)


@dataclass(frozen=True)
class KSummary:
    k: int
    algo: str
    mean_impr: float
    min_impr: float
    max_impr: float
    overhead_pct: float
    frac_improved: float


@dataclass
class ExperimentResult:
    reports: list
    summaries: list
    errors: list = field(default_factory=list)


def improvement_pct(phi_base: float, phi_new: float) -> float:
    """Percent SSE reduction of ``phi_new`` relative to ``phi_base``."""
    if phi_new > phi_base:
        raise RuntimeError(f"improved SSE {phi_new!r} exceeds baseline {phi_base!r}")
    if phi_base == 0:
        return 0.0
    if phi_base < 0:
        raise ValueError("baseline SSE must be > 0")
    return 100.0 * (phi_base - phi_new) / phi_base


def overhead_pct(extra_iterations: int, baseline_iterations: int) -> float:
    if baseline_iterations <= 0:
        raise ValueError("baseline iteration count must be > 0")
    return 100.0 * extra_iterations / baseline_iterations


def resolve_dataset(source, seed: int = 0) -> Dataset:
    """Build a Dataset from a plan/CLI source description."""
    if isinstance(source, Dataset):
        return source
    if isinstance(source, str):
        if source in ("grid-a", "flat-b", "oned", "gmm"):
            source = {"kind": source}
        else:
            source = {"path": source}
    src = dict(source)
    if "path" in src:
        path = src.pop("path")
        scale = src.pop("scale", False)
        if src.get("header") or src.get("columns") or src.get("delimiter"):
            data = load_csv(path, **src)
        else:
            data = load_dataset(path)
        if scale:
            data, _ = standardize(data, drop_constant=True)
        return data
    kind = src.pop("kind")
    if kind == "grid-a":
        return datagen.gen_grid(datagen.GridSpec(**src))
    if kind == "flat-b":
        return datagen.gen_uniform_grid(**src)
    if kind == "oned":
        return datagen.gen_1d(datagen.OneDSpec(**{"g": 50, "h": 20, **src}))
    if kind == "gmm":
        gseed = src.pop("seed", seed)
        return datagen.gen_mixture(datagen.MixtureSpec(**src), np.random.default_rng(gseed))
    raise ValueError(f"unknown dataset kind {kind!r}")


def cell_streams(seed: int, k: int, run: int, n: int = 3) -> list:
    """Independent generators for the phases of cell ``(k, run)``."""
    ss = np.random.SeedSequence([seed, k, run])
    return [np.random.default_rng(s) for s in ss.spawn(n)]


def run_cell(data: Dataset, k: int, run: int, plan: ExperimentPlan) -> list:
    """Run the three chained phases for one cell; returns three RunReports."""
    if k > data.n:
        raise ValueError(f"k={k} exceeds n={data.n}")
    r_pp, r_u, r_s = cell_streams(plan.seed, k, run)
    lloyd_cfg = LloydConfig(max_iterations=plan.max_iterations)
    seed_cfg = SeedingConfig(k, plan.n_candidates, plan.restarts)

    t0 = time.perf_counter()
    base = kmpp(data, seed_cfg, lloyd_cfg, r_pp)
    t1 = time.perf_counter()
    u, tr_u = run_kmu(data, base, lloyd_cfg, JumpConfig(plan.epsilon, 0), r_u)
    t2 = time.perf_counter()
    s, tr_s = run_kms(data, u, lloyd_cfg, JumpConfig(plan.epsilon, plan.retry_max), r_s)
    t3 = time.perf_counter()

    if tr_u.capped or tr_s.capped:
        log.warning("jump cap reached for k=%d run=%d", k, run)
    common = dict(dataset=data.name, k=k, seed=plan.seed, run=run)
    return [
        RunReport(algorithm="kmpp", sse=base.sse, iterations_lloyd=base.total_iterations,
                  wall_time_ms=1e3 * (t1 - t0), **common),
        RunReport(algorithm="kmu", sse=u.sse, iterations_lloyd=tr_u.lloyd_iterations,
                  jumps_attempted=tr_u.attempted, jumps_accepted=tr_u.accepted,
                  wall_time_ms=1e3 * (t2 - t1), **common),
        RunReport(algorithm="kms", sse=s.sse, iterations_lloyd=tr_s.lloyd_iterations,
                  jumps_attempted=tr_s.attempted, jumps_accepted=tr_s.accepted,
                  retries_used=tr_s.retries, wall_time_ms=1e3 * (t3 - t2), **common),
    ]


def _cell_job(args):
    data, k, run, plan = args
    try:
        return k, run, run_cell(data, k, run, plan), None
    except Exception as exc:  # reported per cell, the plan keeps going
        return k, run, [], f"k={k} run={run}: {exc}"


def summarize(reports) -> list:
    """Per-k aggregates of k-means-u and k-means-u* against the k-means++ baseline.

    Overhead for ``kms`` counts the Lloyd iterations of both jump phases,
    since it is chained after ``kmu``.
    """
    cells = {}
    for r in reports:
        cells.setdefault((r.k, r.run), {})[r.algorithm] = r
    by_k = {}
    for (k, run), cell in sorted(cells.items()):
        if not {"kmpp", "kmu", "kms"} <= cell.keys():
            continue
        by_k.setdefault(k, []).append(cell)

    out = []
    for k, cell_list in by_k.items():
        for algo in ("kmu", "kms"):
            impr, over, better = [], [], []
            for cell in cell_list:
                base = cell["kmpp"]
                extra = cell["kmu"].iterations_lloyd
                if algo == "kms":
                    extra += cell["kms"].iterations_lloyd
                impr.append(improvement_pct(base.sse, cell[algo].sse))
                over.append(overhead_pct(extra, base.iterations_lloyd))
                better.append(cell[algo].sse < base.sse)
            out.append(KSummary(k, algo, float(np.mean(impr)), float(min(impr)), float(max(impr)),
                                float(np.mean(over)), float(np.mean(better))))
    return out


def run_experiment(plan: ExperimentPlan, data: Dataset | None = None, jobs: int = 1) -> ExperimentResult:
    data = data if data is not None else resolve_dataset(plan.dataset, plan.seed)
    tasks = [(data, k, run, plan) for k in plan.k for run in range(plan.runs)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_cell_job, tasks))
    else:
        results = [_cell_job(t) for t in tasks]
    results.sort(key=lambda r: (r[0], r[1]))
    reports = [rep for _, _, reps, _ in results for rep in reps]
    errors = [err for _, _, _, err in results if err]
    for err in errors:
        log.error("cell failed: %s", err)
    return ExperimentResult(reports, summarize(reports), errors)


def write_summary(summaries, path_or_fh) -> None:
    """Write the long-format summary CSV (one row per k and algorithm)."""
    own = isinstance(path_or_fh, (str, Path))
    fh = open(path_or_fh, "w", newline="", encoding="utf-8") if own else path_or_fh
    try:
        w = csv.writer(fh)
        w.writerow(SUMMARY_FIELDS)
        for s in summaries:
            row = asdict(s)
            w.writerow([row["k"], row["algo"]] + [format(row[f], ".17g") for f in SUMMARY_FIELDS[2:]])
    finally:
        if own:
            fh.close()


def read_summary(path) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [KSummary(int(r["k"]), r["algo"], *(float(r[f]) for f in SUMMARY_FIELDS[2:])) for r in rows]


def write_plot_table(summaries, path_or_fh) -> None:
    """Wide CSV for charting: one row per k with mean/min/max per algorithm."""
    present = {s.algo for s in summaries}
    algos = [a for a in ("kmu", "kms") if a in present]
    table = {}
    for s in summaries:
        table.setdefault(s.k, {})[s.algo] = s
    cols = ["k"]
    for a in algos:
        cols += [f"{a}_mean", f"{a}_min", f"{a}_max", f"{a}_overhead", f"{a}_frac_improved"]
    own = isinstance(path_or_fh, (str, Path))
    fh = open(path_or_fh, "w", newline="", encoding="utf-8") if own else path_or_fh
    try:
        w = csv.writer(fh)
        w.writerow(cols)
        for k in sorted(table):
            row = [k]
            for a in algos:
                s = table[k].get(a)
                vals = (s.mean_impr, s.min_impr, s.max_impr, s.overhead_pct, s.frac_improved) if s else ("",) * 5
                row += [v if v == "" else format(v, ".6g") for v in vals]
            w.writerow(row)
    finally:
        if own:
            fh.close()
