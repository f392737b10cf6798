"""CSV ingestion, standardization, and dataset / report persistence.

Datasets are stored as CSV with ``.17g`` decimal text, which round-trips
float64 exactly. Run reports are JSON Lines, one object per run, with the
fields of :class:`RunReport`.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .core import Dataset


class FormatError(ValueError):
    """A file could not be parsed; the message names the location."""


@dataclass
class RunReport:
    dataset: str
    algorithm: str
    k: int
    seed: int
    sse: float
    iterations_lloyd: int
    jumps_attempted: int = 0
    jumps_accepted: int = 0
    retries_used: int = 0
    wall_time_ms: float = 0.0
    run: int = 0

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        names = {f.name for f in fields(cls)}
        missing = {"dataset", "algorithm", "k", "seed", "sse", "iterations_lloyd"} - d.keys()
        if missing:
            raise FormatError(f"report record lacks fields {sorted(missing)}")
        return cls(**{k: v for k, v in d.items() if k in names})


@dataclass(frozen=True)
class ScalerParams:
    mean: np.ndarray
    std: np.ndarray
    kept: np.ndarray  # indices of the input columns that were retained


def _parse_float(text: str, where: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise FormatError(f"{where}: not a number: {text!r}") from None
    if not math.isfinite(v):
        raise FormatError(f"{where}: non-finite value {text!r}")
    return v


def load_csv(path, delimiter: str = ",", header: bool = False, columns=None,
             comment: str | None = None, name: str | None = None) -> Dataset:
    """Read a numeric CSV file into a Dataset.

    ``columns`` selects (and orders) columns by index, or by name when a
    header is present. Rows keep file order; malformed input raises
    :class:`FormatError` naming the row and column.
    """
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"{path}: cannot read ({exc.strerror})") from exc
    with fh:
        lines = (ln for ln in fh if not (comment and ln.lstrip().startswith(comment)))
        rows = [r for r in csv.reader(lines, delimiter=delimiter) if r]

    names = None
    if header:
        if not rows:
            raise FormatError(f"{path}: empty file")
        names = [h.strip() for h in rows.pop(0)]
    if not rows:
        raise FormatError(f"{path}: no data rows")

    width = len(rows[0])
    if columns is None:
        sel = list(range(width))
    else:
        sel = []
        for c in columns:
            if isinstance(c, str) and not c.lstrip("-").isdigit():
                if names is None or c not in names:
                    raise FormatError(f"{path}: unknown column {c!r}")
                sel.append(names.index(c))
            else:
                sel.append(int(c))
        bad = [c for c in sel if not 0 <= c < width]
        if bad:
            raise FormatError(f"{path}: column index {bad[0]} out of range (width {width})")

    first = 2 if header else 1
    out = np.empty((len(rows), len(sel)))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise FormatError(f"{path}: row {i + first} has {len(row)} fields, expected {width}")
        for j, c in enumerate(sel):
            out[i, j] = _parse_float(row[c], f"{path}: row {i + first}, column {c + 1}")
    return Dataset(out, name=name or path.stem)


def standardize(data: Dataset, drop_constant: bool = False):
    """Shift each column to mean 0 and scale to population std 1.

    Constant columns raise unless ``drop_constant`` is set, in which case
    they are removed.
    """
    x = data.points
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    const = ~(std > 0)
    if const.any() and not drop_constant:
        raise ValueError(f"zero-variance columns: {np.flatnonzero(const).tolist()}")
    kept = np.flatnonzero(~const)
    if kept.size == 0:
        raise ValueError("every column is constant")
    z = (x[:, kept] - mean[kept]) / std[kept]
    params = ScalerParams(mean[kept], std[kept], kept)
    return Dataset(z, name=data.name, meta={**data.meta, "standardized": True}), params


def save_dataset(data: Dataset, path) -> None:
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# dataset: {data.name}; n={data.n}; d={data.d}\n")
            for row in data.points:
                fh.write(",".join(format(v, ".17g") for v in row) + "\n")
    except OSError as exc:
        raise OSError(f"{path}: cannot write dataset ({exc.strerror})") from exc


def load_dataset(path) -> Dataset:
    path = Path(path)
    name = path.stem
    try:
        with open(path, encoding="utf-8") as fh:
            first = fh.readline()
    except OSError as exc:
        raise FormatError(f"{path}: cannot read ({exc.strerror})") from exc
    expect = {}
    if first.startswith("# dataset:"):
        name, *tags = [t.strip() for t in first.split(":", 1)[1].split(";")]
        for tag in tags:
            key, _, val = tag.partition("=")
            try:
                expect[key] = int(val)
            except ValueError:
                raise FormatError(f"{path}: malformed header tag {tag!r}") from None
    data = load_csv(path, comment="#", name=name)
    for key, got in (("n", data.n), ("d", data.d)):
        if key in expect and expect[key] != got:
            raise FormatError(f"{path}: header says {key}={expect[key]}, file has {got}")
    return data


def save_reports(reports, path) -> None:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for r in reports:
            fh.write(json.dumps(asdict(r)) + "\n")


def load_reports(path) -> list:
    path = Path(path)
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}: line {lineno}: {exc.msg}") from None
            if not isinstance(rec, dict):
                raise FormatError(f"{path}: line {lineno}: expected an object")
            try:
                out.append(RunReport.from_dict(rec))
            except FormatError as exc:
                raise FormatError(f"{path}: line {lineno}: {exc}") from None
    return out
