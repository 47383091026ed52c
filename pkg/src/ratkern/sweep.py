"""Parameter sweeps over the rational kernel families.

A sweep runs the reduce-then-magnify experiment for every parameter triple
on a grid and every image of a corpus, stores one checkpoint row per
(triple, image), and afterwards normalizes each image's values onto
``[0, 1]`` and averages them per triple.  Helpers pick out the triples that
beat the classical baselines and fit a plane through them.
"""

from __future__ import annotations

import csv
import itertools
import json
import logging
import math
import os
import sys
import threading
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from .exceptions import MissingInput, ParseError, RankDeficient, RatkernError
from .imageio import read_image
from .kernels import Family, KernelSpec, build_kernel
from .metrics import METRICS, normalize_unity
from .resample import ImageF, magnify_image, reduce_image

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

log = logging.getLogger(__name__)

__all__ = [
    "SweepRecord",
    "PlaneFit",
    "PlaneRegressor",
    "SweepConfig",
    "grid_axis",
    "grid_triples",
    "load_corpus",
    "worker_count",
    "grid_sweep",
    "best_cubic_search",
    "compute_baselines",
    "better_than_baselines",
    "fit_plane",
    "plane_point",
    "load_config",
    "run_sweep",
]

SWEEP_FAMILIES = (Family.S41V4, Family.S41V5)
QUALIFY_RULES = ("per-image-all", "mean-normalized")
IMAGE_SUFFIXES = (".pgm", ".png", ".tif", ".tiff", ".bmp")
_CHECKPOINT_FIELDS = ("a01", "a02", "a03", "image", "value", "error")


Triple = tuple[float, float, float]


@dataclass
class SweepRecord:
    """Results for one parameter triple.

    ``per_image`` holds raw metric values, ``normalized`` the per-image
    unity-normalized values and ``normalized_mean`` their average.  Cells
    that raised are listed in ``errors`` and left out of both.
    """

    params: Triple
    per_image: dict[str, float] = field(default_factory=dict)
    normalized: dict[str, float] = field(default_factory=dict)
    normalized_mean: float = math.nan
    errors: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class PlaneFit:
    """Least-squares plane ``a03 = c0 + c1 * a01 + c2 * a02``."""

    c0: float
    c1: float
    c2: float
    rms_residual: float
    point_count: int

    def to_dict(self) -> dict:
        return {
            "c0": self.c0,
            "c1": self.c1,
            "c2": self.c2,
            "rms_residual": self.rms_residual,
            "point_count": self.point_count,
            "equation": f"a03 = {self.c0:.4f} {self.c1:+.4f}*a01 {self.c2:+.4f}*a02",
        }


# ---------------------------------------------------------------------------
# grids and corpora


def grid_axis(lo: float, hi: float, step: float) -> list[float]:
    """Inclusive grid ``lo + k * step`` for integer ``k`` while it stays <= ``hi``."""
    if step <= 0:
        raise ValueError("step must be positive")
    if hi < lo:
        raise ValueError(f"empty range [{lo}, {hi}]")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + k * step for k in range(n)]


def grid_triples(ranges: Mapping[str, Sequence[float]], step: float | Mapping[str, float]) -> list[Triple]:
    """All triples of the (a01, a02, a03) grid in lexicographic order."""
    steps = step if isinstance(step, Mapping) else {k: step for k in ("a01", "a02", "a03")}
    axes = [grid_axis(*ranges[k], steps[k]) for k in ("a01", "a02", "a03")]
    return list(itertools.product(*axes))


def load_corpus(directory: str | Path) -> dict[str, ImageF]:
    """Read every image in ``directory``, keyed by file stem, in sorted order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise MissingInput(f"corpus directory not found: {directory}")
    files = sorted(p for p in directory.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    if not files:
        raise MissingInput(f"no images in {directory}")
    return {p.stem: read_image(p) for p in files}


def worker_count(threads: int | None = None) -> int:
    """Worker pool size: ``threads``, else ``RATKERN_THREADS``, else the CPU count."""
    if threads is None:
        env = os.environ.get("RATKERN_THREADS")
        if env:
            try:
                threads = int(env)
            except ValueError:
                raise ParseError(f"RATKERN_THREADS must be an integer, got {env!r}") from None
        else:
            threads = os.cpu_count() or 1
    return max(1, int(threads))


def _metric_fn(metric: str | Callable) -> Callable[[ImageF, ImageF], float]:
    if callable(metric):
        return metric
    try:
        return METRICS[metric]
    except KeyError:
        raise ValueError(f"unknown metric {metric!r}; choose from {sorted(METRICS)}") from None


def _reduced_corpus(corpus: Mapping[str, ImageF], quantize: bool) -> dict[str, ImageF]:
    # The reduction stage does not depend on the magnification kernel.
    return {name: reduce_image(img, 4, quantize) for name, img in corpus.items()}


def _score(kernel, corpus, reduced, metric, quantize) -> dict[str, float]:
    return {name: metric(corpus[name], magnify_image(reduced[name], kernel, 4, quantize)) for name in corpus}


# ---------------------------------------------------------------------------
# checkpoint file


def _read_checkpoint(path: Path) -> dict[tuple[Triple, str], tuple[float, str]]:
    done: dict[tuple[Triple, str], tuple[float, str]] = {}
    if not path.exists():
        return done
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return done
        if tuple(reader.fieldnames) != _CHECKPOINT_FIELDS:
            raise ParseError(f"{path}: unexpected checkpoint header {reader.fieldnames}")
        for row in reader:
            try:
                triple = (float(row["a01"]), float(row["a02"]), float(row["a03"]))
                value = float(row["value"]) if row["value"] else math.nan
            except (TypeError, ValueError):
                # A torn final line from an interrupted write; the cell is simply redone.
                continue
            done[(triple, row["image"])] = (value, row["error"] or "")
    return done


class _CheckpointWriter:
    """Append-only CSV writer shared by the worker threads."""

    def __init__(self, path: Path):
        self._lock = threading.Lock()
        new = not path.exists() or path.stat().st_size == 0
        if not new:
            with open(path, "rb") as fh:
                fh.seek(-1, os.SEEK_END)
                if fh.read(1) != b"\n":
                    # Drop a partial last line left by an interrupted run.
                    data = path.read_bytes()
                    path.write_bytes(data[: data.rfind(b"\n") + 1])
        self._fh = open(path, "a", newline="")
        self._writer = csv.writer(self._fh, lineterminator="\n")
        if new:
            self._writer.writerow(_CHECKPOINT_FIELDS)
            self._fh.flush()

    def write_cell(self, triple: Triple, results: Mapping[str, tuple[float, str]]) -> None:
        with self._lock:
            for name, (value, err) in results.items():
                self._writer.writerow([repr(triple[0]), repr(triple[1]), repr(triple[2]), name, "" if err else repr(value), err])
            self._fh.flush()

    def close(self) -> None:
        self._fh.close()


# ---------------------------------------------------------------------------
# sweeps


def grid_sweep(
    corpus: Mapping[str, ImageF],
    family: Family | str,
    ranges: Mapping[str, Sequence[float]] | None = None,
    step: float | Mapping[str, float] = 1.0,
    metric: str | Callable = "psnr",
    *,
    triples: Iterable[Triple] | None = None,
    quantize: bool = True,
    checkpoint: str | Path | None = None,
    threads: int | None = None,
    max_cells: int | None = None,
) -> list[SweepRecord]:
    """Evaluate every grid triple on every corpus image.

    Parameters
    ----------
    corpus : mapping of image id to ImageF
    family : {"s41v4", "s41v5"}
    ranges : mapping with keys "a01", "a02", "a03" -> (lo, hi)
        Inclusive parameter ranges; ignored when ``triples`` is given.
    step : float or mapping
        Grid step, shared or per parameter.
    metric : {"psnr", "ssim", "fsim"} or callable
    triples : iterable of triples, optional
        Explicit parameter list instead of a grid.
    quantize : bool, default True
        Emulate 8-bit storage between pipeline stages.
    checkpoint : path, optional
        Append-only CSV; cells already present are not recomputed.
    threads : int, optional
        Worker count; defaults to ``RATKERN_THREADS`` or the CPU count.
    max_cells : int, optional
        Stop after computing this many new triples (the rest can be resumed).

    Returns
    -------
    list of SweepRecord
        In lexicographic order of the triple, normalized across the triples
        that have results so far.
    """
    family = Family(family)
    if family not in SWEEP_FAMILIES:
        raise ValueError(f"sweeps are defined for {[f.value for f in SWEEP_FAMILIES]}, got {family.value}")
    if not corpus:
        raise ValueError("corpus is empty")
    if triples is None:
        if ranges is None:
            raise ValueError("either ranges or triples is required")
        triples = grid_triples(ranges, step)
    triples = sorted({tuple(float(v) for v in t) for t in triples})
    metric_fn = _metric_fn(metric)

    done: dict[tuple[Triple, str], tuple[float, str]] = {}
    writer = None
    if checkpoint is not None:
        checkpoint = Path(checkpoint)
        done = _read_checkpoint(checkpoint)
    names = list(corpus)
    todo = [t for t in triples if any((t, n) not in done for n in names)]
    if max_cells is not None:
        todo = todo[: max(0, max_cells)]

    if todo:
        reduced = _reduced_corpus(corpus, quantize)
        if checkpoint is not None:
            writer = _CheckpointWriter(checkpoint)

        def run(triple: Triple) -> tuple[Triple, dict[str, tuple[float, str]]]:
            spec = KernelSpec(family, triple)
            results: dict[str, tuple[float, str]] = {}
            try:
                kernel = build_kernel(spec)
            except RatkernError as exc:
                results = {n: (math.nan, f"{type(exc).__name__}: {exc}") for n in names}
            else:
                for n in names:
                    if (triple, n) in done:
                        continue
                    try:
                        out = magnify_image(reduced[n], kernel, 4, quantize)
                        results[n] = (float(metric_fn(corpus[n], out)), "")
                    except (RatkernError, ValueError, FloatingPointError) as exc:
                        results[n] = (math.nan, f"{type(exc).__name__}: {exc}")
            results = {n: v for n, v in results.items() if (triple, n) not in done}
            if writer is not None:
                writer.write_cell(triple, results)
            return triple, results

        try:
            with ThreadPoolExecutor(max_workers=worker_count(threads)) as pool:
                for triple, results in pool.map(run, todo):
                    for n, v in results.items():
                        done[(triple, n)] = v
        finally:
            if writer is not None:
                writer.close()

    return _assemble(triples, names, done)


def _assemble(triples, names, done) -> list[SweepRecord]:
    records = []
    for t in triples:
        if not all((t, n) in done for n in names):
            continue
        rec = SweepRecord(params=t)
        for n in names:
            value, err = done[(t, n)]
            if err:
                rec.errors[n] = err
            else:
                rec.per_image[n] = value
        records.append(rec)
    normalize_records(records, names)
    return records


def normalize_records(records: Sequence[SweepRecord], names: Sequence[str]) -> None:
    """Unity-normalize each image's values across ``records`` and set the per-triple means."""
    for n in names:
        holders = [r for r in records if n in r.per_image and math.isfinite(r.per_image[n])]
        if not holders:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            norm = normalize_unity([r.per_image[n] for r in holders])
        for r, v in zip(holders, norm):
            r.normalized[n] = float(v)
    for r in records:
        r.normalized_mean = float(np.mean(list(r.normalized.values()))) if r.normalized else math.nan


def best_cubic_search(
    corpus: Mapping[str, ImageF],
    metric: str | Callable = "psnr",
    *,
    lo: float = -7.0,
    hi: float = 1.0,
    step: float = 0.005,
    quantize: bool = True,
    threads: int | None = None,
) -> dict[str, tuple[float, float, bool]]:
    """Per image, the cubic ``a02`` on the grid that maximizes the metric.

    Returns
    -------
    dict of image id -> (best a02, value, degenerate)
        Ties go to the smaller ``a02``; ``degenerate`` is True when every
        grid point gives the same value.
    """
    grid = grid_axis(lo, hi, step)
    metric_fn = _metric_fn(metric)
    reduced = _reduced_corpus(corpus, quantize)
    names = list(corpus)

    def run(a02):
        kernel = build_kernel(KernelSpec.of("cubic", a02=a02))
        return _score(kernel, corpus, reduced, metric_fn, quantize)

    with ThreadPoolExecutor(max_workers=worker_count(threads)) as pool:
        scores = list(pool.map(run, grid))
    out = {}
    for n in names:
        values = [s[n] for s in scores]
        best = 0
        for i, v in enumerate(values):
            if v > values[best]:
                best = i
        out[n] = (grid[best], values[best], min(values) == max(values))
    return out


def compute_baselines(
    corpus: Mapping[str, ImageF],
    metric: str | Callable = "psnr",
    *,
    quantize: bool = True,
    cubic_a02: float | None = None,
    threads: int | None = None,
    **search_kw,
) -> dict[str, dict[str, float]]:
    """Nearest, Linear and cubic baseline values per image.

    The cubic baseline is the per-image best ``a02`` unless ``cubic_a02``
    fixes it.  The chosen ``a02`` values are returned under ``"cubic_a02"``.
    """
    metric_fn = _metric_fn(metric)
    reduced = _reduced_corpus(corpus, quantize)
    out = {
        "nearest": _score(build_kernel("nearest"), corpus, reduced, metric_fn, quantize),
        "linear": _score(build_kernel("linear"), corpus, reduced, metric_fn, quantize),
    }
    if cubic_a02 is None:
        best = best_cubic_search(corpus, metric_fn, quantize=quantize, threads=threads, **search_kw)
        out["cubic"] = {n: v for n, (_, v, _) in best.items()}
        out["cubic_a02"] = {n: a for n, (a, _, _) in best.items()}
    else:
        kernel = build_kernel(KernelSpec.of("cubic", a02=cubic_a02))
        out["cubic"] = _score(kernel, corpus, reduced, metric_fn, quantize)
        out["cubic_a02"] = {n: float(cubic_a02) for n in corpus}
    return out


BASELINE_KEYS = ("nearest", "linear", "cubic")


def better_than_baselines(
    records: Sequence[SweepRecord],
    baselines: Mapping[str, Mapping[str, float]],
    rule: str = "per-image-all",
) -> list[Triple]:
    """Triples whose metric beats all three baselines.

    ``"per-image-all"`` requires a strict win over every baseline on every
    image.  ``"mean-normalized"`` compares the triple's normalized mean with
    each baseline's mean after normalizing the baseline values by the same
    per-image sweep ranges.
    """
    if rule not in QUALIFY_RULES:
        raise ValueError(f"rule must be one of {QUALIFY_RULES}")
    missing = [k for k in BASELINE_KEYS if k not in baselines]
    if missing:
        raise ValueError(f"baselines lack {missing}")
    out = []
    if rule == "per-image-all":
        for r in records:
            if r.errors or not r.per_image:
                continue
            if all(
                n in baselines[k] and r.per_image[n] > baselines[k][n]
                for n in r.per_image
                for k in BASELINE_KEYS
            ):
                out.append(r.params)
        return out

    names = sorted({n for r in records for n in r.per_image})
    span = {}
    for n in names:
        vals = [r.per_image[n] for r in records if n in r.per_image]
        span[n] = (min(vals), max(vals))

    def norm_mean(values: Mapping[str, float]) -> float:
        parts = []
        for n in names:
            lo, hi = span[n]
            parts.append(0.0 if hi == lo else (values[n] - lo) / (hi - lo))
        return float(np.mean(parts))

    base_means = [norm_mean(baselines[k]) for k in BASELINE_KEYS]
    for r in records:
        if not r.errors and r.normalized_mean > max(base_means):
            out.append(r.params)
    return out


# ---------------------------------------------------------------------------
# plane fitting


def fit_plane(points: Iterable[Sequence[float]]) -> PlaneFit:
    """Ordinary least squares of ``a03`` on ``(1, a01, a02)``."""
    pts = np.asarray(list(points), dtype=float)
    if pts.size == 0:
        pts = pts.reshape(0, 3)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError("points must be (a01, a02, a03) triples")
    if len(pts) < 3:
        raise RankDeficient(f"need at least 3 points, got {len(pts)}")
    design = np.column_stack([np.ones(len(pts)), pts[:, 0], pts[:, 1]])
    coef, _, rank, _ = np.linalg.lstsq(design, pts[:, 2], rcond=None)
    if rank < 3:
        raise RankDeficient("points are collinear in (a01, a02); the plane is not determined")
    resid = pts[:, 2] - design @ coef
    rms = float(np.sqrt(np.mean(resid**2)))
    return PlaneFit(float(coef[0]), float(coef[1]), float(coef[2]), rms, len(pts))


def plane_point(c: PlaneFit | Sequence[float], a01: float, a02: float) -> Triple:
    c0, c1, c2 = (c.c0, c.c1, c.c2) if isinstance(c, PlaneFit) else c
    return (a01, a02, c0 + c1 * a01 + c2 * a02)


class PlaneRegressor(RegressorMixin, BaseEstimator):
    """Estimator wrapper around :func:`fit_plane`.

    ``X`` has columns (a01, a02) and ``y`` is a03.
    """

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        self.plane_ = fit_plane(np.column_stack([X, y]))
        self.intercept_ = self.plane_.c0
        self.coef_ = np.array([self.plane_.c1, self.plane_.c2])
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        return self.intercept_ + X @ self.coef_


# ---------------------------------------------------------------------------
# configuration and file outputs


@dataclass
class SweepConfig:
    corpus: Path
    family: Family = Family.S41V4
    ranges: dict[str, tuple[float, float]] = field(
        default_factory=lambda: {"a01": (-0.9, 70.0), "a02": (-16.0, 45.0), "a03": (-150.0, -5.0)}
    )
    step: float | dict[str, float] = 1.0
    metric: str = "psnr"
    quantize: bool = True
    out: Path = Path("sweep-out")
    threads: int | None = None
    qualify_rule: str = "per-image-all"
    baseline_cubic_a02: float | None = None


def load_config(path: str | Path, **overrides) -> SweepConfig:
    """Read a TOML sweep configuration; ``overrides`` that are not None win."""
    path = Path(path)
    if not path.exists():
        raise MissingInput(f"config file not found: {path}")
    try:
        raw = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    raw.update({k: v for k, v in overrides.items() if v is not None})
    if "corpus" not in raw:
        raise ParseError(f"{path}: 'corpus' is required")
    base = path.parent
    cfg = SweepConfig(corpus=base / raw.pop("corpus"))
    if "family" in raw:
        cfg.family = Family(raw.pop("family"))
    if "ranges" in raw:
        ranges = raw.pop("ranges")
        try:
            cfg.ranges = {k: (float(ranges[k][0]), float(ranges[k][1])) for k in ("a01", "a02", "a03")}
        except (KeyError, TypeError, IndexError, ValueError):
            raise ParseError(f"{path}: ranges needs a01, a02, a03 = [lo, hi]") from None
    if "out" in raw:
        cfg.out = base / raw.pop("out")
    for key in ("step", "metric", "quantize", "threads", "qualify_rule", "baseline_cubic_a02"):
        if key in raw:
            setattr(cfg, key, raw.pop(key))
    if raw:
        raise ParseError(f"{path}: unknown keys {sorted(raw)}")
    if cfg.metric not in METRICS:
        raise ParseError(f"{path}: unknown metric {cfg.metric!r}")
    if cfg.qualify_rule not in QUALIFY_RULES:
        raise ParseError(f"{path}: qualify_rule must be one of {QUALIFY_RULES}")
    return cfg


def write_normalized(records: Sequence[SweepRecord], names: Sequence[str], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["a01", "a02", "a03", *names, "normalized_mean"])
        for r in records:
            w.writerow([*map(repr, r.params), *(repr(r.normalized.get(n, math.nan)) for n in names), repr(r.normalized_mean)])


def run_sweep(cfg: SweepConfig, *, max_cells: int | None = None) -> dict:
    """Run a configured sweep and write sweep.csv, normalized.csv, qualifying.csv and plane.json."""
    corpus = load_corpus(cfg.corpus)
    cfg.out.mkdir(parents=True, exist_ok=True)
    records = grid_sweep(
        corpus,
        cfg.family,
        cfg.ranges,
        cfg.step,
        cfg.metric,
        quantize=cfg.quantize,
        checkpoint=cfg.out / "sweep.csv",
        threads=cfg.threads,
        max_cells=max_cells,
    )
    names = list(corpus)
    write_normalized(records, names, cfg.out / "normalized.csv")
    baselines = compute_baselines(
        corpus, cfg.metric, quantize=cfg.quantize, cubic_a02=cfg.baseline_cubic_a02, threads=cfg.threads
    )
    qualifying = better_than_baselines(records, baselines, cfg.qualify_rule)
    with open(cfg.out / "qualifying.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["a01", "a02", "a03"])
        w.writerows([[repr(v) for v in t] for t in qualifying])
    summary: dict = {"family": cfg.family.value, "metric": cfg.metric, "quantize": cfg.quantize,
                     "cells": len(records), "qualifying": len(qualifying)}
    try:
        plane = fit_plane(qualifying)
        summary["plane"] = plane.to_dict()
    except RankDeficient as exc:
        summary["plane"] = None
        summary["plane_error"] = str(exc)
    (cfg.out / "plane.json").write_text(json.dumps(summary, indent=2) + "\n")
    return summary
