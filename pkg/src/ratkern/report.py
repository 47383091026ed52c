"""Comparison tables in the layout of the published results.

Rows are Nearest, Linear, the per-image best cubic (annotated with its
``a02``) and any number of fixed-parameter kernels; columns are images.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .kernels import KernelSpec, build_kernel
from .reference import FIXED_KERNELS, IMAGE_NAMES, TABLES
from .resample import ImageF
from .sweep import _metric_fn, _reduced_corpus, _score, compute_baselines

__all__ = ["ReportRow", "build_report", "format_text", "format_csv", "published_row"]


@dataclass
class ReportRow:
    label: str
    key: str
    values: dict[str, float]
    annotations: dict[str, float] = field(default_factory=dict)


def build_report(
    corpus: Mapping[str, ImageF],
    metric: str = "psnr",
    kernels: Sequence[KernelSpec | str] = FIXED_KERNELS,
    *,
    quantize: bool = True,
    baselines: Mapping[str, Mapping[str, float]] | None = None,
    threads: int | None = None,
    **search_kw,
) -> list[ReportRow]:
    """Compute the table rows; ``baselines`` may be passed in to skip the cubic search."""
    if baselines is None:
        baselines = compute_baselines(corpus, metric, quantize=quantize, threads=threads, **search_kw)
    rows = [
        ReportRow("Nearest", "nearest", dict(baselines["nearest"])),
        ReportRow("Linear", "linear", dict(baselines["linear"])),
        ReportRow("S3 (best a02)", "best_cubic", dict(baselines["cubic"]), dict(baselines.get("cubic_a02", {}))),
    ]
    metric_fn = _metric_fn(metric)
    reduced = _reduced_corpus(corpus, quantize)
    for spec in kernels:
        spec = KernelSpec.parse(spec) if isinstance(spec, str) else spec
        values = _score(build_kernel(spec), corpus, reduced, metric_fn, quantize)
        rows.append(ReportRow(str(spec), str(spec), values))
    return rows


def _cell(row: ReportRow, name: str) -> str:
    v = row.values.get(name, math.nan)
    text = "inf" if math.isinf(v) else f"{v:.4f}"
    if name in row.annotations:
        text += f" ({row.annotations[name]:.3f})"
    return text


def format_text(rows: Sequence[ReportRow], names: Sequence[str]) -> str:
    """Aligned plain-text table, values to 4 decimals."""
    header = ["Images", *names]
    body = [[r.label, *(_cell(r, n) for n in names)] for r in rows]
    widths = [max(len(line[i]) for line in [header, *body]) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip() for line in [header, *body]]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def format_csv(rows: Sequence[ReportRow], names: Sequence[str]) -> str:
    """CSV with full-precision values and a separate a02 column per image for annotated rows."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", *names, *(f"{n}_a02" for n in names)])
    for r in rows:
        w.writerow(
            [r.key, *(repr(r.values.get(n, math.nan)) for n in names), *(repr(r.annotations[n]) if n in r.annotations else "" for n in names)]
        )
    return buf.getvalue()


def match_image_name(name: str) -> str | None:
    """Published image name matching a corpus file stem, ignoring case."""
    for ref in IMAGE_NAMES:
        if ref.lower() == name.lower():
            return ref
    return None


def published_row(metric: str, key: str, names: Sequence[str]) -> dict[str, float]:
    """Published values for the corpus images that carry a published name."""
    table = TABLES[metric]
    if key not in table:
        return {}
    out = {}
    for n in names:
        ref = match_image_name(n)
        if ref is not None:
            v = table[key][IMAGE_NAMES.index(ref)]
            out[n] = v[0] if isinstance(v, tuple) else v
    return out
