"""Command-line interface: ``ratkern <subcommand> ...``.

Every failure is reported as a one-line JSON object on stderr together with
a nonzero exit status.  Inputs are validated before anything is written.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .exceptions import MissingInput, ParseError, RatkernError
from .imageio import read_image, write_image
from .kernels import Family, KernelSpec, build_kernel, kernel_catalog
from .metrics import METRICS, MetricReport, evaluate_all
from .reference import FIXED_KERNELS
from .resample import experiment_pipeline, resize
from .sweep import fit_plane, load_config, load_corpus, run_sweep
from .verify import format_report_table, property_report

# Kernel parameterizations summarized by ``verify`` when no spec is given.
DEFAULT_VERIFY = (
    "nearest",
    "linear",
    "s2",
    "cubic:a02=-2.5",
    "cubicalt:a02=-2.5",
    "s4:a02=-2.5,a03=1.5",
    "s31:a01=1",
    "s41v1:a01=1,a02=-2",
    "s41v2:a01=1,a02=-2",
    "s41v3:a02=-2",
    "s41v4:a01=30,a02=20,a03=-121.5512",
    "s41v5:a01=30,a02=10,a03=-90.1572",
)


class CliError(RatkernError):
    pass


def _json_default(o):
    if isinstance(o, float) and math.isinf(o):
        return "inf"
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _dumps(obj) -> str:
    def clean(x):
        if isinstance(x, float) and not math.isfinite(x):
            return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
        if isinstance(x, dict):
            return {k: clean(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [clean(v) for v in x]
        return x

    return json.dumps(clean(obj), indent=2, default=_json_default)


def _spec(text: str) -> KernelSpec:
    return KernelSpec.parse(text)


def _parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise ParseError(f"range must look like lo:hi, got {text!r}") from None
    if hi < lo:
        raise ParseError(f"empty range {text!r}")
    return lo, hi


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_kernel_list(args) -> int:
    catalog = kernel_catalog()
    if args.json:
        _emit(_dumps(catalog) + "\n", args.out)
        return 0
    lines = [f"{'family':<9} {'parameters':<16} {'continuity':<10} {'order':<5} domain"]
    for row in catalog:
        domain = "; ".join(row["domain"].values()) or "-"
        lines.append(
            f"{row['family']:<9} {','.join(row['parameters']) or '-':<16} {row['continuity']:<10} "
            f"{row['max_approximation_order']!s:<5} {domain}"
        )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_kernel_eval(args) -> int:
    spec = _spec(args.spec)
    kernel = build_kernel(spec)
    lo, hi = _parse_range(args.range)
    if args.samples < 1:
        raise ParseError("--samples must be >= 1")
    ts = np.linspace(lo, hi, args.samples) if args.samples > 1 else np.array([lo])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "value", "derivative", "value_left", "value_right", "derivative_left", "derivative_right"])
    for t in ts:
        t = float(t)
        vl, vr = kernel.derivative(t, 0, "left"), kernel.derivative(t, 0, "right")
        dl, dr = kernel.derivative(t, args.order, "left"), kernel.derivative(t, args.order, "right")
        w.writerow([repr(t), repr(kernel.value(t)), repr(dr), repr(vl), repr(vr), repr(dl), repr(dr)])
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_verify(args) -> int:
    specs = args.specs or list(DEFAULT_VERIFY)
    reports = [property_report(_spec(s)) for s in specs]
    if args.json:
        _emit(_dumps([r.to_dict() for r in reports]) + "\n", args.out)
    else:
        _emit(format_report_table(reports) + "\n", args.out)
    return 0


def _target_size(image, size: str | None, factor: float | None) -> tuple[int, int]:
    if (size is None) == (factor is None):
        raise ParseError("give exactly one of --size HxW or --factor F")
    if size is not None:
        try:
            h, w = (int(v) for v in size.lower().split("x"))
        except ValueError:
            raise ParseError(f"--size must look like HxW, got {size!r}") from None
    else:
        if factor <= 0:
            raise ParseError("--factor must be positive")
        h, w = max(1, round(image.height * factor)), max(1, round(image.width * factor))
    if h < 1 or w < 1:
        raise ParseError("output size must be at least 1x1")
    return h, w


def cmd_resize(args) -> int:
    spec = _spec(args.kernel)
    image = read_image(args.input)
    h, w = _target_size(image, args.size, args.factor)
    out = resize(image, h, w, build_kernel(spec), args.antialias)
    write_image(out, args.output)
    return 0


def cmd_pipeline(args) -> int:
    spec = _spec(args.kernel)
    kernel = build_kernel(spec)
    image = read_image(args.input)
    reduced, magnified = experiment_pipeline(image, kernel, quantize=args.quantize)
    report = evaluate_all(image, magnified)
    out_dir = args.out or Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.input).stem
    ext = args.format
    write_image(reduced, out_dir / f"{stem}.reduced.{ext}")
    write_image(magnified, out_dir / f"{stem}.magnified.{ext}")
    payload = {"input": str(args.input), "kernel": str(spec), "quantize": args.quantize, **report.to_dict()}
    text = _dumps(payload) + "\n"
    (out_dir / f"{stem}.report.json").write_text(text)
    sys.stdout.write(text)
    return 0


def cmd_metrics(args) -> int:
    a, b = read_image(args.reference), read_image(args.test)
    if args.metric:
        values = {m: METRICS[m](a, b) for m in args.metric}
        text = _dumps(values)
    else:
        text = _dumps(evaluate_all(a, b).to_dict())
    _emit(text + "\n", args.out)
    return 0


def cmd_sweep(args) -> int:
    if args.config is None:
        raise ParseError("sweep requires --config <path>")
    cfg = load_config(args.config, metric=args.metric, quantize=args.quantize)
    if args.out is not None:
        cfg.out = args.out
    if args.threads is not None:
        cfg.threads = args.threads
    summary = run_sweep(cfg, max_cells=args.max_cells)
    sys.stdout.write(_dumps(summary) + "\n")
    return 0


def cmd_fit_plane(args) -> int:
    path = Path(args.points)
    if not path.exists():
        raise MissingInput(f"points file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        try:
            points = [(float(r["a01"]), float(r["a02"]), float(r["a03"])) for r in reader]
        except (KeyError, TypeError, ValueError):
            raise ParseError(f"{path}: expected columns a01, a02, a03") from None
    plane = fit_plane(points)
    _emit(_dumps(plane.to_dict()) + "\n", args.out)
    return 0


def cmd_report(args) -> int:
    from .report import build_report, format_csv, format_text, published_row

    if args.corpus is None:
        raise ParseError("report requires --corpus <dir>")
    specs = [_spec(s) for s in args.kernels] if args.kernels else list(FIXED_KERNELS)
    for s in specs:
        build_kernel(s)
    baselines = None
    if args.baselines is not None:
        if not args.baselines.exists():
            raise MissingInput(f"baselines file not found: {args.baselines}")
        baselines = json.loads(args.baselines.read_text())
    corpus = load_corpus(args.corpus)
    names = list(corpus)
    rows = build_report(
        corpus, args.metric, specs, quantize=args.quantize, baselines=baselines, step=args.cubic_step
    )
    text = format_text(rows, names)
    if args.published:
        lines = ["", "Published values for matching image names:"]
        for r in rows:
            pub = published_row(args.metric, r.key, names)
            if pub:
                cells = ", ".join(f"{n}={pub[n]:.4f} (delta {r.values[n] - pub[n]:+.4f})" for n in names if n in pub)
                lines.append(f"  {r.label}: {cells}")
        text += "\n".join(lines) + "\n"
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / f"report_{args.metric}.txt").write_text(text)
        (args.out / f"report_{args.metric}.csv").write_text(format_csv(rows, names))
        base = {r.key if r.key != "best_cubic" else "cubic": r.values for r in rows[:3]}
        base["cubic_a02"] = rows[2].annotations
        (args.out / f"baselines_{args.metric}.json").write_text(_dumps(base) + "\n")
    sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage errors as exceptions (rendered as JSON by main)."""

    def error(self, message):
        raise CliError(f"{self.prog}: {message}")


def _join_negative_values(argv: list[str]) -> list[str]:
    # Let "--range -2:2" through; argparse would otherwise read -2:2 as an option.
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--range" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"--range={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def _add_bool(p, name: str, default: bool, help: str) -> None:
    p.add_argument(f"--{name}", dest=name.replace("-", "_"), action=argparse.BooleanOptionalAction, default=default, help=help)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ratkern", description="Piecewise rational interpolation kernels.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def kernel_list_args(p):
        p.add_argument("--json", action="store_true", help="emit the catalog as JSON")
        p.add_argument("--out", type=Path, help="write to a file instead of stdout")
        p.set_defaults(func=cmd_kernel_list)

    def kernel_eval_args(p):
        p.add_argument("spec", help="kernel spec, e.g. cubic:a02=-2.5")
        p.add_argument("--range", default="-2:2", help="t range lo:hi (default -2:2)")
        p.add_argument("--samples", type=int, default=401)
        p.add_argument("--order", type=int, default=1, choices=(1, 2, 3), help="derivative order")
        p.add_argument("--out", type=Path)
        p.set_defaults(func=cmd_kernel_eval)

    kernel_list_args(sub.add_parser("kernel-list", help="list kernel families"))
    kernel_eval_args(sub.add_parser("kernel-eval", help="tabulate a kernel as CSV"))
    kp = sub.add_parser("kernel", help="kernel inspection (list, eval)")
    ksub = kp.add_subparsers(dest="kernel_command", required=True)
    kernel_list_args(ksub.add_parser("list"))
    kernel_eval_args(ksub.add_parser("eval"))

    p = sub.add_parser("verify", help="property report for kernel specs")
    p.add_argument("specs", nargs="*", help="kernel specs (default: one of each family)")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("resize", help="resize one image")
    p.add_argument("input", type=Path)
    p.add_argument("output", type=Path)
    p.add_argument("--kernel", default="cubic:a02=-2.5")
    p.add_argument("--size", help="output size HxW")
    p.add_argument("--factor", type=float, help="scale factor")
    _add_bool(p, "antialias", True, "stretch the kernel when reducing")
    p.set_defaults(func=cmd_resize)

    p = sub.add_parser("pipeline", help="reduce by 4, magnify by 4, report metrics")
    p.add_argument("input", type=Path)
    p.add_argument("--kernel", required=True, help="magnification kernel spec")
    p.add_argument("--out", type=Path, help="output directory (default .)")
    p.add_argument("--format", choices=("pgm", "png"), default="pgm")
    _add_bool(p, "quantize", True, "round to 8 bits between stages")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("metrics", help="PSNR/SSIM/FSIM between two images")
    p.add_argument("reference", type=Path)
    p.add_argument("test", type=Path)
    p.add_argument("--metric", action="append", choices=sorted(METRICS), help="restrict to these metrics")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("sweep", help="parameter grid sweep from a TOML config")
    p.add_argument("--config", type=Path)
    p.add_argument("--out", type=Path, help="output directory (overrides the config)")
    p.add_argument("--metric", choices=sorted(METRICS))
    p.add_argument("--threads", type=int)
    p.add_argument("--max-cells", type=int, help="stop after this many new triples")
    p.add_argument("--quantize", dest="quantize", action=argparse.BooleanOptionalAction, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit-plane", help="least-squares plane through a03 = c0 + c1 a01 + c2 a02")
    p.add_argument("points", type=Path, help="CSV with a01, a02, a03 columns (e.g. qualifying.csv)")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_fit_plane)

    p = sub.add_parser("report", help="comparison table over a corpus")
    p.add_argument("--corpus", type=Path)
    p.add_argument("--metric", choices=sorted(METRICS), default="psnr")
    p.add_argument("--kernels", nargs="*", help="fixed-parameter kernels (default: the four published triples)")
    p.add_argument("--baselines", type=Path, help="reuse a baselines JSON written by an earlier report")
    p.add_argument("--cubic-step", type=float, default=0.005)
    p.add_argument("--published", action="store_true", help="append published values for matching image names")
    p.add_argument("--out", type=Path)
    _add_bool(p, "quantize", True, "round to 8 bits between stages")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except CliError as exc:
        sys.stderr.write(json.dumps({"error": "UsageError", "message": str(exc), "command": None}) + "\n")
        return 2
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except (RatkernError, ValueError, OSError) as exc:
        payload = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        sys.stderr.write(json.dumps(payload) + "\n")
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
