"""Command-line interface, driven in-process through ``main``."""

import csv
import io
import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from ratkern.cli import main
from ratkern.imageio import read_image, write_image
from ratkern.kernels import KernelSpec
from ratkern.resample import ImageF


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def corpus_dir(corpus, tmp_path):
    d = tmp_path / "corpus"
    d.mkdir()
    for name, img in corpus.items():
        write_image(img, d / f"{name}.pgm")
    return d


def test_kernel_list(capsys):
    code, out, _ = run(capsys, "kernel-list", "--json")
    assert code == 0
    rows = json.loads(out)
    assert {r["family"] for r in rows} >= {"s41v4", "cubic"}
    code, out2, _ = run(capsys, "kernel", "list", "--json")
    assert out2 == out
    code, text, _ = run(capsys, "kernel-list")
    assert code == 0 and "s41v5" in text


def test_kernel_eval_examples(capsys):
    code, out, _ = run(capsys, "kernel-eval", "cubic:a02=-2.5", "--range", "-2:2", "--samples", "9")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 9
    assert float(rows[0]["value"]) == 0.0 and float(rows[-1]["value"]) == 0.0
    assert {"t", "value", "derivative", "value_left", "value_right"} <= set(rows[0])
    code, out, _ = run(capsys, "kernel", "eval", "s31:a01=0", "--range", "0:0", "--samples", "1")
    assert float(next(csv.DictReader(io.StringIO(out)))["value"]) == 1.0
    code, out, _ = run(capsys, "kernel-eval", "s41v4:a01=80,a02=100,a03=-444.7992", "--samples", "5")
    assert code == 0 and len(out.splitlines()) == 6


def test_kernel_eval_junction_sides(capsys):
    _, out, _ = run(capsys, "kernel-eval", "s2", "--range", "1:1", "--samples", "1")
    row = next(csv.DictReader(io.StringIO(out)))
    assert float(row["derivative_left"]) == pytest.approx(-2.0)
    assert float(row["derivative_right"]) == pytest.approx(-1.0)


@pytest.mark.parametrize(
    "argv, error",
    [
        (["kernel-eval", "cubic:a02=oops"], "ParseError"),
        (["kernel-eval", "s41v4:a01=-3,a02=0,a03=0"], "ParameterOutOfDomain"),
        (["kernel-eval", "linear", "--range", "2:x"], "ParseError"),
    ],
)
def test_errors_are_json(capsys, argv, error):
    code, out, err = run(capsys, *argv)
    assert code == 1 and out == ""
    payload = json.loads(err)
    assert payload["error"] == error and payload["command"] == argv[0]


def test_usage_error(capsys):
    code, _, err = run(capsys, "bogus")
    assert code == 2 and json.loads(err)["error"] == "UsageError"


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "cubic:a02=-2.5", "s31:a01=-1", "--json")
    reports = json.loads(out)
    assert code == 0 and [r["approx_order"] for r in reports] == [3, 2]
    assert reports[1]["degenerates_to"] == "s2"
    code, text, _ = run(capsys, "verify")
    assert code == 0 and text.splitlines()[0].startswith("Kernel")


def test_resize_factor_one_byte_identical(capsys, tmp_path, smooth):
    src, dst = tmp_path / "a.pgm", tmp_path / "b.pgm"
    write_image(smooth, src)
    code, _, _ = run(capsys, "resize", str(src), str(dst), "--factor", "1", "--kernel", "s41v4:a01=30,a02=20,a03=-121.5512")
    assert code == 0 and src.read_bytes() == dst.read_bytes()


def test_resize_size_and_png(capsys, tmp_path, smooth):
    src, dst = tmp_path / "a.pgm", tmp_path / "b.png"
    write_image(smooth, src)
    code, _, _ = run(capsys, "resize", str(src), str(dst), "--size", "20x30", "--no-antialias")
    assert code == 0 and read_image(dst).shape == (20, 30)
    code, _, err = run(capsys, "resize", str(src), str(dst))
    assert code == 1 and json.loads(err)["error"] == "ParseError"


def test_pipeline(capsys, tmp_path, smooth):
    src = tmp_path / "img.pgm"
    write_image(smooth, src)
    out = tmp_path / "out"
    code, text, _ = run(capsys, "pipeline", str(src), "--kernel", "s41v4:a01=30,a02=20,a03=-121.5512", "--out", str(out))
    report = json.loads(text)
    assert code == 0 and {"psnr", "ssim", "fsim"} <= set(report)
    assert read_image(out / "img.reduced.pgm").shape == (16, 16)
    assert read_image(out / "img.magnified.pgm").shape == (64, 64)
    assert json.loads((out / "img.report.json").read_text()) == report


def test_pipeline_constant_and_indivisible(capsys, tmp_path):
    flat = tmp_path / "flat.pgm"
    write_image(ImageF(np.full((64, 64), 80.0)), flat)
    code, text, _ = run(capsys, "pipeline", str(flat), "--kernel", "cubic:a02=-2.5", "--out", str(tmp_path / "o"), "--format", "png")
    report = json.loads(text)
    assert code == 0 and report["psnr"] == "inf" and report["ssim"] == 1.0
    assert (tmp_path / "o" / "flat.magnified.png").exists()
    odd = tmp_path / "odd.pgm"
    write_image(ImageF(np.zeros((250, 250))), odd)
    out = tmp_path / "o2"
    code, _, err = run(capsys, "pipeline", str(odd), "--kernel", "linear", "--out", str(out))
    assert code == 1 and json.loads(err)["error"] == "DimsNotDivisible"
    assert not out.exists() or not any(out.iterdir())


def test_metrics(capsys, tmp_path, smooth):
    a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
    write_image(smooth, a)
    write_image(ImageF(np.clip(smooth.samples + 1, 0, 255)), b)
    code, text, _ = run(capsys, "metrics", str(a), str(b))
    assert code == 0 and set(json.loads(text)) == {"psnr", "ssim", "fsim"}
    code, text, _ = run(capsys, "metrics", str(a), str(a), "--metric", "psnr")
    assert json.loads(text) == {"psnr": "inf"}
    code, _, err = run(capsys, "metrics", str(a), str(tmp_path / "missing.pgm"))
    assert code == 1 and json.loads(err)["error"] == "MissingInput"


def test_sweep_fit_plane_and_report(capsys, tmp_path, corpus_dir, monkeypatch):
    monkeypatch.setenv("RATKERN_THREADS", "2")
    cfg = tmp_path / "cfg.toml"
    cfg.write_text(
        f'corpus = "{corpus_dir}"\nstep = 10.0\nbaseline_cubic_a02 = -2.5\n'
        "[ranges]\na01 = [10, 50]\na02 = [0, 40]\na03 = [-150, -50]\n"
    )
    out = tmp_path / "sw"
    code, text, _ = run(capsys, "sweep", "--config", str(cfg), "--out", str(out), "--max-cells", "10")
    assert code == 0 and json.loads(text)["cells"] == 10
    code, text, _ = run(capsys, "sweep", "--config", str(cfg), "--out", str(out))
    summary = json.loads(text)
    assert code == 0 and summary["cells"] == 275
    if summary["qualifying"] >= 3:
        code, text, _ = run(capsys, "fit-plane", str(out / "qualifying.csv"))
        assert code == 0 and "equation" in json.loads(text)
    pts = tmp_path / "pts.csv"
    pts.write_text("a01,a02,a03\n30,20,-121.5512\n80,100,-444.7992\n0,0,-5.7392\n")
    code, text, _ = run(capsys, "fit-plane", str(pts))
    fit = json.loads(text)
    assert fit["c0"] == pytest.approx(-5.7392, abs=1e-9) and fit["c1"] == pytest.approx(-2.0, abs=1e-9)

    rep = tmp_path / "rep"
    code, text, _ = run(capsys, "report", "--corpus", str(corpus_dir), "--cubic-step", "0.5", "--out", str(rep))
    assert code == 0 and len(text.splitlines()) == 9
    assert (rep / "report_psnr.csv").exists()
    code, text2, _ = run(capsys, "report", "--corpus", str(corpus_dir), "--baselines", str(rep / "baselines_psnr.json"))
    assert text2 == text


def test_sweep_requires_config(capsys):
    code, _, err = run(capsys, "sweep")
    assert code != 0 and json.loads(err)["error"]


def test_report_missing_baselines(capsys, corpus_dir, tmp_path):
    code, _, err = run(capsys, "report", "--corpus", str(corpus_dir), "--baselines", str(tmp_path / "nope.json"))
    assert code == 1 and json.loads(err)["error"] == "MissingInput"


def test_determinism(capsys, tmp_path, smooth):
    src = tmp_path / "img.pgm"
    write_image(smooth, src)
    outs = []
    for d in ("x", "y"):
        run(capsys, "pipeline", str(src), "--kernel", "s41v5:a01=30,a02=10,a03=-90.1572", "--out", str(tmp_path / d))
        outs.append([(tmp_path / d / f).read_bytes() for f in ("img.reduced.pgm", "img.magnified.pgm", "img.report.json")])
    assert outs[0] == outs[1]


def test_spec_strings_reparse():
    for text in ("nearest", "s4:a02=-2.5,a03=1.5", "s41v5:a01=30,a02=10,a03=-90.1572"):
        assert str(KernelSpec.parse(text)) == text


@pytest.mark.skipif(shutil.which("ratkern") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["ratkern", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "ratkern" in res.stdout
    res = subprocess.run([sys.executable, "-m", "ratkern.cli", "bogus"], capture_output=True, text=True)
    assert res.returncode == 2
