"""PSNR, SSIM, FSIM and unity normalization."""

import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.ndimage import gaussian_filter, shift
from skimage.metrics import structural_similarity

from ratkern.exceptions import DegenerateRange, DimMismatch, TooSmall
from ratkern.metrics import INFINITE_PSNR, MetricReport, evaluate_all, fsim, normalize_unity, psnr, ssim
from ratkern.resample import ImageF


def _noisy(im, sigma, seed):
    noise = np.random.default_rng(seed).normal(0, 1, im.shape)
    return ImageF(im.samples + sigma * noise)


def test_psnr_examples(smooth):
    assert psnr(smooth, smooth) == INFINITE_PSNR
    a = ImageF(np.full((8, 8), 100.0))
    b = ImageF(np.full((8, 8), 101.0))
    assert psnr(a, b) == pytest.approx(20 * math.log10(255.0), abs=1e-9)
    assert psnr(a, b) == pytest.approx(48.1308, abs=1e-3)


def test_psnr_errors():
    with pytest.raises(DimMismatch):
        psnr(ImageF(np.zeros((4, 4))), ImageF(np.zeros((4, 5))))
    with pytest.raises(DimMismatch):
        psnr(ImageF(np.zeros((4, 4))), ImageF(np.zeros((4, 4)), peak=1.0))


def test_ssim_matches_skimage(smooth, rng):
    other = _noisy(smooth, 20, 1)
    ref = structural_similarity(
        smooth.samples, other.samples, gaussian_weights=True, sigma=1.5, use_sample_covariance=False, data_range=255
    )
    assert ssim(smooth, other) == pytest.approx(ref, abs=1e-12)


def test_ssim_examples():
    g = np.add.outer(np.arange(64.0), np.arange(64.0)) * 1.5
    a = ImageF(g)
    assert ssim(a, a) == 1.0
    s = ssim(a, ImageF(g + 10))
    assert 0.8 < s < 1.0


def test_ssim_shift_oracle_on_flat_windows():
    # Constant images: only the luminance term survives.
    a, b = ImageF(np.full((16, 16), 100.0)), ImageF(np.full((16, 16), 110.0))
    c1 = (0.01 * 255) ** 2
    expected = (2 * 100 * 110 + c1) / (100**2 + 110**2 + c1)
    assert ssim(a, b) == pytest.approx(expected, abs=1e-12)


def test_small_images_rejected():
    with pytest.raises(TooSmall):
        ssim(ImageF(np.zeros((10, 10))), ImageF(np.zeros((10, 10))))
    with pytest.raises(TooSmall):
        fsim(ImageF(np.zeros((31, 40))), ImageF(np.zeros((31, 40))))


def test_fsim_examples(smooth):
    assert fsim(smooth, smooth) == pytest.approx(1.0, abs=1e-9)
    moved = ImageF(np.roll(smooth.samples, 1, axis=1))
    assert fsim(smooth, moved) < 1.0


def test_fsim_flat_images():
    a = ImageF(np.full((40, 40), 50.0))
    assert fsim(a, a) == pytest.approx(1.0, abs=1e-12)


def test_fsim_peak_rescaling(smooth):
    other = _noisy(smooth, 10, 2)
    a = ImageF(smooth.samples / 255.0, peak=1.0)
    b = ImageF(other.samples / 255.0, peak=1.0)
    assert fsim(a, b) == pytest.approx(fsim(smooth, other), abs=1e-9)


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_symmetry_and_range(seed):
    r = np.random.default_rng(seed)
    a = ImageF(gaussian_filter(r.uniform(0, 255, (40, 40)), 1.0))
    b = ImageF(gaussian_filter(r.uniform(0, 255, (40, 40)), 1.0))
    assert psnr(a, b) == psnr(b, a)
    assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-14)
    assert fsim(a, b) == pytest.approx(fsim(b, a), abs=1e-12)
    assert -1.0 <= ssim(a, b) <= 1.0
    assert 0.0 <= fsim(a, b) <= 1.0


def test_monotone_degradation(smooth):
    levels = [2, 5, 10, 20, 40]
    p = [psnr(smooth, _noisy(smooth, s, 0)) for s in levels]
    s = [ssim(smooth, _noisy(smooth, s, 0)) for s in levels]
    f = [fsim(smooth, _noisy(smooth, s, 0)) for s in levels]
    assert all(x - y > 1e-9 for x, y in zip(p, p[1:]))
    assert all(y <= x for x, y in zip(s, s[1:]))
    assert all(y <= x for x, y in zip(f, f[1:]))


def test_fsim_sub_pixel_shift_degrades(smooth):
    values = [fsim(smooth, ImageF(shift(smooth.samples, (0, d), mode="nearest"))) for d in (0.25, 0.5, 1.0)]
    assert values[0] > values[2]


def test_normalize_unity():
    np.testing.assert_allclose(normalize_unity([1, 2, 3]), [0, 0.5, 1])
    with pytest.warns(DegenerateRange):
        out, flag = normalize_unity([5, 5, 5], return_flag=True)
    assert flag and np.all(out == 0)
    with pytest.raises(ValueError):
        normalize_unity([])


@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=50))
def test_normalize_bounds_and_idempotence(values):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateRange)
        out, flag = normalize_unity(values, return_flag=True)
    if flag:
        assert np.all(out == 0)
        return
    assert out.min() == 0.0 and out.max() == 1.0
    np.testing.assert_allclose(normalize_unity(out), out, atol=1e-15)


def test_metric_report(smooth):
    rep = evaluate_all(smooth, smooth)
    assert rep.to_dict()["psnr"] == "inf"
    assert json.loads(json.dumps(rep.to_dict()))["ssim"] == 1.0
    assert MetricReport(30.0, 0.9, 0.8).to_dict() == {"psnr": 30.0, "ssim": 0.9, "fsim": 0.8}
