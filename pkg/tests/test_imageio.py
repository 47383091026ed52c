"""PGM and PNG reading and writing."""

import numpy as np
import pytest
from PIL import Image

from ratkern.exceptions import MissingInput, ParseError
from ratkern.imageio import read_image, read_pgm, to_luminance, write_image, write_pgm
from ratkern.resample import ImageF


def test_pgm_round_trip(tmp_path, rng):
    x = rng.integers(0, 256, (7, 5)).astype(float)
    path = tmp_path / "a.pgm"
    write_pgm(ImageF(x), path)
    assert path.read_bytes().startswith(b"P5\n5 7\n255\n")
    back = read_pgm(path)
    np.testing.assert_array_equal(back.samples, x)
    assert back.peak == 255


def test_pgm_with_comments(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# made by hand\n2 1\n# max\n255\n\x01\xff")
    np.testing.assert_array_equal(read_image(path).samples, [[1, 255]])


def test_pgm_16_bit(tmp_path):
    path = tmp_path / "w.pgm"
    path.write_bytes(b"P5 2 1 1023\n" + np.array([5, 1000], dtype=">u2").tobytes())
    im = read_pgm(path)
    np.testing.assert_array_equal(im.samples, [[5, 1000]])
    assert im.peak == 1023


def test_pgm_errors(tmp_path):
    with pytest.raises(MissingInput):
        read_image(tmp_path / "missing.pgm")
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P5\n4 4\n255\n\x00\x00")
    with pytest.raises(ParseError, match="truncated"):
        read_pgm(bad)
    text = tmp_path / "plain.pgm"
    text.write_bytes(b"P2\n1 1\n255\n0\n")
    with pytest.raises(ParseError):
        read_pgm(text)
    junk = tmp_path / "junk.png"
    junk.write_bytes(b"not an image")
    with pytest.raises(ParseError):
        read_image(junk)


def test_write_quantizes(tmp_path):
    path = tmp_path / "q.pgm"
    write_pgm(ImageF(np.array([[-4.0, 0.5, 254.5, 400.0]])), path)
    np.testing.assert_array_equal(read_pgm(path).samples, [[0, 1, 255, 255]])


def test_png_round_trip(tmp_path, rng):
    x = rng.integers(0, 256, (9, 4)).astype(float)
    path = tmp_path / "a.png"
    write_image(ImageF(x), path)
    assert Image.open(path).mode == "L"
    np.testing.assert_array_equal(read_image(path).samples, x)


def test_color_png_converted_with_warning(tmp_path):
    rgb = np.zeros((2, 2, 3), dtype=np.uint8)
    rgb[..., 0] = 100
    rgb[..., 1] = 200
    rgb[..., 2] = 50
    path = tmp_path / "rgb.png"
    Image.fromarray(rgb).save(path)
    with pytest.warns(UserWarning, match="luminance"):
        im = read_image(path)
    np.testing.assert_allclose(im.samples, 0.299 * 100 + 0.587 * 200 + 0.114 * 50)


def test_luminance_weights():
    assert to_luminance(np.array([[[1.0, 1.0, 1.0]]]))[0, 0] == pytest.approx(1.0)
    assert to_luminance(np.array([[[0.0, 1.0, 0.0, 9.0]]]))[0, 0] == pytest.approx(0.587)
