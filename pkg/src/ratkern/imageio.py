"""Reading and writing 8-bit grayscale images (binary PGM and PNG)."""

from __future__ import annotations

import re
import warnings
from pathlib import Path

import numpy as np
from PIL import Image

from .exceptions import MissingInput, ParseError
from .resample import ImageF

__all__ = ["read_image", "write_image", "read_pgm", "write_pgm", "to_luminance"]

# ITU-R BT.601 luma weights.
BT601 = (0.299, 0.587, 0.114)

_HEADER = re.compile(rb"\A(P5)\s+(?:#[^\n]*\n\s*)*(\d+)\s+(?:#[^\n]*\n\s*)*(\d+)\s+(?:#[^\n]*\n\s*)*(\d+)\s")


def read_pgm(path: str | Path) -> ImageF:
    """Read a binary (P5) PGM file; 16-bit files are accepted and keep their maxval as peak."""
    path = Path(path)
    if not path.exists():
        raise MissingInput(f"no such file: {path}")
    data = path.read_bytes()
    m = _HEADER.match(data)
    if not m:
        raise ParseError(f"{path}: not a binary PGM (P5) file")
    w, h, maxval = int(m.group(2)), int(m.group(3)), int(m.group(4))
    if not 0 < maxval < 65536:
        raise ParseError(f"{path}: invalid maxval {maxval}")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    n = w * h * dtype.itemsize
    body = data[m.end() : m.end() + n]
    if len(body) < n:
        raise ParseError(f"{path}: truncated pixel data")
    samples = np.frombuffer(body, dtype=dtype).reshape(h, w).astype(float)
    return ImageF(samples, peak=255.0 if maxval <= 255 else float(maxval))


def _to_uint8(image: ImageF) -> np.ndarray:
    scaled = image.samples * (255.0 / image.peak)
    return np.floor(np.clip(scaled, 0, 255) + 0.5).astype(np.uint8)


def write_pgm(image: ImageF, path: str | Path) -> None:
    """Write ``image`` as 8-bit binary PGM, quantizing to [0, 255]."""
    pixels = _to_uint8(image)
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + pixels.tobytes())


def to_luminance(rgb: np.ndarray) -> np.ndarray:
    """BT.601 luma of an ``(h, w, 3)`` array; extra channels (alpha) are dropped."""
    rgb = np.asarray(rgb, dtype=float)
    return rgb[..., 0] * BT601[0] + rgb[..., 1] * BT601[1] + rgb[..., 2] * BT601[2]


def read_image(path: str | Path) -> ImageF:
    """Read a PGM or PNG (or anything Pillow opens) as a grayscale :class:`ImageF`.

    Color images are converted to BT.601 luminance with a warning.
    """
    path = Path(path)
    if not path.exists():
        raise MissingInput(f"no such file: {path}")
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"P5":
        return read_pgm(path)
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode in ("L", "I;16", "I", "F"):
                arr = np.asarray(im, dtype=float)
                peak = 255.0 if mode == "L" else float(max(255.0, 65535.0 if mode == "I;16" else arr.max()))
                return ImageF(arr, peak=peak)
            if mode in ("1", "LA"):
                return ImageF(np.asarray(im.convert("L"), dtype=float))
            rgb = np.asarray(im.convert("RGB"), dtype=float)
            if mode == "P" and np.array_equal(rgb[..., 0], rgb[..., 1]) and np.array_equal(rgb[..., 1], rgb[..., 2]):
                return ImageF(rgb[..., 0])
    except (OSError, SyntaxError) as exc:
        raise ParseError(f"{path}: {exc}") from None
    warnings.warn(f"{path}: color image converted to BT.601 luminance", UserWarning, stacklevel=2)
    return ImageF(to_luminance(rgb))


def write_image(image: ImageF, path: str | Path) -> None:
    """Write by extension: ``.pgm`` as binary PGM, anything else through Pillow as 8-bit grayscale."""
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        write_pgm(image, path)
    else:
        Image.fromarray(_to_uint8(image)).save(path)
