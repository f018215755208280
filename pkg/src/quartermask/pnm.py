"""Minimal binary PGM/PPM reading and writing.

Images are handled as 2-D float64 arrays with values in [0, 255].
Colour (P6) input is reduced to luma with the Rec.601 weights. Other
formats (PNG, TIFF, ...) are read through Pillow when it is installed.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

__all__ = ["PNM_SUFFIXES", "read_image", "read_pnm", "to_uint8", "write_pgm"]

PNM_SUFFIXES = (".pgm", ".ppm", ".pnm")
LUMA = np.array([0.299, 0.587, 0.114])

_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _header(data):
    fields, pos = [], 0
    while len(fields) < 4:
        m = _TOKEN.match(data, pos)
        if m is None:
            raise ValueError("truncated PNM header")
        fields.append(m.group(1))
        pos = m.end()
    # exactly one whitespace byte separates the header from the raster
    return fields, pos + 1


def read_pnm(path) -> np.ndarray:
    """Read a binary P5 (gray) or P6 (colour) file as a float gray image."""
    data = Path(path).read_bytes()
    (magic, w, h, maxval), start = _header(data)
    if magic not in (b"P5", b"P6"):
        raise ValueError(f"{path}: unsupported PNM type {magic!r}")
    w, h, maxval = int(w), int(h), int(maxval)
    if not 0 < maxval < 65536:
        raise ValueError(f"{path}: bad maxval {maxval}")
    channels = 3 if magic == b"P6" else 1
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    count = w * h * channels
    raster = np.frombuffer(data, dtype=dtype, count=count, offset=start)
    img = raster.astype(np.float64).reshape(h, w, channels) * (255.0 / maxval)
    if channels == 3:
        return img @ LUMA
    return img[:, :, 0]


def read_image(path) -> np.ndarray:
    path = Path(path)
    if path.suffix.lower() in PNM_SUFFIXES:
        return read_pnm(path)
    from PIL import Image

    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.float64)
    return arr @ LUMA


def to_uint8(image) -> np.ndarray:
    return np.clip(np.rint(image), 0, 255).astype(np.uint8)


def write_pgm(path, image) -> None:
    """Write a P5 file, rounding and clipping to 8 bit."""
    img = to_uint8(image)
    h, w = img.shape
    Path(path).write_bytes(b"P5\n%d %d\n255\n" % (w, h) + img.tobytes())
