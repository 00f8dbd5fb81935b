"""Raster image decoding and PGM output.

All images are handled as 8-bit grayscale with a top-left origin,
x rightward and y downward. Color inputs are reduced to luminance
with BT.601 weights, rounded half-up.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CorruptImageError, UnsupportedFormatError

__all__ = ["RasterImage", "load_image", "save_pgm"]

_LUMA_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(eq=False)
class RasterImage:
    """8-bit grayscale pixel grid, stored row-major as a (height, width) array."""

    pixels: np.ndarray  # uint8, shape (height, width)

    def __post_init__(self):
        a = np.asarray(self.pixels)
        if a.ndim != 2 or a.size == 0:
            raise ValueError("pixels must be a non-empty 2-D array")
        self.pixels = a.astype(np.uint8, copy=False)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RasterImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    def copy(self) -> "RasterImage":
        return RasterImage(self.pixels.copy())


def _round_half_up(a):
    return np.floor(np.asarray(a, dtype=np.float64) + 0.5)


def _luminance(rgb: np.ndarray) -> np.ndarray:
    r, g, b = (rgb[..., i].astype(np.float64) for i in range(3))
    y = _LUMA_WEIGHTS[0] * r + _LUMA_WEIGHTS[1] * g + _LUMA_WEIGHTS[2] * b
    return np.clip(_round_half_up(y), 0, 255).astype(np.uint8)


def _parse_pgm(data: bytes) -> np.ndarray:
    # P2 (ASCII) and P5 (binary), maxval <= 255, '#' comments allowed in header.
    def tokens():
        i = 0
        while i < len(data):
            c = data[i : i + 1]
            if c == b"#":
                while i < len(data) and data[i : i + 1] != b"\n":
                    i += 1
            elif c.isspace():
                i += 1
            else:
                j = i
                while j < len(data) and not data[j : j + 1].isspace() and data[j : j + 1] != b"#":
                    j += 1
                yield i, data[i:j]
                i = j

    it = tokens()
    try:
        _, magic = next(it)
        header = []
        pos = None
        while len(header) < 3:
            pos, tok = next(it)
            header.append(int(tok))
    except (StopIteration, ValueError) as exc:
        raise CorruptImageError("truncated or malformed PGM header") from exc
    width, height, maxval = header
    if magic not in (b"P2", b"P5"):
        raise UnsupportedFormatError(f"unsupported PNM magic {magic!r}")
    if width < 1 or height < 1 or not (0 < maxval <= 255):
        raise CorruptImageError("invalid PGM dimensions or maxval")
    n = width * height
    if magic == b"P5":
        start = pos + len(str(maxval)) + 1  # single whitespace byte after maxval
        raw = data[start : start + n]
        if len(raw) < n:
            raise CorruptImageError("PGM pixel data truncated")
        a = np.frombuffer(raw, dtype=np.uint8, count=n)
    else:
        try:
            vals = [int(tok) for _, tok in it]
        except ValueError as exc:
            raise CorruptImageError("non-numeric PGM sample") from exc
        if len(vals) < n:
            raise CorruptImageError("PGM pixel data truncated")
        a = np.array(vals[:n], dtype=np.int64)
        if a.min() < 0 or a.max() > maxval:
            raise CorruptImageError("PGM sample out of range")
        a = a.astype(np.uint8)
    return a.reshape(height, width)


def load_image(path) -> RasterImage:
    """Decode a PNG, JPEG, or PGM file into a grayscale RasterImage."""
    path = Path(path)
    data = path.read_bytes()  # missing file raises FileNotFoundError
    if len(data) == 0:
        raise CorruptImageError(f"{path}: empty file")
    if data[:2] in (b"P2", b"P5"):
        return RasterImage(_parse_pgm(data))
    if data[:8] == b"\x89PNG\r\n\x1a\n" or data[:2] == b"\xff\xd8":
        from PIL import Image, UnidentifiedImageError

        try:
            with Image.open(io.BytesIO(data)) as im:
                im.load()
                if im.mode == "L":
                    return RasterImage(np.asarray(im, dtype=np.uint8))
                rgb = np.asarray(im.convert("RGB"), dtype=np.uint8)
        except (UnidentifiedImageError, OSError) as exc:
            raise CorruptImageError(f"{path}: {exc}") from exc
        return RasterImage(_luminance(rgb))
    raise UnsupportedFormatError(f"{path}: unrecognized image format")


def save_pgm(img: RasterImage, path) -> None:
    """Write a binary (P5) PGM; round-trips exactly through load_image."""
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + img.pixels.tobytes())
