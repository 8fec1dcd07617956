"""Raster primitives shared by every stage.

Images are plain numpy arrays indexed ``[row, col]``: grayscale rasters are
``uint8`` and binary rasters are ``bool`` with True meaning foreground (text).
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from vidtext.errors import DecodeError, OutOfBounds, UnsupportedFormat

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"

# header tokens of a binary PGM, comments allowed between them
_PGM_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n)*(\d+)")


@dataclass(frozen=True)
class Rect:
    """Axis-aligned pixel box; ``x0``/``y0`` is the top-left pixel."""

    x0: int
    y0: int
    w: int
    h: int

    @property
    def x1(self) -> int:
        """Last column (inclusive)."""
        return self.x0 + self.w - 1

    @property
    def y1(self) -> int:
        return self.y0 + self.h - 1

    def slices(self) -> tuple[slice, slice]:
        return slice(self.y0, self.y0 + self.h), slice(self.x0, self.x0 + self.w)

    def fits(self, shape: tuple[int, ...]) -> bool:
        height, width = shape[:2]
        return (
            self.w >= 1
            and self.h >= 1
            and self.x0 >= 0
            and self.y0 >= 0
            and self.x0 + self.w <= width
            and self.y0 + self.h <= height
        )

    def compose(self, inner: "Rect") -> "Rect":
        """Rect of ``inner`` (given relative to self) in self's parent coordinates."""
        return Rect(self.x0 + inner.x0, self.y0 + inner.y0, inner.w, inner.h)

    def to_list(self) -> list[int]:
        return [self.x0, self.y0, self.w, self.h]

    @classmethod
    def from_list(cls, values) -> "Rect":
        x0, y0, w, h = (int(v) for v in values)
        return cls(x0, y0, w, h)

    @classmethod
    def full(cls, img: np.ndarray) -> "Rect":
        return cls(0, 0, img.shape[1], img.shape[0])


def to_grayscale(r, g, b):
    """BT.601 luma, rounded half-up and clamped to [0, 255].

    Accepts scalars or equally shaped arrays.
    """
    luma = 0.299 * np.asarray(r, dtype=np.float64) + 0.587 * np.asarray(g, dtype=np.float64)
    luma = luma + 0.114 * np.asarray(b, dtype=np.float64)
    out = np.clip(np.floor(luma + 0.5), 0, 255).astype(np.uint8)
    if out.ndim == 0:
        return int(out)
    return out


def crop(img: np.ndarray, r: Rect) -> np.ndarray:
    if not r.fits(img.shape):
        raise OutOfBounds(f"{r} exceeds image of shape {img.shape}")
    return img[r.slices()].copy()


def _decode_pgm(data: bytes) -> np.ndarray:
    pos = 2
    fields = []
    for _ in range(3):
        m = _PGM_TOKEN.match(data, pos)
        if m is None:
            raise DecodeError("truncated PGM header")
        fields.append(int(m.group(1)))
        pos = m.end()
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise DecodeError(f"bad PGM dimensions {width}x{height}")
    if not 1 <= maxval <= 255:
        raise UnsupportedFormat(f"PGM maxval {maxval} not supported (need <= 255)")
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise DecodeError("missing whitespace after PGM header")
    pos += 1
    body = data[pos : pos + width * height]
    if len(body) != width * height:
        raise DecodeError(f"PGM body has {len(body)} bytes, expected {width * height}")
    pixels = np.frombuffer(body, dtype=np.uint8).reshape(height, width)
    if maxval != 255:
        pixels = np.floor(pixels.astype(np.float64) * 255.0 / maxval + 0.5).clip(0, 255)
    return pixels.astype(np.uint8)


def _decode_png(data: bytes) -> np.ndarray:
    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            if im.mode == "L":
                return np.asarray(im, dtype=np.uint8).copy()
            if im.mode == "1":
                return np.where(np.asarray(im), 255, 0).astype(np.uint8)
            if im.mode in ("I;16", "I;16B", "I"):
                arr = np.asarray(im, dtype=np.float64)
                return np.floor(arr * 255.0 / 65535.0 + 0.5).clip(0, 255).astype(np.uint8)
            rgb = np.asarray(im.convert("RGB"), dtype=np.uint8)
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"malformed PNG: {exc}") from exc
    return to_grayscale(rgb[..., 0], rgb[..., 1], rgb[..., 2])


def decode_image(data: bytes) -> np.ndarray:
    """Decode a PNG or binary PGM (P5) payload into a grayscale raster."""
    if data[:2] == b"P5":
        return _decode_pgm(data)
    if data[:8] == PNG_SIGNATURE:
        return _decode_png(data)
    if len(data) < 8 and data and PNG_SIGNATURE.startswith(data):
        raise DecodeError("truncated PNG signature")
    raise UnsupportedFormat("payload is neither PNG nor binary PGM")


def encode_pgm(img: np.ndarray) -> bytes:
    img = np.asarray(img)
    if img.dtype == bool:
        img = np.where(img, 255, 0)
    img = img.astype(np.uint8)
    height, width = img.shape
    return b"P5\n%d %d\n255\n" % (width, height) + img.tobytes()


def encode_png(img: np.ndarray) -> bytes:
    img = np.asarray(img)
    if img.dtype == bool:
        img = np.where(img, 255, 0).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(img.astype(np.uint8)).save(buf, format="PNG")
    return buf.getvalue()


def read_image(path) -> np.ndarray:
    return decode_image(Path(path).read_bytes())


def write_image(path, img: np.ndarray) -> None:
    path = Path(path)
    if path.suffix.lower() == ".png":
        path.write_bytes(encode_png(img))
    else:
        path.write_bytes(encode_pgm(img))
