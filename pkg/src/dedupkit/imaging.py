"""Image decoding, grayscale conversion, and box resampling.

Array conventions used throughout the package:

- RGB image: uint8 array of shape (height, width, 3), row-major.
- pixel grid: float64 array of shape (height, width) with values in
  [0, 255]; grayscale intensities stay real-valued until a hash
  thresholds them, so no double-rounding occurs.
"""

from __future__ import annotations

import io
from os import PathLike

import numpy as np
from PIL import Image, UnidentifiedImageError

from . import _kernels
from .errors import CorruptStream, UnsupportedFormat, ZeroDimension

SUPPORTED_FORMATS = frozenset({"PNG", "JPEG", "BMP"})

# BT.601 luma weights for R, G, B
GRAY_WEIGHTS = np.array([0.299, 0.587, 0.114])


def decode(data: bytes, *, source: str = "<bytes>") -> np.ndarray:
    """Decode a PNG/JPEG/BMP byte stream to an RGB uint8 array.

    An alpha channel, if present, is composited over black before being
    dropped. `source` names the input in error messages.

    Raises UnsupportedFormat for non-PNG/JPEG/BMP input and CorruptStream
    for streams that identify as a supported format but fail to decode.
    """
    try:
        img = Image.open(io.BytesIO(data))
    except UnidentifiedImageError as exc:
        raise UnsupportedFormat(f"{source}: not a PNG, JPEG, or BMP stream") from exc
    if img.format not in SUPPORTED_FORMATS:
        raise UnsupportedFormat(f"{source}: unsupported format {img.format!r}")
    try:
        img.load()
    except OSError as exc:
        raise CorruptStream(f"{source}: {exc}") from exc

    has_alpha = img.mode in ("RGBA", "LA", "PA") or (
        img.mode == "P" and "transparency" in img.info
    )
    if has_alpha:
        rgba = np.asarray(img.convert("RGBA"), dtype=np.float64)
        rgb = rgba[..., :3] * (rgba[..., 3:4] / 255.0)
        return np.rint(rgb).astype(np.uint8)
    return np.asarray(img.convert("RGB"), dtype=np.uint8)


def decode_file(path: str | PathLike) -> np.ndarray:
    """Decode an image file; the path appears in any error raised."""
    with open(path, "rb") as fh:
        data = fh.read()
    return decode(data, source=str(path))


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """BT.601 luma: L = 0.299 R + 0.587 G + 0.114 B, kept as float64."""
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected (h, w, 3) RGB array, got shape {img.shape}")
    return img.astype(np.float64) @ GRAY_WEIGHTS


def resize(grid: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    """Area-averaging (box) resample of a pixel grid to out_w x out_h.

    Each output pixel is the mean of the possibly fractional source
    rectangle it covers; exact block means when the scale factors are
    integral, and the identity when dimensions are unchanged.
    """
    if out_w < 1 or out_h < 1:
        raise ZeroDimension(f"resize target {out_w}x{out_h} must be at least 1x1")
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 2:
        raise ValueError(f"expected 2D pixel grid, got shape {grid.shape}")
    out = _kernels.box_resize(grid, out_h, out_w)
    # box averages of in-range values only leave [0, 255] by float rounding,
    # at most one ulp, so clamping never disturbs an exact value
    return np.clip(out, 0.0, 255.0)
