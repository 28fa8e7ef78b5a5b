"""Deterministic synthetic near-duplicate generation.

Every parameter draw comes from a counter-based generator keyed by
(seed, image id, variant index, op index), so any single variant can be
regenerated in isolation and generation order never matters. Ops keep the
output size equal to the input size; each op exposes draw() and apply()
separately so tests can inject exact parameters.

Parameter envelopes (hard bounds, narrowable per op instance):
  ColorJitter   pixel' = alpha * pixel + beta, alpha in [0.8, 1.2],
                beta in [-20, 20]
  Rotate        theta in [-15, +15] degrees, bilinear inverse map,
                corners filled black
  ResizedCrop   crop of area fraction s in [0.7, 1.0], resized back
  Erase         zero-filled rectangle covering at most 20% of the area
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, ClassVar, Sequence

import numpy as np
from PIL import Image

from . import _kernels
from .dataset import ImageRecord, Manifest
from .errors import DegenerateImage
from .imaging import decode_file

_MASK64 = (1 << 64) - 1
MIN_CROP = 8

ALPHA_ENVELOPE = (0.8, 1.2)
BETA_ENVELOPE = (-20.0, 20.0)
THETA_ENVELOPE = (-15.0, 15.0)
AREA_ENVELOPE = (0.7, 1.0)
ERASE_MAX_AREA = 0.2


def _check_range(r: tuple[float, float], envelope: tuple[float, float], what: str):
    lo, hi = r
    if not (envelope[0] <= lo <= hi <= envelope[1]):
        raise ValueError(f"{what} range {r} outside envelope {envelope}")


def _rng(seed: int, image_id: int, variant_index: int, op_index: int):
    key = np.array([seed & _MASK64, image_id & _MASK64], dtype=np.uint64)
    counter = np.array([0, op_index, variant_index, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(counter=counter, key=key))


@dataclass(frozen=True)
class ColorJitter:
    alpha_range: tuple[float, float] = ALPHA_ENVELOPE
    beta_range: tuple[float, float] = BETA_ENVELOPE
    name: ClassVar[str] = "color_jitter"

    def __post_init__(self):
        _check_range(self.alpha_range, ALPHA_ENVELOPE, "alpha")
        _check_range(self.beta_range, BETA_ENVELOPE, "beta")

    def draw(self, rng, shape):
        return (rng.uniform(*self.alpha_range), rng.uniform(*self.beta_range))

    def apply(self, img: np.ndarray, params) -> np.ndarray:
        alpha, beta = params
        out = img.astype(np.float64) * alpha + beta
        return np.clip(np.rint(out), 0, 255).astype(np.uint8)


@dataclass(frozen=True)
class Rotate:
    degrees_range: tuple[float, float] = THETA_ENVELOPE
    name: ClassVar[str] = "rotate"

    def __post_init__(self):
        _check_range(self.degrees_range, THETA_ENVELOPE, "degrees")

    def draw(self, rng, shape):
        return (rng.uniform(*self.degrees_range),)

    def apply(self, img: np.ndarray, params) -> np.ndarray:
        (degrees,) = params
        h, w = img.shape[:2]
        rad = math.radians(degrees)
        cos, sin = math.cos(rad), math.sin(rad)
        cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
        yy, xx = np.meshgrid(
            np.arange(h, dtype=np.float64),
            np.arange(w, dtype=np.float64),
            indexing="ij",
        )
        dx, dy = xx - cx, yy - cy
        # inverse map: where in the source does each output pixel come from
        sx = cos * dx + sin * dy + cx
        sy = -sin * dx + cos * dy + cy
        x0 = np.floor(sx)
        y0 = np.floor(sy)
        fx, fy = sx - x0, sy - y0
        x0 = x0.astype(np.int64)
        y0 = y0.astype(np.int64)
        acc = np.zeros((h, w, img.shape[2]), dtype=np.float64)
        for ys, xs, wgt in (
            (y0, x0, (1 - fy) * (1 - fx)),
            (y0, x0 + 1, (1 - fy) * fx),
            (y0 + 1, x0, fy * (1 - fx)),
            (y0 + 1, x0 + 1, fy * fx),
        ):
            valid = (ys >= 0) & (ys < h) & (xs >= 0) & (xs < w)
            yc = np.clip(ys, 0, h - 1)
            xc = np.clip(xs, 0, w - 1)
            acc += img[yc, xc].astype(np.float64) * (wgt * valid)[..., None]
        return np.clip(np.rint(acc), 0, 255).astype(np.uint8)


def _crop_dims(h: int, w: int, area: float) -> tuple[int, int]:
    side = math.sqrt(area)
    ch = int(round(h * side))
    cw = int(round(w * side))
    if ch < MIN_CROP or cw < MIN_CROP:
        raise DegenerateImage(
            f"crop {ch}x{cw} from {h}x{w} is below the {MIN_CROP}x{MIN_CROP} minimum"
        )
    return ch, cw


@dataclass(frozen=True)
class ResizedCrop:
    area_range: tuple[float, float] = AREA_ENVELOPE
    name: ClassVar[str] = "resized_crop"

    def __post_init__(self):
        _check_range(self.area_range, AREA_ENVELOPE, "area")

    def draw(self, rng, shape):
        h, w = shape
        ch, cw = _crop_dims(h, w, rng.uniform(*self.area_range))
        top = int(rng.integers(0, h - ch + 1))
        left = int(rng.integers(0, w - cw + 1))
        return (ch, cw, top, left)

    def apply(self, img: np.ndarray, params) -> np.ndarray:
        ch, cw, top, left = params
        h, w = img.shape[:2]
        if ch < MIN_CROP or cw < MIN_CROP:
            raise DegenerateImage(f"crop {ch}x{cw} below minimum")
        crop = img[top : top + ch, left : left + cw].astype(np.float64)
        out = np.empty((h, w, img.shape[2]), dtype=np.float64)
        for c in range(img.shape[2]):
            out[:, :, c] = _kernels.box_resize(np.ascontiguousarray(crop[:, :, c]), h, w)
        return np.clip(np.rint(out), 0, 255).astype(np.uint8)


@dataclass(frozen=True)
class Erase:
    max_area: float = ERASE_MAX_AREA
    name: ClassVar[str] = "erase"

    def __post_init__(self):
        if not 0.0 <= self.max_area <= ERASE_MAX_AREA:
            raise ValueError(
                f"max_area {self.max_area} outside [0, {ERASE_MAX_AREA}]"
            )

    def draw(self, rng, shape):
        h, w = shape
        side = math.sqrt(rng.uniform(0.0, self.max_area))
        eh = int(round(h * side))
        ew = int(round(w * side))
        top = int(rng.integers(0, h - eh + 1))
        left = int(rng.integers(0, w - ew + 1))
        return (eh, ew, top, left)

    def apply(self, img: np.ndarray, params) -> np.ndarray:
        eh, ew, top, left = params
        out = img.copy()
        out[top : top + eh, left : left + ew] = 0
        return out


Op = ColorJitter | Rotate | ResizedCrop | Erase


def default_ops() -> tuple[Op, ...]:
    return (ColorJitter(), Rotate(), ResizedCrop(), Erase())


@dataclass(frozen=True)
class AugmentSpec:
    seed: int
    ops: tuple[Op, ...] = field(default_factory=default_ops)
    variants_per_image: int = 4

    def __post_init__(self):
        if not 0 <= self.seed <= _MASK64:
            raise ValueError(f"seed must be an unsigned 64-bit value, got {self.seed}")
        if not self.ops:
            raise ValueError("ops list must be non-empty")
        if self.variants_per_image < 0:
            raise ValueError("variants_per_image must be >= 0")


def augment(
    img: np.ndarray, spec: AugmentSpec, variant_index: int, image_id: int = 0
) -> np.ndarray:
    """One augmented variant of img; a pure function of its arguments.

    Output has the input's shape. The input is never modified.
    """
    out = img
    for op_index, op in enumerate(spec.ops):
        rng = _rng(spec.seed, image_id, variant_index, op_index)
        params = op.draw(rng, out.shape[:2])
        out = op.apply(out, params)
    return out


def build_aug_corpus(
    m: Manifest,
    spec: AugmentSpec,
    out_dir: str | Path,
    loader: Callable[[ImageRecord], np.ndarray] | None = None,
) -> Manifest:
    """Original plus variants_per_image copies per source record, as PNGs.

    Each source record becomes one fresh group (size variants_per_image + 1)
    whose members share group_id g<source id>. Output records are ordered
    by (source id, variant index), variant 0 being the untouched original;
    file names sort the same way, so re-scanning out_dir reproduces the
    manifest order. Splits pass through from the source records.
    """
    if loader is None:
        loader = lambda rec: decode_file(rec.path)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records: list[ImageRecord] = []
    next_id = 0
    for rec in m.records:
        src = loader(rec)
        group = f"g{rec.id:06d}"
        for v in range(spec.variants_per_image + 1):
            img = src if v == 0 else augment(src, spec, v, image_id=rec.id)
            path = out_dir / f"aug{rec.id:06d}_v{v:02d}.png"
            Image.fromarray(img, "RGB").save(path, format="PNG")
            records.append(
                ImageRecord(
                    id=next_id, path=path.as_posix(), group_id=group, split=rec.split
                )
            )
            next_id += 1
    return Manifest(tuple(records), source=f"augment:{m.source}")
