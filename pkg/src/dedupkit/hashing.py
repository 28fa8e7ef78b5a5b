"""The four 64-bit perceptual hash algorithms and hamming distance.

Bit layout: the bit for 8x8 grid cell (r, c) sits at position
63 - (8r + c), so the 16-digit hex form reads the grid row-major from
the top-left. Thresholds compare with strict ">"; ties map to bit 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import AlgoMismatch
from .imaging import resize, to_grayscale
from .spectral import dct2, haar_dwt2


class HashAlgo(Enum):
    AHASH = "ahash"
    DHASH = "dhash"
    PHASH = "phash"
    WHASH = "whash"


class ThresholdStat(Enum):
    """Statistic used to binarize phash/whash coefficient blocks."""

    MEAN = "mean"
    MEDIAN = "median"


@dataclass(frozen=True, slots=True)
class Hash64:
    """A 64-bit perceptual hash tagged with its algorithm."""

    bits: int
    algo: HashAlgo

    def __post_init__(self):
        if not 0 <= self.bits < 1 << 64:
            raise ValueError(f"hash bits out of 64-bit range: {self.bits:#x}")

    @property
    def hex(self) -> str:
        return f"{self.bits:016x}"

    def __str__(self) -> str:
        return f"{self.algo.value}:{self.hex}"

    @classmethod
    def parse(cls, text: str) -> "Hash64":
        """Parse the canonical `<algo>:<16 hex digits>` form."""
        algo_name, _, hex_part = text.partition(":")
        if len(hex_part) != 16:
            raise ValueError(f"expected 16 hex digits in {text!r}")
        return cls(int(hex_part, 16), HashAlgo(algo_name))


def _pack_bits(bitgrid: np.ndarray) -> int:
    """Pack an 8x8 boolean grid row-major, cell (0, 0) at bit 63."""
    return int.from_bytes(np.packbits(bitgrid.reshape(64)).tobytes(), "big")


def _block_mean(block: np.ndarray) -> float:
    # balanced pairwise sum: v + v is always exact, so the mean of a
    # constant block is exactly its value and strict ">" stays all-false
    s = np.ravel(block).copy()
    n = s.size
    while n > 1:
        n //= 2
        s = s[:n] + s[n : 2 * n]
    return float(s[0]) / block.size


def _gray_grid(img: np.ndarray, w: int, h: int) -> np.ndarray:
    return resize(to_grayscale(img), w, h)


def ahash(img: np.ndarray) -> Hash64:
    """Average hash: 8x8 downsample, bit = pixel strictly above the mean."""
    grid = _gray_grid(img, 8, 8)
    return Hash64(_pack_bits(grid > _block_mean(grid)), HashAlgo.AHASH)


def dhash(img: np.ndarray) -> Hash64:
    """Difference hash: 9x8 downsample, bit = pixel strictly above its right neighbor."""
    grid = _gray_grid(img, 9, 8)
    return Hash64(_pack_bits(grid[:, :8] > grid[:, 1:]), HashAlgo.DHASH)


def phash(img: np.ndarray, stat: ThresholdStat = ThresholdStat.MEAN) -> Hash64:
    """DCT hash: 32x32 downsample, orthonormal DCT-II, threshold the
    top-left 8x8 coefficient block (DC included) at its mean or median."""
    coeffs = dct2(_gray_grid(img, 32, 32))[:8, :8]
    t = np.median(coeffs) if stat is ThresholdStat.MEDIAN else _block_mean(coeffs)
    return Hash64(_pack_bits(coeffs > t), HashAlgo.PHASH)


def whash(img: np.ndarray, stat: ThresholdStat = ThresholdStat.MEAN) -> Hash64:
    """Wavelet hash: 64x64 downsample, 3-level Haar DWT, threshold the 8x8
    LL band as in phash."""
    ll = haar_dwt2(_gray_grid(img, 64, 64), levels=3)[:8, :8]
    t = np.median(ll) if stat is ThresholdStat.MEDIAN else _block_mean(ll)
    return Hash64(_pack_bits(ll > t), HashAlgo.WHASH)


_DISPATCH = {
    HashAlgo.AHASH: lambda img, stat: ahash(img),
    HashAlgo.DHASH: lambda img, stat: dhash(img),
    HashAlgo.PHASH: phash,
    HashAlgo.WHASH: whash,
}


def compute_hash(
    img: np.ndarray, algo: HashAlgo, stat: ThresholdStat = ThresholdStat.MEAN
) -> Hash64:
    """Hash an RGB image with the chosen algorithm.

    `stat` selects the binarization statistic for phash/whash; ahash and
    dhash are defined without one and ignore it.
    """
    return _DISPATCH[algo](img, stat)


def hamming(a: Hash64, b: Hash64) -> int:
    """Number of differing bits; only defined between same-algorithm hashes."""
    if a.algo is not b.algo:
        raise AlgoMismatch(f"cannot compare {a.algo.value} with {b.algo.value}")
    return (a.bits ^ b.bits).bit_count()
