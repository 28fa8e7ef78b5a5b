"""Orthonormal 2D DCT-II and multi-level 2D Haar DWT kernels.

Both transforms use orthonormal scaling, so they preserve energy
(Parseval) and invert by transposition. Grids are small (N <= 64);
cached matrix products are plenty fast.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import BadLevelCount, NonSquareInput

_SQRT_HALF = np.sqrt(0.5)


@lru_cache(maxsize=16)
def _dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II matrix D with D[k, x] = a(k) cos(pi (2x+1) k / 2n)."""
    k = np.arange(n)[:, None]
    x = np.arange(n)[None, :]
    d = np.cos(np.pi * (2 * x + 1) * k / (2 * n))
    d *= np.sqrt(2.0 / n)
    d[0] *= _SQRT_HALF
    d.setflags(write=False)
    return d


def _check_square(grid: np.ndarray, op: str) -> np.ndarray:
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 2 or grid.shape[0] != grid.shape[1]:
        raise NonSquareInput(f"{op} requires a square grid, got shape {grid.shape}")
    if grid.shape[0] < 2:
        raise NonSquareInput(f"{op} requires N >= 2, got N = {grid.shape[0]}")
    return grid


def dct2(grid: np.ndarray) -> np.ndarray:
    """Orthonormal 2D DCT-II of a square N x N grid."""
    grid = _check_square(grid, "dct2")
    d = _dct_matrix(grid.shape[0])
    return d @ grid @ d.T


def idct2(coeffs: np.ndarray) -> np.ndarray:
    """Exact inverse of dct2 (orthonormal, so the transpose inverts)."""
    coeffs = _check_square(coeffs, "idct2")
    d = _dct_matrix(coeffs.shape[0])
    return d.T @ coeffs @ d


def _haar_level(block: np.ndarray) -> np.ndarray:
    # one separable rows-then-columns step with filters (1, 1)/sqrt2, (1, -1)/sqrt2
    lo = (block[:, 0::2] + block[:, 1::2]) * _SQRT_HALF
    hi = (block[:, 0::2] - block[:, 1::2]) * _SQRT_HALF
    rows = np.hstack([lo, hi])
    lo = (rows[0::2, :] + rows[1::2, :]) * _SQRT_HALF
    hi = (rows[0::2, :] - rows[1::2, :]) * _SQRT_HALF
    return np.vstack([lo, hi])


def haar_dwt2(grid: np.ndarray, levels: int) -> np.ndarray:
    """Multi-level orthonormal 2D Haar DWT in the standard packed layout.

    Each level transforms the current approximation quadrant in place; the
    top-left (N / 2**levels)^2 block of the result is the final LL band.
    """
    grid = _check_square(grid, "haar_dwt2")
    n = grid.shape[0]
    if levels < 1:
        raise BadLevelCount(f"levels must be >= 1, got {levels}")
    if n % (1 << levels) != 0:
        raise BadLevelCount(f"grid size {n} is not divisible by 2**{levels}")
    out = grid.copy()
    size = n
    for _ in range(levels):
        out[:size, :size] = _haar_level(out[:size, :size])
        size //= 2
    return out
