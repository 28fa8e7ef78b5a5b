"""Pure numpy implementations of the hot kernels.

Contracts match dedupkit._kernels._core exactly; see that module for the
compiled versions. Hash arrays are uint64, one 64-bit hash per element.
"""

from functools import lru_cache

import numpy as np

# xor blocks are capped around this many uint64 elements to bound memory
_BLOCK_ELEMS = 1 << 23


@lru_cache(maxsize=64)
def _overlap_matrix(n_in: int, n_out: int) -> np.ndarray:
    """(n_out, n_in) box-overlap lengths in 1/n_out input-cell units.

    All entries are exact small integers and every row sums to n_in, so a
    weighted sum divided by n_in is the box average.
    """
    i = np.arange(n_out, dtype=np.int64)[:, None]
    j = np.arange(n_in, dtype=np.int64)[None, :]
    lo = np.maximum(i * n_in, j * n_out)
    hi = np.minimum((i + 1) * n_in, (j + 1) * n_out)
    w = np.maximum(hi - lo, 0).astype(np.float64)
    w.setflags(write=False)
    return w


def _split(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Veltkamp split: a == hi + lo with 26-bit hi and 26-bit lo mantissas,
    # so integer-weighted sums of either part never round (constraint:
    # weights and their running totals stay below 2**27).
    t = a * 134217729.0  # 2**27 + 1
    hi = t - (t - a)
    return hi, a - hi


def box_resize(src: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Area-averaging resample of a 2D float64 grid to (out_h, out_w).

    Weights are exact integers and the input is accumulated as split
    high/low streams, which keeps two guarantees bit-exact: equal inputs
    give equal outputs (a constant grid stays constant, whatever the
    target size), and same-size resampling is the identity.
    """
    src = np.ascontiguousarray(src, dtype=np.float64)
    in_h, in_w = src.shape
    oh = _overlap_matrix(in_h, out_h)
    ow = _overlap_matrix(in_w, out_w)
    hi, lo = _split(src)
    tmp = (oh @ hi) / in_h + (oh @ lo) / in_h
    hi, lo = _split(tmp)
    return (hi @ ow.T) / in_w + (lo @ ow.T) / in_w


def _block_rows(n: int) -> int:
    return max(1, _BLOCK_ELEMS // max(n, 1))


def neighbor_counts(hashes: np.ndarray, th: int) -> np.ndarray:
    """Per-entry count of hashes within hamming distance th, self included."""
    hashes = np.ascontiguousarray(hashes, dtype=np.uint64)
    n = len(hashes)
    counts = np.zeros(n, dtype=np.int64)
    step = _block_rows(n)
    for s in range(0, n, step):
        d = np.bitwise_count(hashes[s : s + step, None] ^ hashes[None, :])
        counts[s : s + step] = (d <= th).sum(axis=1)
    return counts


def distance_histograms(hashes: np.ndarray) -> np.ndarray:
    """(n, 65) histogram of hamming distances per entry, self counted at 0."""
    hashes = np.ascontiguousarray(hashes, dtype=np.uint64)
    n = len(hashes)
    hist = np.zeros((n, 65), dtype=np.int64)
    step = _block_rows(n)
    for s in range(0, n, step):
        d = np.bitwise_count(hashes[s : s + step, None] ^ hashes[None, :])
        for i in range(d.shape[0]):
            hist[s + i] = np.bincount(d[i], minlength=65)
    return hist


def dedup_scan(hashes: np.ndarray, th: int):
    """First-seen-kept streaming dedup over hashes in array order.

    Returns (keep, rep, dist): keep is a bool mask; for discarded entries
    rep holds the index of the minimum-distance kept representative
    (earliest kept wins ties) and dist the distance; both are -1 for kept
    entries.
    """
    hashes = np.ascontiguousarray(hashes, dtype=np.uint64)
    n = len(hashes)
    keep = np.zeros(n, dtype=bool)
    rep = np.full(n, -1, dtype=np.int64)
    dist = np.full(n, -1, dtype=np.int64)
    kept_bits = np.empty(n, dtype=np.uint64)
    kept_idx = np.empty(n, dtype=np.int64)
    k = 0
    for i in range(n):
        if k:
            d = np.bitwise_count(kept_bits[:k] ^ hashes[i])
            j = int(np.argmin(d))  # first minimum = earliest kept
            if d[j] <= th:
                rep[i] = kept_idx[j]
                dist[i] = int(d[j])
                continue
        keep[i] = True
        kept_bits[k] = hashes[i]
        kept_idx[k] = i
        k += 1
    return keep, rep, dist
