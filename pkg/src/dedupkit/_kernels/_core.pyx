"""Compiled versions of the hot kernels; see fallback.py for the contracts."""

import numpy as np


cdef extern from *:
    """
    #if defined(_MSC_VER)
    #include <intrin.h>
    static inline int dk_popcount64(unsigned long long x) { return (int)__popcnt64(x); }
    #else
    static inline int dk_popcount64(unsigned long long x) { return __builtin_popcountll(x); }
    #endif
    """
    int dk_popcount64(unsigned long long x) nogil


cdef void _resample_axis(double[:, ::1] src, double[:, ::1] dst) noexcept nogil:
    # Box-average along axis 1: dst (rows, out_w) from src (rows, in_w).
    # Overlap weights are exact integers in 1/out_w input-cell units (each
    # output cell's weights sum to in_w), and every source value is split
    # into 26-bit high/low parts accumulated separately, so equal inputs
    # always produce bit-equal outputs: constant rows resample to exactly
    # constant rows and same-width resampling is the identity.
    cdef Py_ssize_t rows = src.shape[0]
    cdef Py_ssize_t in_w = src.shape[1]
    cdef Py_ssize_t out_w = dst.shape[1]
    cdef Py_ssize_t r, j, k, k0, k1
    cdef long long a, b, cell_lo, cell_hi, ov
    cdef double v, t, vh, vl, acc_h, acc_l, w
    for r in range(rows):
        for j in range(out_w):
            a = j * in_w            # output cell interval, units of 1/out_w
            b = a + in_w
            k0 = a // out_w
            k1 = (b + out_w - 1) // out_w
            acc_h = 0.0
            acc_l = 0.0
            for k in range(k0, k1):
                cell_lo = k * out_w
                cell_hi = cell_lo + out_w
                ov = (b if b < cell_hi else cell_hi) - (a if a > cell_lo else cell_lo)
                if ov <= 0:
                    continue
                w = <double> ov
                v = src[r, k]
                t = v * 134217729.0  # 2**27 + 1, Veltkamp split
                vh = t - (t - v)
                vl = v - vh
                acc_h += w * vh
                acc_l += w * vl
            dst[r, j] = acc_h / in_w + acc_l / in_w


def box_resize(src, Py_ssize_t out_h, Py_ssize_t out_w):
    """Area-averaging resample of a 2D float64 grid to (out_h, out_w)."""
    cdef double[:, ::1] s = np.ascontiguousarray(src, dtype=np.float64)
    tmp_arr = np.empty((s.shape[0], out_w), dtype=np.float64)
    cdef double[:, ::1] tmp = tmp_arr
    out_arr = np.empty((out_w, out_h), dtype=np.float64)
    cdef double[:, ::1] out_t = out_arr
    tmp_t_arr = np.empty((out_w, s.shape[0]), dtype=np.float64)
    cdef double[:, ::1] tmp_t = tmp_t_arr
    with nogil:
        _resample_axis(s, tmp)
    tmp_t_arr[...] = tmp_arr.T
    with nogil:
        _resample_axis(tmp_t, out_t)
    return np.ascontiguousarray(out_arr.T)


def neighbor_counts(hashes, int th):
    """Per-entry count of hashes within hamming distance th, self included."""
    cdef unsigned long long[::1] h = np.ascontiguousarray(hashes, dtype=np.uint64)
    cdef Py_ssize_t n = h.shape[0]
    counts_arr = np.ones(n, dtype=np.int64)
    cdef long long[::1] counts = counts_arr
    cdef Py_ssize_t i, j
    cdef unsigned long long hi
    with nogil:
        for i in range(n):
            hi = h[i]
            for j in range(i + 1, n):
                if dk_popcount64(hi ^ h[j]) <= th:
                    counts[i] += 1
                    counts[j] += 1
    return counts_arr


def distance_histograms(hashes):
    """(n, 65) histogram of hamming distances per entry, self counted at 0."""
    cdef unsigned long long[::1] h = np.ascontiguousarray(hashes, dtype=np.uint64)
    cdef Py_ssize_t n = h.shape[0]
    hist_arr = np.zeros((n, 65), dtype=np.int64)
    cdef long long[:, ::1] hist = hist_arr
    cdef Py_ssize_t i, j
    cdef int d
    cdef unsigned long long hi
    with nogil:
        for i in range(n):
            hist[i, 0] += 1
            hi = h[i]
            for j in range(i + 1, n):
                d = dk_popcount64(hi ^ h[j])
                hist[i, d] += 1
                hist[j, d] += 1
    return hist_arr


def dedup_scan(hashes, int th):
    """First-seen-kept streaming dedup; contract as in fallback.dedup_scan."""
    cdef unsigned long long[::1] h = np.ascontiguousarray(hashes, dtype=np.uint64)
    cdef Py_ssize_t n = h.shape[0]
    keep_arr = np.zeros(n, dtype=np.uint8)
    rep_arr = np.full(n, -1, dtype=np.int64)
    dist_arr = np.full(n, -1, dtype=np.int64)
    kept_bits_arr = np.empty(n, dtype=np.uint64)
    kept_idx_arr = np.empty(n, dtype=np.int64)
    cdef unsigned char[::1] keep = keep_arr
    cdef long long[::1] rep = rep_arr
    cdef long long[::1] dist = dist_arr
    cdef unsigned long long[::1] kept_bits = kept_bits_arr
    cdef long long[::1] kept_idx = kept_idx_arr
    cdef Py_ssize_t i, j, k = 0, best
    cdef int d, best_d
    cdef unsigned long long hi
    with nogil:
        for i in range(n):
            hi = h[i]
            best = -1
            best_d = 65
            for j in range(k):
                d = dk_popcount64(kept_bits[j] ^ hi)
                if d < best_d:  # strict: earliest kept wins ties
                    best_d = d
                    best = j
                    if d == 0:
                        break
            if best >= 0 and best_d <= th:
                rep[i] = kept_idx[best]
                dist[i] = best_d
            else:
                keep[i] = 1
                kept_bits[k] = hi
                kept_idx[k] = i
                k += 1
    return keep_arr.view(bool), rep_arr, dist_arr
