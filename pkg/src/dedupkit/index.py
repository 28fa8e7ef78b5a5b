"""Hamming-radius search (BK-tree) and the streaming duplicate decision rule.

The BK-tree gives exact radius queries: a child edge keyed k can contain
a hash within distance th of the query only if |k - d(parent, query)| <= th
(triangle inequality), so only those edges are descended.

`dedup_stream` and `dup_counts` operate on packed uint64 arrays through
the kernel layer, which is interchangeable with querying a BKIndex per
record (the test suite holds the two routes equal).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import AlgoMismatch
from .hashing import Hash64, HashAlgo


def check_threshold(th: int) -> int:
    if not 0 <= th <= 63:
        raise ValueError(f"threshold must be in [0, 63], got {th}")
    return th


class _Node:
    __slots__ = ("bits", "ids", "seqs", "children")

    def __init__(self, bits: int, id_: Hashable, seq: int):
        self.bits = bits
        self.ids = [id_]
        self.seqs = [seq]
        self.children: dict[int, _Node] = {}


class BKIndex:
    """Metric tree over same-algorithm Hash64 values under hamming distance.

    Exact duplicates (distance 0) share one node, so inserting the same
    hash twice yields one node carrying both ids.
    """

    def __init__(self, algo: HashAlgo | None = None):
        self.algo = algo
        self._root: _Node | None = None
        self._size = 0

    def __len__(self) -> int:
        return self._size

    @property
    def size(self) -> int:
        return self._size

    def _check_algo(self, h: Hash64):
        if self.algo is None:
            self.algo = h.algo
        elif h.algo is not self.algo:
            raise AlgoMismatch(
                f"index holds {self.algo.value} hashes, got {h.algo.value}"
            )

    def insert(self, h: Hash64, id_: Hashable) -> None:
        """Insert a hash with its payload id."""
        self._check_algo(h)
        seq = self._size
        self._size += 1
        if self._root is None:
            self._root = _Node(h.bits, id_, seq)
            return
        node = self._root
        while True:
            d = (h.bits ^ node.bits).bit_count()
            if d == 0:
                node.ids.append(id_)
                node.seqs.append(seq)
                return
            child = node.children.get(d)
            if child is None:
                node.children[d] = _Node(h.bits, id_, seq)
                return
            node = child

    def radius_query(self, h: Hash64, th: int) -> list[tuple[Hashable, int]]:
        """All stored (id, distance) pairs with distance <= th, ordered by
        (distance, insertion order)."""
        self._check_algo(h)
        check_threshold(th)
        if self._root is None:
            return []
        hits: list[tuple[int, int, Hashable]] = []
        stack = [self._root]
        bits = h.bits
        while stack:
            node = stack.pop()
            d = (bits ^ node.bits).bit_count()
            if d <= th:
                hits.extend((d, seq, id_) for seq, id_ in zip(node.seqs, node.ids))
            lo = d - th
            hi = d + th
            for key, child in node.children.items():
                if lo <= key <= hi:
                    stack.append(child)
        hits.sort(key=lambda t: (t[0], t[1]))
        return [(id_, d) for d, _, id_ in hits]


def _pack_records(
    records: Sequence[tuple[Hashable, Hash64]],
) -> tuple[list[Hashable], np.ndarray]:
    ids = [id_ for id_, _ in records]
    algos = {h.algo for _, h in records}
    if len(algos) > 1:
        names = sorted(a.value for a in algos)
        raise AlgoMismatch(f"records mix hash algorithms: {names}")
    bits = np.fromiter((h.bits for _, h in records), dtype=np.uint64, count=len(records))
    return ids, bits


def dedup_stream(
    records: Iterable[tuple[Hashable, Hash64]], th: int
) -> tuple[list[Hashable], list[tuple[Hashable, Hashable, int]]]:
    """First-seen-kept streaming dedup over records in the given order.

    Each record is compared against previously *kept* records only: if any
    kept hash lies within th, the record is discarded and assigned to the
    minimum-distance representative (earliest kept on ties) and never
    inserted; otherwise it joins the kept set. Not a transitive closure;
    output is a pure function of (record order, th).

    Returns (kept ids, discarded (id, representative id, distance) triples).
    """
    check_threshold(th)
    records = list(records)
    if not records:
        return [], []
    ids, bits = _pack_records(records)
    keep, rep, dist = _kernels.dedup_scan(bits, th)
    kept = [ids[i] for i in np.flatnonzero(keep)]
    discarded = [
        (ids[i], ids[rep[i]], int(dist[i])) for i in np.flatnonzero(~keep)
    ]
    return kept, discarded


@dataclass(frozen=True)
class DupStats:
    """Mean +/- population std and median of per-record neighborhood sizes."""

    mean: float
    std: float
    median: float


def dup_counts(
    records: Sequence[tuple[Hashable, Hash64]], th: int
) -> tuple[np.ndarray, DupStats]:
    """Per-record count of records within th (self included), plus summary.

    Symmetric over the full record list, so the counts are independent of
    record order.
    """
    check_threshold(th)
    if not records:
        return np.zeros(0, dtype=np.int64), DupStats(0.0, 0.0, 0.0)
    _, bits = _pack_records(records)
    counts = _kernels.neighbor_counts(bits, th)
    return counts, DupStats(
        mean=float(counts.mean()),
        std=float(counts.std()),  # population std
        median=float(np.median(counts)),
    )
