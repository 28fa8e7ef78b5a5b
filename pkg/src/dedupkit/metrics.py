"""Dedup run reports, threshold sweeps, and ground-truth scoring.

Memory is an analytic estimate, kept entries times a declared per-entry
cost, rather than a process RSS probe; the estimate is deterministic and
therefore testable. Wall-clock fields are reported but never part of any
determinism guarantee.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels, index
from .dataset import Manifest
from .errors import BadThresholdList, CountMismatch, MissingGroups
from .hashing import Hash64

# 8 bytes of hash payload plus declared bookkeeping overhead per kept entry
# (ids, tree pointers, child map slot).
BYTES_PER_INDEX_ENTRY = 96

# Commonly cited storage cost of one hex-string hash entry in a generic
# key-value store; recorded in reports for comparison, never used.
PAPER_REFERENCE_BYTES_PER_HASH = 113

REPORT_CSV_HEADER = "method,th,time_hash_s,mem_bytes,dup_mean,dup_std"
SWEEP_CSV_HEADER = "th,dup_median,kept"

Discard = tuple[int, int, int]  # (discarded id, representative id, distance)


@dataclass(frozen=True)
class DedupOutcome:
    """Raw keep/discard decisions, ids as in the source manifest."""

    kept_ids: tuple[int, ...]
    discarded: tuple[Discard, ...]


@dataclass(frozen=True)
class DedupReport:
    algo: str
    th: int
    total: int
    kept: int
    discarded: int
    reduction_ratio: float
    dup_mean: float
    dup_std: float
    dup_median: float
    hash_time_s: float
    index_time_s: float
    mem_bytes_estimate: int
    kept_per_split: dict[str, int] = field(default_factory=dict)
    paper_reference_bytes_per_hash: int = PAPER_REFERENCE_BYTES_PER_HASH

    def __post_init__(self):
        if self.kept + self.discarded != self.total:
            raise ValueError("kept + discarded != total")
        if not 0.0 <= self.reduction_ratio <= 1.0:
            raise ValueError(f"reduction_ratio out of range: {self.reduction_ratio}")

    def to_json(self) -> str:
        """JSON document with keys in declaration order."""
        d = {
            "algo": self.algo,
            "th": self.th,
            "total": self.total,
            "kept": self.kept,
            "discarded": self.discarded,
            "reduction_ratio": self.reduction_ratio,
            "dup_mean": self.dup_mean,
            "dup_std": self.dup_std,
            "dup_median": self.dup_median,
            "hash_time_s": self.hash_time_s,
            "index_time_s": self.index_time_s,
            "mem_bytes_estimate": self.mem_bytes_estimate,
            "kept_per_split": self.kept_per_split,
            "paper_reference_bytes_per_hash": self.paper_reference_bytes_per_hash,
        }
        return json.dumps(d, indent=2) + "\n"

    def to_csv_row(self) -> str:
        return (
            f"{self.algo},{self.th},{self.hash_time_s:.6f},"
            f"{self.mem_bytes_estimate},{self.dup_mean:.6f},{self.dup_std:.6f}"
        )


def _split_views(
    m: Manifest, hashes: Sequence[Hash64], scope: str
) -> list[list[tuple[int, Hash64]]]:
    """Record (id, hash) streams to dedup independently, manifest order."""
    if len(hashes) != len(m):
        raise CountMismatch(f"{len(m)} records but {len(hashes)} hashes")
    if scope not in ("per_split", "joint"):
        raise ValueError(f"scope must be per_split or joint, got {scope!r}")
    pairs = [(r.id, h) for r, h in zip(m.records, hashes)]
    if scope == "joint":
        return [pairs]
    by_split: dict[str | None, list[tuple[int, Hash64]]] = {}
    for r, pair in zip(m.records, pairs):
        by_split.setdefault(r.split, []).append(pair)
    return [by_split[s] for s in m.splits()]


def evaluate_dedup_full(
    m: Manifest,
    hashes: Sequence[Hash64],
    th: int,
    *,
    scope: str = "per_split",
    hash_time_s: float = 0.0,
) -> tuple[DedupReport, DedupOutcome]:
    """Dedup decisions plus the summary report.

    scope per_split runs the streaming rule within each split separately
    (a record is never discarded for matching the other split); joint runs
    one stream over the whole manifest order. Neighborhood counts follow
    the same scoping. hash_time_s is caller-measured and passed through.
    """
    index.check_threshold(th)
    views = _split_views(m, hashes, scope)
    t0 = time.perf_counter()
    kept_ids: list[int] = []
    discarded: list[Discard] = []
    all_counts: list[np.ndarray] = []
    for view in views:
        kept_v, disc_v = index.dedup_stream(view, th)
        kept_ids.extend(kept_v)
        discarded.extend(disc_v)
        counts, _ = index.dup_counts(view, th)
        all_counts.append(counts)
    index_time_s = time.perf_counter() - t0

    counts = np.concatenate(all_counts) if all_counts else np.zeros(0, np.int64)
    total = len(m)
    kept = len(kept_ids)
    kept_set = set(kept_ids)
    kept_per_split: dict[str, int] = {}
    if any(r.split is not None for r in m.records):
        for r in m.records:
            key = r.split or ""
            kept_per_split.setdefault(key, 0)
            if r.id in kept_set:
                kept_per_split[key] += 1
    report = DedupReport(
        algo=hashes[0].algo.value if hashes else "",
        th=th,
        total=total,
        kept=kept,
        discarded=len(discarded),
        reduction_ratio=(1.0 - kept / total) if total else 0.0,
        dup_mean=float(counts.mean()) if total else 0.0,
        dup_std=float(counts.std()) if total else 0.0,
        dup_median=float(np.median(counts)) if total else 0.0,
        hash_time_s=hash_time_s,
        index_time_s=index_time_s,
        mem_bytes_estimate=kept * BYTES_PER_INDEX_ENTRY,
        kept_per_split=kept_per_split,
    )
    return report, DedupOutcome(tuple(kept_ids), tuple(discarded))


def evaluate_dedup(
    m: Manifest,
    hashes: Sequence[Hash64],
    th: int,
    *,
    scope: str = "per_split",
    hash_time_s: float = 0.0,
) -> DedupReport:
    report, _ = evaluate_dedup_full(
        m, hashes, th, scope=scope, hash_time_s=hash_time_s
    )
    return report


@dataclass(frozen=True)
class SweepCurve:
    thresholds: tuple[int, ...]
    dup_median: tuple[float, ...]
    kept: tuple[int, ...]

    def __post_init__(self):
        for a, b in zip(self.dup_median, self.dup_median[1:]):
            if b < a:
                raise ValueError("dup_median must be non-decreasing in threshold")
        for a, b in zip(self.kept, self.kept[1:]):
            if b > a:
                raise ValueError("kept must be non-increasing in threshold")

    def to_csv(self) -> str:
        lines = [SWEEP_CSV_HEADER]
        lines.extend(
            f"{th},{med:.1f},{k}"
            for th, med, k in zip(self.thresholds, self.dup_median, self.kept)
        )
        return "\n".join(lines) + "\n"


def check_thresholds(thresholds: Sequence[int]) -> tuple[int, ...]:
    ths = tuple(int(t) for t in thresholds)
    if not ths:
        raise BadThresholdList("threshold list is empty")
    for t in ths:
        if not 0 <= t <= 63:
            raise BadThresholdList(f"threshold {t} outside [0, 63]")
    for a, b in zip(ths, ths[1:]):
        if b <= a:
            raise BadThresholdList("thresholds must be strictly ascending")
    return ths


def sweep(m: Manifest, hashes: Sequence[Hash64], thresholds: Sequence[int]) -> SweepCurve:
    """dup_median and kept count at each threshold, over the whole manifest.

    Pairwise distances are aggregated once into per-record histograms;
    each threshold then reads a prefix sum, and only the cheap streaming
    scan reruns per threshold.
    """
    ths = check_thresholds(thresholds)
    if len(hashes) != len(m):
        raise CountMismatch(f"{len(m)} records but {len(hashes)} hashes")
    records = [(r.id, h) for r, h in zip(m.records, hashes)]
    if not records:
        return SweepCurve(ths, (0.0,) * len(ths), (0,) * len(ths))
    _, bits = index._pack_records(records)
    hist = _kernels.distance_histograms(bits)
    cum = np.cumsum(hist, axis=1)
    medians = []
    kepts = []
    for th in ths:
        medians.append(float(np.median(cum[:, th])))
        keep, _, _ = _kernels.dedup_scan(bits, th)
        kepts.append(int(keep.sum()))
    return SweepCurve(ths, tuple(medians), tuple(kepts))


@dataclass(frozen=True)
class GroundTruthEval:
    th: int
    true_positive_discards: int
    precision: float
    recall: float

    def __post_init__(self):
        if not (0.0 <= self.precision <= 1.0 and 0.0 <= self.recall <= 1.0):
            raise ValueError("precision and recall must be within [0, 1]")


def score_against_groups(
    m: Manifest, discarded: Sequence[Discard], th: int
) -> GroundTruthEval:
    """Precision and recall of discard decisions against group labels.

    A discard is a true positive when the record and its representative
    share a group. Ideal dedup keeps exactly one record per group, so
    recall divides by total - number_of_groups; precision divides by the
    discard count. Empty denominators score 1.0 (nothing to get wrong).
    """
    group_of: dict[int, str] = {}
    for r in m.records:
        if r.group_id is None:
            raise MissingGroups(f"record {r.id} has no group_id")
        group_of[r.id] = r.group_id
    tp = sum(1 for rec, rep, _ in discarded if group_of[rec] == group_of[rep])
    n_discarded = len(discarded)
    precision = tp / n_discarded if n_discarded else 1.0
    denom = len(m) - len(set(group_of.values()))
    recall = tp / denom if denom else 1.0
    return GroundTruthEval(
        th=th, true_positive_discards=tp, precision=precision, recall=recall
    )
