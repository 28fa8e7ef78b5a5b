"""End-to-end runs: ingest, hash, dedup, report, kept-manifest export.

Hashing may fan out to a thread pool, but results are committed strictly
in manifest order, so every downstream decision and file is independent
of the worker count. The kept manifest preserves original record ids;
downstream consumers (a training job, typically) read it via
export_training_manifest's CSV contract.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import (
    Manifest,
    load_cifar10,
    load_cifar100,
    read_manifest,
    scan_dir,
    write_manifest,
)
from .hashing import Hash64, HashAlgo, ThresholdStat, compute_hash
from .imaging import decode_file
from .index import check_threshold
from .metrics import DedupReport, evaluate_dedup_full

SOURCE_KINDS = ("dir", "cifar10", "cifar100", "manifest")
SCOPES = ("per_split", "joint")


@dataclass(frozen=True)
class RunConfig:
    source_kind: str
    source_path: str | Path
    algo: HashAlgo = HashAlgo.PHASH
    stat: ThresholdStat = ThresholdStat.MEAN
    th: int = 6
    keep_policy: str = "first"
    scope: str = "per_split"
    out_report: str | Path | None = None
    out_manifest: str | Path | None = None
    workers: int = 1

    def __post_init__(self):
        if self.source_kind not in SOURCE_KINDS:
            raise ValueError(f"source_kind must be one of {SOURCE_KINDS}")
        check_threshold(self.th)
        if self.keep_policy != "first":
            raise ValueError("only keep_policy='first' is supported")
        if self.scope not in SCOPES:
            raise ValueError(f"scope must be one of {SCOPES}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def ingest(kind: str, path: str | Path) -> tuple[Manifest, np.ndarray | None]:
    """Resolve a source into (manifest, optional in-memory images)."""
    if kind == "dir":
        return scan_dir(path), None
    if kind == "cifar10":
        return load_cifar10(path)
    if kind == "cifar100":
        return load_cifar100(path)
    if kind == "manifest":
        return read_manifest(path), None
    raise ValueError(f"unknown source kind {kind!r}")


def compute_hashes(
    m: Manifest,
    algo: HashAlgo,
    stat: ThresholdStat = ThresholdStat.MEAN,
    *,
    workers: int = 1,
    images: np.ndarray | None = None,
) -> tuple[list[Hash64], float]:
    """One hash per record, in manifest order, plus wall seconds spent.

    images, when given, holds decoded pixels positionally aligned with the
    records; otherwise each record's path is decoded from disk. Results
    are committed in manifest order whatever the completion order.
    """

    def one(i: int) -> Hash64:
        if images is not None:
            img = images[i]
        else:
            img = decode_file(m.records[i].path)
        return compute_hash(img, algo, stat)

    t0 = time.perf_counter()
    if workers <= 1 or len(m) < 2:
        hashes = [one(i) for i in range(len(m))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            hashes = list(ex.map(one, range(len(m))))
    return hashes, time.perf_counter() - t0


def export_training_manifest(m: Manifest, path: str | Path) -> None:
    """Write the deduplicated manifest consumed by downstream training.

    Plain manifest CSV (id,split,group_id,path); kept records only,
    original ids and split labels preserved.
    """
    write_manifest(m, path)


def run(config: RunConfig) -> tuple[DedupReport, Manifest]:
    """Ingest, hash, dedup, and write the configured outputs.

    Returns the report and the kept-records manifest. Output files are
    removed again if any write fails partway.
    """
    m, images = ingest(config.source_kind, config.source_path)
    hashes, hash_time = compute_hashes(
        m, config.algo, config.stat, workers=config.workers, images=images
    )
    report, outcome = evaluate_dedup_full(
        m, hashes, config.th, scope=config.scope, hash_time_s=hash_time
    )
    kept = m.subset(outcome.kept_ids, source=f"dedup:{m.source}")

    written: list[Path] = []
    try:
        if config.out_report is not None:
            p = Path(config.out_report)
            written.append(p)
            p.write_text(report.to_json(), encoding="utf-8", newline="\n")
        if config.out_manifest is not None:
            p = Path(config.out_manifest)
            written.append(p)
            export_training_manifest(kept, p)
    except BaseException:
        for p in written:
            p.unlink(missing_ok=True)
        raise
    return report, kept
