"""Corpus ingestion: directory walking, CIFAR binary parsing, manifest I/O.

A manifest is the canonical description of a corpus: ordered records with
dense ids, optional train/val split, optional ground-truth group labels.
Directory scans order records lexicographically by (split, relative path)
using plain code-point comparison (byte order under UTF-8, no locale).
Binary datasets keep record order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import BadLabel, BadRegex, MalformedRow, MissingRoot, TruncatedFile

SUPPORTED_EXTENSIONS = {".png", ".jpg", ".jpeg", ".bmp"}

MANIFEST_HEADER = "id,split,group_id,path"
_SPLITS = ("train", "val")


@dataclass(frozen=True, slots=True)
class ImageRecord:
    id: int
    path: str
    group_id: str | None = None
    split: str | None = None


@dataclass(frozen=True)
class Manifest:
    """Ordered, immutable record list plus a human-readable origin tag."""

    records: tuple[ImageRecord, ...]
    source: str = ""

    def __post_init__(self):
        ids = [r.id for r in self.records]
        if len(set(ids)) != len(ids):
            raise ValueError("manifest ids are not unique")

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def split_counts(self) -> dict[str | None, int]:
        counts: dict[str | None, int] = {}
        for r in self.records:
            counts[r.split] = counts.get(r.split, 0) + 1
        return counts

    def splits(self) -> tuple[str | None, ...]:
        """Distinct split values in first-appearance order."""
        seen: dict[str | None, None] = {}
        for r in self.records:
            seen.setdefault(r.split)
        return tuple(seen)

    def subset(self, ids: Iterable[int], source: str | None = None) -> "Manifest":
        """Records whose id is in `ids`, original order and ids preserved."""
        want = set(ids)
        kept = tuple(r for r in self.records if r.id in want)
        return Manifest(kept, self.source if source is None else source)


def _compile_group_rule(
    group_rule: str, group_regex: str | None, group_divisor: int
) -> Callable[[Path], str | None]:
    if group_rule == "none":
        return lambda rel: None
    if group_rule == "parent_dir":
        return lambda rel: rel.parent.as_posix()
    if group_rule != "regex":
        raise ValueError(f"unknown group rule: {group_rule!r}")
    if group_regex is None:
        raise ValueError("group_rule='regex' requires group_regex")
    if group_divisor < 1:
        raise ValueError(f"group_divisor must be >= 1, got {group_divisor}")
    try:
        pat = re.compile(group_regex)
    except re.error as e:
        raise BadRegex(f"cannot compile {group_regex!r}: {e}") from None
    if pat.groups != 1:
        raise BadRegex(
            f"pattern must have exactly one capture group, got {pat.groups}"
        )

    def rule(rel: Path) -> str | None:
        m = pat.search(rel.name)
        if m is None:
            return None
        cap = m.group(1)
        if group_divisor == 1:
            return cap
        if not cap.isdigit():
            raise BadRegex(
                f"group_divisor set but capture {cap!r} from {rel.name!r} "
                "is not an integer"
            )
        return str(int(cap) // group_divisor)

    return rule


def scan_dir(
    root: str | Path,
    group_rule: str = "none",
    *,
    group_regex: str | None = None,
    group_divisor: int = 1,
) -> Manifest:
    """Recursively collect supported images under `root` into a manifest.

    group_rule is one of:
      none        no group labels
      parent_dir  group = containing directory, relative to root
      regex       group = the single capture of group_regex applied to the
                  file name; with group_divisor > 1 the capture is parsed
                  as an integer and floor-divided (sequentially numbered
                  corpora where every k consecutive files form one group)

    Files whose name does not match the regex get no group label.
    """
    root = Path(root)
    if not root.is_dir():
        raise MissingRoot(f"not a directory: {root}")
    rule = _compile_group_rule(group_rule, group_regex, group_divisor)
    rels = sorted(
        (
            p.relative_to(root)
            for p in root.rglob("*")
            if p.is_file() and p.suffix.lower() in SUPPORTED_EXTENSIONS
        ),
        key=lambda rel: rel.as_posix(),
    )
    records = tuple(
        ImageRecord(id=i, path=(root / rel).as_posix(), group_id=rule(rel))
        for i, rel in enumerate(rels)
    )
    return Manifest(records, source=f"dir:{root.as_posix()}")


def _parse_cifar_file(
    path: Path, pixel_offset: int, label_checks: Sequence[tuple[int, int]]
) -> tuple[np.ndarray, np.ndarray]:
    """Parse one fixed-record binary file.

    Records are pixel_offset label bytes followed by 3072 pixel bytes
    (1024 per channel, each row-major 32x32). label_checks gives
    (byte_index, max_value) pairs validated over every record.
    Returns (labels, images) with images shaped (n, 32, 32, 3) uint8;
    labels is the last label byte of each record (the fine label).
    """
    if not path.is_file():
        raise MissingRoot(f"missing dataset file: {path}")
    data = np.fromfile(path, dtype=np.uint8)
    rec_size = pixel_offset + 3072
    if data.size % rec_size != 0:
        raise TruncatedFile(
            f"{path}: {data.size} bytes is not a multiple of {rec_size}"
        )
    recs = data.reshape(-1, rec_size)
    for idx, bound in label_checks:
        bad = np.flatnonzero(recs[:, idx] > bound)
        if bad.size:
            raise BadLabel(
                f"{path}: record {bad[0]} label byte {idx} is "
                f"{recs[bad[0], idx]}, max {bound}"
            )
    images = (
        recs[:, pixel_offset:].reshape(-1, 3, 32, 32).transpose(0, 2, 3, 1).copy()
    )
    return recs[:, pixel_offset - 1].copy(), images


def _load_cifar(
    root: str | Path,
    files: Sequence[tuple[str, str]],
    pixel_offset: int,
    label_checks: Sequence[tuple[int, int]],
    source: str,
) -> tuple[Manifest, np.ndarray]:
    root = Path(root)
    if not root.is_dir():
        raise MissingRoot(f"not a directory: {root}")
    records: list[ImageRecord] = []
    chunks: list[np.ndarray] = []
    next_id = 0
    for fname, split in files:
        _, images = _parse_cifar_file(root / fname, pixel_offset, label_checks)
        for i in range(images.shape[0]):
            records.append(
                ImageRecord(
                    id=next_id, path=f"{source}:{fname}#{i}", split=split
                )
            )
            next_id += 1
        chunks.append(images)
    all_images = (
        np.concatenate(chunks) if chunks else np.zeros((0, 32, 32, 3), np.uint8)
    )
    return Manifest(tuple(records), source=f"{source}:{root.as_posix()}"), all_images


def load_cifar10(root: str | Path) -> tuple[Manifest, np.ndarray]:
    """Parse the CIFAR-10 binary batches under `root`.

    Record format: 1 label byte (0..9) then 3072 pixel bytes as 1024 red,
    1024 green, 1024 blue, each channel row-major 32x32. data_batch_1..5
    become the train split, test_batch the val split. Returns the manifest
    and the decoded images as one (n, 32, 32, 3) uint8 array in record
    order; manifest paths are synthetic `cifar10:<file>#<index>` locators.
    """
    files = [(f"data_batch_{i}.bin", "train") for i in range(1, 6)]
    files.append(("test_batch.bin", "val"))
    return _load_cifar(root, files, 1, [(0, 9)], "cifar10")


def load_cifar100(root: str | Path) -> tuple[Manifest, np.ndarray]:
    """Parse the CIFAR-100 binaries (train.bin, test.bin) under `root`.

    Records carry two label bytes, coarse (0..19) then fine (0..99),
    followed by the same 3072-byte pixel layout as CIFAR-10.
    """
    files = [("train.bin", "train"), ("test.bin", "val")]
    return _load_cifar(root, files, 2, [(0, 19), (1, 99)], "cifar100")


def _check_field(value: str, what: str) -> str:
    if "," in value:
        raise ValueError(f"{what} contains a comma: {value!r}")
    if "\n" in value or "\r" in value:
        raise ValueError(f"{what} contains a line break: {value!r}")
    return value


def write_manifest(m: Manifest, path: str | Path) -> None:
    """Write a manifest as UTF-8 CSV with LF line endings.

    Columns: id,split,group_id,path. Empty cells encode absent split or
    group. Commas are forbidden in all fields, so no quoting is needed
    and the file is byte-deterministic.
    """
    lines = [MANIFEST_HEADER]
    for r in m.records:
        split = _check_field(r.split or "", "split")
        group = _check_field(r.group_id or "", "group_id")
        p = _check_field(r.path, "path")
        lines.append(f"{r.id},{split},{group},{p}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_manifest(path: str | Path) -> Manifest:
    """Inverse of write_manifest; read(write(m)) == m up to the source tag."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != MANIFEST_HEADER:
        got = lines[0] if lines else "<empty file>"
        raise MalformedRow(f"{path} row 1: expected header {MANIFEST_HEADER!r}, got {got!r}")
    records: list[ImageRecord] = []
    seen: set[int] = set()
    for rownum, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 4:
            raise MalformedRow(
                f"{path} row {rownum}: expected 4 fields, got {len(parts)}"
            )
        id_s, split, group, p = parts
        try:
            id_ = int(id_s)
        except ValueError:
            raise MalformedRow(f"{path} row {rownum}: bad id {id_s!r}") from None
        if split and split not in _SPLITS:
            raise MalformedRow(f"{path} row {rownum}: bad split {split!r}")
        if id_ in seen:
            raise MalformedRow(f"{path} row {rownum}: duplicate id {id_}")
        seen.add(id_)
        records.append(
            ImageRecord(
                id=id_, path=p, group_id=group or None, split=split or None
            )
        )
    return Manifest(tuple(records), source=f"manifest:{path.as_posix()}")


def renumber(m: Manifest, source: str | None = None) -> Manifest:
    """Reassign dense 0-based ids in record order."""
    records = tuple(replace(r, id=i) for i, r in enumerate(m.records))
    return Manifest(records, m.source if source is None else source)
