"""Command-line front end.

Subcommands: hash, dedup, sweep, augment, import-cifar10, import-cifar100,
eval-groups. Machine-readable output goes to files; stdout carries one
short summary line. Exit codes: 0 success, 2 usage error (bad flags),
1 runtime failure (messages on stderr).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__, pipeline
from .augment import AugmentSpec, build_aug_corpus
from .dataset import Manifest, read_manifest, scan_dir, write_manifest
from .errors import DedupkitError
from .hashing import HashAlgo, ThresholdStat
from .metrics import evaluate_dedup_full, score_against_groups, sweep

ALGO_NAMES = [a.value for a in HashAlgo]
STAT_NAMES = [s.value for s in ThresholdStat]


def _threshold(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"threshold must be an integer, got {text!r}")
    if not 0 <= v <= 63:
        raise argparse.ArgumentTypeError(f"threshold must be in [0, 63], got {v}")
    return v


def _threshold_list(text: str) -> list[int]:
    """Inclusive range `a..b` or comma list `3,9,6`; always sorted ascending."""
    try:
        if ".." in text:
            lo_s, hi_s = text.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
            if lo > hi:
                raise ValueError
            ths = list(range(lo, hi + 1))
        else:
            ths = sorted({int(x) for x in text.split(",")})
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad threshold list {text!r}") from None
    if not ths:
        raise argparse.ArgumentTypeError("threshold list is empty")
    for t in ths:
        if not 0 <= t <= 63:
            raise argparse.ArgumentTypeError(f"threshold {t} outside [0, 63]")
    return ths


def _workers(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"workers must be an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"workers must be >= 1, got {v}")
    return v


def _default_workers() -> int:
    env = os.environ.get("DEDUPKIT_WORKERS")
    if env is None:
        return 1
    try:
        v = int(env)
    except ValueError:
        return 1
    return max(1, v)


def _input_kind(path: str) -> str:
    return "dir" if Path(path).is_dir() else "manifest"


def _load_input(path: str) -> Manifest:
    kind = _input_kind(path)
    return scan_dir(path) if kind == "dir" else read_manifest(path)


def _add_common(p: argparse.ArgumentParser, default_algo: str = "phash"):
    p.add_argument("--input", required=True, help="image directory or manifest CSV")
    p.add_argument("--algo", choices=ALGO_NAMES, default=default_algo)
    p.add_argument("--stat", choices=STAT_NAMES, default="mean",
                   help="spectral threshold statistic (phash only)")
    p.add_argument("--workers", type=_workers, default=None,
                   help="hash worker threads (default: DEDUPKIT_WORKERS or 1)")


def cmd_hash(args) -> int:
    m = _load_input(args.input)
    algo = HashAlgo(args.algo)
    hashes, _ = pipeline.compute_hashes(
        m, algo, ThresholdStat(args.stat), workers=args.workers or _default_workers()
    )
    lines = ["id,path,algo,hash_hex"]
    lines.extend(
        f"{r.id},{r.path},{algo.value},{h.hex}" for r, h in zip(m.records, hashes)
    )
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    print(f"hashed={len(m)}")
    return 0


def cmd_dedup(args) -> int:
    config = pipeline.RunConfig(
        source_kind=_input_kind(args.input),
        source_path=args.input,
        algo=HashAlgo(args.algo),
        stat=ThresholdStat(args.stat),
        th=args.threshold,
        scope=args.scope.replace("-", "_"),
        out_report=args.report,
        out_manifest=args.out_manifest,
        workers=args.workers or _default_workers(),
    )
    report, _ = pipeline.run(config)
    print(
        f"kept={report.kept} discarded={report.discarded} "
        f"reduction={report.reduction_ratio:.4f}"
    )
    return 0


def cmd_sweep(args) -> int:
    m = _load_input(args.input)
    hashes, _ = pipeline.compute_hashes(
        m, HashAlgo(args.algo), ThresholdStat(args.stat),
        workers=args.workers or _default_workers(),
    )
    curve = sweep(m, hashes, args.thresholds)
    Path(args.out).write_text(curve.to_csv(), encoding="utf-8", newline="\n")
    print(f"rows={len(curve.thresholds)}")
    return 0


def cmd_augment(args) -> int:
    m = _load_input(args.input)
    spec = AugmentSpec(seed=args.seed, variants_per_image=args.variants)
    corpus = build_aug_corpus(m, spec, args.out_dir)
    if args.out_manifest:
        write_manifest(corpus, args.out_manifest)
    groups = len({r.group_id for r in corpus.records})
    print(f"records={len(corpus)} groups={groups}")
    return 0


def _cmd_import(args, kind: str) -> int:
    m, images = pipeline.ingest(kind, args.dir)
    if args.out_images:
        from PIL import Image

        root = Path(args.out_images)
        records = []
        for i, r in enumerate(m.records):
            sub = root / (r.split or "all")
            sub.mkdir(parents=True, exist_ok=True)
            p = sub / f"{r.id:06d}.png"
            Image.fromarray(images[i], "RGB").save(p, format="PNG")
            records.append(
                type(r)(id=r.id, path=p.as_posix(), group_id=r.group_id, split=r.split)
            )
        m = Manifest(tuple(records), source=m.source)
    write_manifest(m, args.out_manifest)
    counts = m.split_counts()
    print(f"train={counts.get('train', 0)} val={counts.get('val', 0)}")
    return 0


def cmd_import_cifar10(args) -> int:
    return _cmd_import(args, "cifar10")


def cmd_import_cifar100(args) -> int:
    return _cmd_import(args, "cifar100")


def cmd_eval_groups(args) -> int:
    m = _load_input(args.input)
    hashes, _ = pipeline.compute_hashes(
        m, HashAlgo(args.algo), ThresholdStat(args.stat),
        workers=args.workers or _default_workers(),
    )
    _, outcome = evaluate_dedup_full(
        m, hashes, args.threshold, scope=args.scope.replace("-", "_")
    )
    ev = score_against_groups(m, outcome.discarded, args.threshold)
    print(f"precision={ev.precision:.4f} recall={ev.recall:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dedupkit",
        description="Near-duplicate image detection with 64-bit perceptual hashes.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hash", help="hash every image to a CSV")
    _add_common(p)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_hash)

    p = sub.add_parser("dedup", help="drop near-duplicates, write report and manifest")
    _add_common(p)
    p.add_argument(
        "--threshold", type=_threshold, default=6,
        help="max hamming distance treated as duplicate, 0..63 "
             "(useful values rarely exceed 12; default 6)",
    )
    p.add_argument("--scope", choices=["per-split", "joint"], default="per-split")
    p.add_argument("--report", help="report JSON path")
    p.add_argument("--out-manifest", help="kept-records manifest CSV path")
    p.set_defaults(func=cmd_dedup)

    p = sub.add_parser("sweep", help="duplicate statistics across thresholds")
    _add_common(p)
    p.add_argument(
        "--thresholds", type=_threshold_list, default=list(range(0, 51)),
        help="inclusive range a..b or comma list (default 0..50)",
    )
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("augment", help="generate a grouped near-duplicate corpus")
    p.add_argument("--input", required=True, help="source image directory or manifest")
    p.add_argument("--out-dir", required=True, help="directory for generated PNGs")
    p.add_argument("--out-manifest", help="manifest CSV for the generated corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variants", type=int, default=4, help="variants per source image")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("import-cifar10", help="manifest from CIFAR-10 binaries")
    p.add_argument("--dir", required=True, help="directory holding the .bin batches")
    p.add_argument("--out-manifest", required=True)
    p.add_argument("--out-images", help="materialize PNGs here and point paths at them")
    p.set_defaults(func=cmd_import_cifar10)

    p = sub.add_parser("import-cifar100", help="manifest from CIFAR-100 binaries")
    p.add_argument("--dir", required=True)
    p.add_argument("--out-manifest", required=True)
    p.add_argument("--out-images", help="materialize PNGs here and point paths at them")
    p.set_defaults(func=cmd_import_cifar100)

    p = sub.add_parser("eval-groups", help="precision/recall against group labels")
    _add_common(p)
    p.add_argument("--threshold", type=_threshold, default=6)
    p.add_argument("--scope", choices=["per-split", "joint"], default="joint")
    p.set_defaults(func=cmd_eval_groups)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DedupkitError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # last-resort boundary so tracebacks stay off stdout
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
