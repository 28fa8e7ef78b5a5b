"""Near-duplicate image detection with 64-bit perceptual hashes.

Images are reduced to compact spectral or gradient signatures (ahash,
dhash, phash, whash); hamming distance between signatures approximates
visual similarity. On top of that sit an exact radius-search index, a
streaming first-seen-kept deduplication rule, corpus ingestion (image
directories, CIFAR binaries), deterministic near-duplicate synthesis for
evaluation, and reporting.

Hot inner loops run in a compiled extension when it is available and fall
back to pure numpy otherwise; `dedupkit.backend()` names the active one.
"""

__version__ = "0.1.0"

from ._kernels import HAVE_COMPILED, backend_name as backend
from .augment import (
    AugmentSpec,
    ColorJitter,
    Erase,
    ResizedCrop,
    Rotate,
    augment,
    build_aug_corpus,
    default_ops,
)
from .dataset import (
    ImageRecord,
    Manifest,
    load_cifar10,
    load_cifar100,
    read_manifest,
    renumber,
    scan_dir,
    write_manifest,
)
from .errors import *  # noqa: F401,F403 - the errors module defines __all__
from .hashing import (
    Hash64,
    HashAlgo,
    ThresholdStat,
    ahash,
    compute_hash,
    dhash,
    hamming,
    phash,
    whash,
)
from .imaging import decode, decode_file, resize, to_grayscale
from .index import BKIndex, DupStats, dedup_stream, dup_counts
from .metrics import (
    BYTES_PER_INDEX_ENTRY,
    DedupOutcome,
    DedupReport,
    GroundTruthEval,
    SweepCurve,
    evaluate_dedup,
    evaluate_dedup_full,
    score_against_groups,
    sweep,
)
from .pipeline import RunConfig, compute_hashes, export_training_manifest, ingest, run
from .spectral import dct2, haar_dwt2, idct2
