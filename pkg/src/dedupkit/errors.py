"""Exception types raised across the package."""

__all__ = [
    "DedupkitError",
    "UnsupportedFormat",
    "CorruptStream",
    "ZeroDimension",
    "NonSquareInput",
    "BadLevelCount",
    "AlgoMismatch",
    "MissingRoot",
    "BadRegex",
    "TruncatedFile",
    "BadLabel",
    "MalformedRow",
    "DegenerateImage",
    "CountMismatch",
    "MissingGroups",
    "BadThresholdList",
]


class DedupkitError(Exception):
    """Base class for all dedupkit errors."""


# imaging
class UnsupportedFormat(DedupkitError):
    """Input is not a PNG, JPEG, or BMP stream."""


class CorruptStream(DedupkitError):
    """Input claims a supported format but cannot be decoded."""


class ZeroDimension(DedupkitError):
    """Requested resize target has a zero or negative dimension."""


# spectral
class NonSquareInput(DedupkitError):
    """Transform requires a square input grid."""


class BadLevelCount(DedupkitError):
    """Decomposition depth does not divide the grid size."""


# hashing / index
class AlgoMismatch(DedupkitError):
    """Hashes from different algorithms cannot be compared or co-indexed."""


# dataset
class MissingRoot(DedupkitError):
    """Scan root does not exist."""


class BadRegex(DedupkitError):
    """Grouping regex is invalid or lacks exactly one capture group."""


class TruncatedFile(DedupkitError):
    """Binary dataset file length is not a multiple of the record size."""


class BadLabel(DedupkitError):
    """Binary dataset record carries an out-of-range label byte."""


class MalformedRow(DedupkitError):
    """Manifest CSV row cannot be parsed (row number in message)."""


# augment
class DegenerateImage(DedupkitError):
    """Augmentation would produce an image smaller than 8x8 pixels."""


# metrics
class CountMismatch(DedupkitError):
    """Number of hashes does not match the number of manifest records."""


class MissingGroups(DedupkitError):
    """Ground-truth scoring requires a group id on every record."""


class BadThresholdList(DedupkitError):
    """Threshold list must be sorted ascending with values in [0, 63]."""
