"""Shared fixtures: deterministic image corpora and result reporting.

The session-scoped corpora are built once into a shared tmp directory:
a grouped near-duplicate corpus (100 groups of 5) and a full-size
CIFAR-10-format dataset. Both are pure functions of hard-coded seeds, so
every run sees identical bytes.

Set CIFAR10_DIR to a directory holding the real CIFAR-10 binary batches
to run the dataset checks against them instead of the generated stand-in.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from dedupkit import AugmentSpec, ColorJitter, Erase, ResizedCrop, Rotate
from dedupkit import build_aug_corpus, resize, scan_dir
from dedupkit.dataset import Manifest

CORPUS_SEED = 20260817
CORPUS_GROUPS = 100
CORPUS_VARIANTS = 4

# gentle sub-envelope op parameters: strong enough to move hashes a few
# bits, weak enough that most variants stay near their source
CORPUS_OPS = (
    ColorJitter((0.93, 1.07), (-8.0, 8.0)),
    Rotate((-1.0, 1.0)),
    ResizedCrop((0.97, 1.0)),
    Erase(0.04),
)


def make_field(rng: np.random.Generator, size: int = 96, base: int = 8,
               texture: float = 12.0) -> np.ndarray:
    """Random mid-frequency grayscale field as an RGB uint8 image."""
    up = resize(rng.uniform(0.0, 255.0, (base, base)), size, size)
    g = np.clip(up + rng.normal(0.0, texture, (size, size)), 0.0, 255.0)
    return np.clip(np.rint(np.stack([g] * 3, axis=-1)), 0, 255).astype(np.uint8)


@pytest.fixture(scope="session")
def aug_corpus(tmp_path_factory) -> Manifest:
    """100 groups x 5 near-duplicate PNG corpus with ground-truth groups."""
    root = tmp_path_factory.mktemp("aug_corpus")
    src_dir = root / "sources"
    src_dir.mkdir()
    rng = np.random.default_rng(CORPUS_SEED)
    for i in range(CORPUS_GROUPS):
        Image.fromarray(make_field(rng), "RGB").save(src_dir / f"src{i:03d}.png")
    sources = scan_dir(src_dir)
    spec = AugmentSpec(
        seed=CORPUS_SEED, ops=CORPUS_OPS, variants_per_image=CORPUS_VARIANTS
    )
    return build_aug_corpus(sources, spec, root / "images")


def _write_cifar_batch(path: Path, images: np.ndarray, labels: np.ndarray) -> None:
    n = images.shape[0]
    recs = np.empty((n, 3073), dtype=np.uint8)
    recs[:, 0] = labels
    recs[:, 1:] = images.transpose(0, 3, 1, 2).reshape(n, 3072)
    path.write_bytes(recs.tobytes())


def _synth_cifar_images(n: int, seed: int) -> np.ndarray:
    """Smooth random 32x32 RGB fields, vectorized in batches."""
    from dedupkit._kernels.fallback import _overlap_matrix

    rng = np.random.default_rng(seed)
    w = _overlap_matrix(8, 32) / 8.0  # (32, 8) box-upscale weights
    out = np.empty((n, 32, 32, 3), dtype=np.uint8)
    step = 4096
    for s in range(0, n, step):
        e = min(n, s + step)
        base = rng.uniform(0.0, 255.0, (e - s, 3, 8, 8))
        up = np.einsum("oi,ncij,pj->ncop", w, base, w)
        up += rng.normal(0.0, 6.0, up.shape)
        out[s:e] = np.clip(np.rint(up), 0, 255).transpose(0, 2, 3, 1)
    return out


@pytest.fixture(scope="session")
def cifar10_dir(tmp_path_factory) -> Path:
    """Directory of CIFAR-10 binary batches: real if CIFAR10_DIR points at
    one, otherwise a generated full-size stand-in in the same format.

    The stand-in plants exact duplicates (about 1.7%) and lightly jittered
    copies so duplicate statistics behave like a natural corpus: most
    images unique, a small tail of near-duplicates.
    """
    env = os.environ.get("CIFAR10_DIR")
    if env:
        p = Path(env)
        if (p / "data_batch_1.bin").is_file():
            return p
    root = tmp_path_factory.mktemp("cifar10_synth")
    rng = np.random.default_rng(913)
    images = _synth_cifar_images(60000, seed=913)

    # exact duplicates: 1000 source images copied once each
    src = rng.choice(60000, size=2000, replace=False)
    dup_from, dup_to = src[:1000], src[1000:]
    images[dup_to] = images[dup_from]
    # near duplicates: 600 more pairs with small additive jitter
    src2 = rng.choice(60000, size=1200, replace=False)
    near_from, near_to = src2[:600], src2[600:]
    jitter = rng.normal(0.0, 2.5, (600, 32, 32, 3))
    images[near_to] = np.clip(
        np.rint(images[near_from].astype(np.float64) + jitter), 0, 255
    ).astype(np.uint8)

    labels = rng.integers(0, 10, 60000).astype(np.uint8)
    for b in range(5):
        sl = slice(b * 10000, (b + 1) * 10000)
        _write_cifar_batch(root / f"data_batch_{b + 1}.bin", images[sl], labels[sl])
    _write_cifar_batch(root / "test_batch.bin", images[50000:], labels[50000:])
    return root


_acceptance_results: dict[str, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if "test_acceptance.py" not in item.nodeid:
        return
    name = item.nodeid.split("::")[-1]
    if rep.when == "call" or (rep.when == "setup" and rep.skipped):
        _acceptance_results[name] = (
            "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name in sorted(_acceptance_results):
        terminalreporter.write_line(f"{_acceptance_results[name]}  {name}")
