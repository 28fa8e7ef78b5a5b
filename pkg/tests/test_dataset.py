"""Directory scanning, CIFAR binary parsing, and manifest round-trips."""

import numpy as np
import pytest
from PIL import Image

from dedupkit.dataset import (
    ImageRecord,
    Manifest,
    load_cifar10,
    load_cifar100,
    read_manifest,
    renumber,
    scan_dir,
    write_manifest,
)
from dedupkit.errors import BadLabel, BadRegex, MalformedRow, MissingRoot, TruncatedFile


def touch_png(path):
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.zeros((2, 2, 3), dtype=np.uint8)).save(path, "PNG")


# --- scan_dir ---------------------------------------------------------------


def test_scan_empty_dir(tmp_path):
    m = scan_dir(tmp_path)
    assert len(m) == 0
    assert m.source == f"dir:{tmp_path.as_posix()}"


def test_scan_missing_root(tmp_path):
    with pytest.raises(MissingRoot):
        scan_dir(tmp_path / "nope")


def test_scan_collects_supported_extensions_only(tmp_path):
    for name in ["a.png", "b.jpg", "c.JPEG", "d.bmp", "e.gif", "f.txt", "g.PNG"]:
        touch_png(tmp_path / name)
    m = scan_dir(tmp_path)
    names = [r.path.rsplit("/", 1)[1] for r in m]
    assert names == ["a.png", "b.jpg", "c.JPEG", "d.bmp", "g.PNG"]
    assert [r.id for r in m] == [0, 1, 2, 3, 4]


def test_scan_orders_by_posix_path_bytes(tmp_path):
    # code-point ordering, not locale: "Z" < "a", nested paths compare as text
    for name in ["z/x.png", "Z.png", "a.png", "a/b.png"]:
        touch_png(tmp_path / name)
    m = scan_dir(tmp_path)
    rels = [r.path[len(tmp_path.as_posix()) + 1 :] for r in m]
    assert rels == ["Z.png", "a.png", "a/b.png", "z/x.png"]


def test_scan_ukbench_style_groups(tmp_path):
    for i in range(8):
        touch_png(tmp_path / f"ukbench{i:05d}.jpg")
    m = scan_dir(
        tmp_path,
        "regex",
        group_regex=r"ukbench(\d{5})",
        group_divisor=4,
    )
    assert len(m) == 8
    assert [r.group_id for r in m] == ["0"] * 4 + ["1"] * 4


def test_scan_parent_dir_groups(tmp_path):
    touch_png(tmp_path / "a" / "x.png")
    touch_png(tmp_path / "b" / "x.png")
    m = scan_dir(tmp_path, "parent_dir")
    assert [r.group_id for r in m] == ["a", "b"]


def test_scan_regex_without_match_leaves_no_group(tmp_path):
    touch_png(tmp_path / "photo.png")
    touch_png(tmp_path / "img042.png")
    m = scan_dir(tmp_path, "regex", group_regex=r"img(\d+)")
    assert [r.group_id for r in m] == ["042", None]  # raw capture, no divisor


def test_scan_regex_validation(tmp_path):
    touch_png(tmp_path / "x.png")
    with pytest.raises(BadRegex):
        scan_dir(tmp_path, "regex", group_regex=r"img(\d+")  # unbalanced
    with pytest.raises(BadRegex):
        scan_dir(tmp_path, "regex", group_regex=r"img\d+")  # no capture
    with pytest.raises(BadRegex):
        scan_dir(tmp_path, "regex", group_regex=r"(a)(b)")  # two captures
    with pytest.raises(ValueError):
        scan_dir(tmp_path, "regex")  # regex missing
    with pytest.raises(ValueError):
        scan_dir(tmp_path, "sorted_by_vibes")


def test_scan_divisor_requires_integer_capture(tmp_path):
    touch_png(tmp_path / "imgX.png")
    with pytest.raises(BadRegex):
        scan_dir(tmp_path, "regex", group_regex=r"img(\w+)", group_divisor=4)


# --- CIFAR binaries ---------------------------------------------------------


def cifar10_bytes(labels, value=7):
    out = bytearray()
    for i, lab in enumerate(labels):
        out.append(lab)
        out.extend([(value + i) % 256] * 3072)
    return bytes(out)


def write_cifar10_tree(root, per_batch=2):
    root.mkdir(parents=True, exist_ok=True)
    for b in range(1, 6):
        (root / f"data_batch_{b}.bin").write_bytes(
            cifar10_bytes(range(per_batch), value=b)
        )
    (root / "test_batch.bin").write_bytes(cifar10_bytes(range(per_batch), value=99))


def test_cifar10_small_tree(tmp_path):
    write_cifar10_tree(tmp_path, per_batch=2)
    m, images = load_cifar10(tmp_path)
    assert len(m) == 12
    assert images.shape == (12, 32, 32, 3)
    assert images.dtype == np.uint8
    assert [r.id for r in m] == list(range(12))
    assert m.split_counts() == {"train": 10, "val": 2}
    assert m.records[0].path == "cifar10:data_batch_1.bin#0"
    assert m.records[11].path == "cifar10:test_batch.bin#1"
    # pixel channel layout: first batch wrote constant 1s then 2s
    assert np.all(images[0] == 1)
    assert np.all(images[1] == 2)


def test_cifar10_channel_order(tmp_path):
    tmp_path.mkdir(exist_ok=True)
    rec = bytearray([3])
    rec.extend([10] * 1024)  # red plane
    rec.extend([20] * 1024)  # green plane
    rec.extend([30] * 1024)  # blue plane
    for b in range(1, 6):
        (tmp_path / f"data_batch_{b}.bin").write_bytes(bytes(rec))
    (tmp_path / "test_batch.bin").write_bytes(bytes(rec))
    _, images = load_cifar10(tmp_path)
    assert np.all(images[0, :, :, 0] == 10)
    assert np.all(images[0, :, :, 1] == 20)
    assert np.all(images[0, :, :, 2] == 30)


def test_cifar10_row_major_pixels(tmp_path):
    rec = bytearray([0]) + bytearray(3072)
    rec[1 + 33] = 255  # red plane, row 1, col 1
    for b in range(1, 6):
        (tmp_path / f"data_batch_{b}.bin").write_bytes(bytes(rec))
    (tmp_path / "test_batch.bin").write_bytes(bytes(rec))
    _, images = load_cifar10(tmp_path)
    assert images[0, 1, 1, 0] == 255
    assert images[0].sum() == 255


def test_cifar10_truncated(tmp_path):
    write_cifar10_tree(tmp_path)
    (tmp_path / "data_batch_3.bin").write_bytes(bytes(3072))
    with pytest.raises(TruncatedFile):
        load_cifar10(tmp_path)


def test_cifar10_bad_label(tmp_path):
    write_cifar10_tree(tmp_path)
    (tmp_path / "data_batch_2.bin").write_bytes(cifar10_bytes([0, 10]))
    with pytest.raises(BadLabel):
        load_cifar10(tmp_path)


def test_cifar10_missing_file(tmp_path):
    write_cifar10_tree(tmp_path)
    (tmp_path / "test_batch.bin").unlink()
    with pytest.raises(MissingRoot):
        load_cifar10(tmp_path)
    with pytest.raises(MissingRoot):
        load_cifar10(tmp_path / "absent")


def test_cifar100_single_record(tmp_path):
    tmp_path.mkdir(exist_ok=True)
    rec = bytes([19, 99]) + bytes([5] * 3072)
    (tmp_path / "train.bin").write_bytes(rec)
    (tmp_path / "test.bin").write_bytes(rec)
    m, images = load_cifar100(tmp_path)
    assert len(m) == 2
    assert m.split_counts() == {"train": 1, "val": 1}
    assert images.shape == (2, 32, 32, 3)
    assert m.records[0].path == "cifar100:train.bin#0"


def test_cifar100_bad_labels(tmp_path):
    tmp_path.mkdir(exist_ok=True)
    good = bytes([19, 99]) + bytes(3072)
    (tmp_path / "test.bin").write_bytes(good)
    (tmp_path / "train.bin").write_bytes(bytes([20, 0]) + bytes(3072))
    with pytest.raises(BadLabel):
        load_cifar100(tmp_path)
    (tmp_path / "train.bin").write_bytes(bytes([0, 255]) + bytes(3072))
    with pytest.raises(BadLabel):
        load_cifar100(tmp_path)
    (tmp_path / "train.bin").write_bytes(good + good[:100])
    with pytest.raises(TruncatedFile):
        load_cifar100(tmp_path)


# --- manifest I/O -----------------------------------------------------------


def sample_manifest():
    return Manifest(
        (
            ImageRecord(0, "imgs/a.png", group_id="g0", split="train"),
            ImageRecord(1, "imgs/b.png", group_id=None, split="val"),
            ImageRecord(2, "imgs/c.png", group_id="g1", split=None),
        ),
        source="test",
    )


def test_manifest_roundtrip(tmp_path):
    m = sample_manifest()
    p = tmp_path / "m.csv"
    write_manifest(m, p)
    back = read_manifest(p)
    assert back.records == m.records
    assert back.source == f"manifest:{p.as_posix()}"


def test_manifest_file_format(tmp_path):
    p = tmp_path / "m.csv"
    write_manifest(sample_manifest(), p)
    raw = p.read_bytes()
    assert raw == (
        b"id,split,group_id,path\n"
        b"0,train,g0,imgs/a.png\n"
        b"1,val,,imgs/b.png\n"
        b"2,,g1,imgs/c.png\n"
    )


def test_header_only_file(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("id,split,group_id,path\n")
    assert len(read_manifest(p)) == 0


def test_write_rejects_commas_in_fields(tmp_path):
    m = Manifest((ImageRecord(0, "a,b.png"),))
    with pytest.raises(ValueError):
        write_manifest(m, tmp_path / "m.csv")
    m = Manifest((ImageRecord(0, "a.png", group_id="g,1"),))
    with pytest.raises(ValueError):
        write_manifest(m, tmp_path / "m.csv")


@pytest.mark.parametrize(
    "body,row",
    [
        ("0,train,g0", 2),               # 3 fields
        ("0,train,g0,a.png,extra", 2),   # 5 fields
        ("zero,train,g0,a.png", 2),      # non-integer id
        ("0,test,g0,a.png", 2),          # unknown split
        ("0,,,a.png\n0,,,b.png", 3),     # duplicate id, second row
    ],
)
def test_read_rejects_malformed_rows(tmp_path, body, row):
    p = tmp_path / "m.csv"
    p.write_text(f"id,split,group_id,path\n{body}\n")
    with pytest.raises(MalformedRow, match=f"row {row}"):
        read_manifest(p)


def test_read_rejects_wrong_header(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("id;split;group;path\n")
    with pytest.raises(MalformedRow, match="row 1"):
        read_manifest(p)
    p.write_text("")
    with pytest.raises(MalformedRow):
        read_manifest(p)


# --- Manifest behavior ------------------------------------------------------


def test_manifest_rejects_duplicate_ids():
    with pytest.raises(ValueError):
        Manifest((ImageRecord(0, "a.png"), ImageRecord(0, "b.png")))


def test_manifest_split_accessors():
    m = sample_manifest()
    assert m.splits() == ("train", "val", None)
    assert m.split_counts() == {"train": 1, "val": 1, None: 1}


def test_manifest_subset_preserves_order_and_ids():
    m = sample_manifest()
    s = m.subset([2, 0])
    assert [r.id for r in s] == [0, 2]
    assert s.source == "test"
    assert s.subset([]).records == ()


def test_renumber_makes_ids_dense():
    m = sample_manifest().subset([1, 2])
    r = renumber(m)
    assert [x.id for x in r] == [0, 1]
    assert [x.path for x in r] == ["imgs/b.png", "imgs/c.png"]
