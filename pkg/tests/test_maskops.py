from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from viewmatch.errors import CorruptRleError, EmptyMaskError, FormatError
from viewmatch.maskops import (
    BBox,
    Rle,
    bbox_from_mask,
    crop_square_transform,
    mask_iou,
    read_masks,
    rle_decode,
    rle_encode,
    write_masks,
)


def _random_mask(rng: np.random.Generator) -> np.ndarray:
    h = int(rng.integers(1, 65))
    w = int(rng.integers(1, 65))
    density = rng.uniform(0.0, 1.0)
    return rng.random((h, w)) < density


def test_bbox_single_pixel():
    mask = np.zeros((5, 5), dtype=bool)
    mask[2, 3] = True
    assert bbox_from_mask(mask) == BBox(x=3, y=2, w=1, h=1)


def test_bbox_full_frame():
    assert bbox_from_mask(np.ones((4, 7), dtype=bool)) == BBox(x=0, y=0, w=7, h=4)


def test_bbox_empty_mask_rejected():
    with pytest.raises(EmptyMaskError):
        bbox_from_mask(np.zeros((3, 3), dtype=bool))


def test_bbox_is_tight():
    rng = np.random.default_rng(21)
    for _ in range(100):
        mask = _random_mask(rng)
        if not mask.any():
            continue
        box = bbox_from_mask(mask)
        inside = mask[box.y : box.y + box.h, box.x : box.x + box.w]
        assert inside.sum() == mask.sum()  # contains every foreground pixel
        # no smaller box does: each edge row/column touches foreground
        assert inside[0].any() and inside[-1].any()
        assert inside[:, 0].any() and inside[:, -1].any()


def test_rle_all_background():
    rle = rle_encode(np.zeros((3, 3), dtype=bool))
    assert rle.counts == [9]
    assert rle.size == (3, 3)


def test_rle_single_pixel_2x2():
    mask = np.zeros((2, 2), dtype=bool)
    mask[0, 0] = True
    assert rle_encode(mask).counts == [0, 1, 3]


def test_rle_all_foreground():
    rle = rle_encode(np.ones((4, 5), dtype=bool))
    assert rle.counts == [0, 20]


def test_rle_column_major_order():
    # pixel (row, col) sits at linear index col*H + row
    mask = np.zeros((3, 2), dtype=bool)
    mask[1, 1] = True  # linear index 1*3 + 1 = 4
    assert rle_encode(mask).counts == [4, 1, 1]


def test_rle_roundtrip_random_masks():
    rng = np.random.default_rng(37)
    for _ in range(300):
        mask = _random_mask(rng)
        assert np.array_equal(rle_decode(rle_encode(mask)), mask)


def test_rle_decode_rejects_corrupt_counts():
    with pytest.raises(CorruptRleError):
        rle_decode(Rle(size=(2, 2), counts=[1, 1]))  # sums to 2, not 4
    with pytest.raises(CorruptRleError):
        rle_decode(Rle(size=(2, 2), counts=[-1, 5]))  # negative run
    with pytest.raises(CorruptRleError):
        rle_decode(Rle(size=(2, 2), counts=[1, 0, 3]))  # interior zero


def test_rle_json_roundtrip():
    rle = Rle(size=(2, 3), counts=[0, 2, 4])
    doc = rle.to_json()
    assert doc == {"size": [2, 3], "counts": [0, 2, 4]}
    assert Rle.from_json(doc) == rle


def test_mask_iou_identity_disjoint_nested():
    a = np.zeros((6, 6), dtype=bool)
    a[:3] = True
    assert mask_iou(a, a) == 1.0

    b = np.zeros((6, 6), dtype=bool)
    b[4:] = True
    assert mask_iou(a, b) == 0.0

    half = np.zeros((6, 6), dtype=bool)
    half[:3, :3] = True  # 9 pixels, half of a's 18, fully inside
    assert mask_iou(half, a) == 0.5


def test_mask_iou_empty_union_and_mismatch():
    empty = np.zeros((4, 4), dtype=bool)
    assert mask_iou(empty, empty) == 0.0
    with pytest.raises(ValueError):
        mask_iou(np.zeros((2, 2), dtype=bool), np.zeros((3, 3), dtype=bool))


def test_mask_iou_matches_pixel_counting():
    rng = np.random.default_rng(5)
    for _ in range(100):
        h, w = int(rng.integers(1, 33)), int(rng.integers(1, 33))
        a = rng.random((h, w)) < rng.uniform(0, 1)
        b = rng.random((h, w)) < rng.uniform(0, 1)
        inter = sum(
            1 for r in range(h) for c in range(w) if a[r, c] and b[r, c]
        )
        union = sum(
            1 for r in range(h) for c in range(w) if a[r, c] or b[r, c]
        )
        expected = inter / union if union else 0.0
        assert mask_iou(a, b) == expected
        assert mask_iou(b, a) == mask_iou(a, b)


def test_crop_transform_tall_box():
    t = crop_square_transform(BBox(x=10, y=0, w=100, h=200), image_w=640, image_h=480)
    assert np.isclose(t.scale, 1.12)
    assert t.pad_left == 56
    assert t.pad_top == 0
    assert t.source_box.w == t.source_box.h == 200


def test_crop_transform_identity_case():
    t = crop_square_transform(BBox(x=0, y=0, w=224, h=224), image_w=640, image_h=480)
    assert t.scale == 1.0
    assert t.pad_left == 0 and t.pad_top == 0


def test_crop_transform_square_upscale():
    t = crop_square_transform(BBox(x=5, y=5, w=10, h=10), image_w=64, image_h=64)
    assert np.isclose(t.scale, 22.4)
    assert t.pad_left == 0 and t.pad_top == 0


def test_crop_transform_out_of_bounds_rejected():
    with pytest.raises(ValueError):
        crop_square_transform(BBox(x=600, y=0, w=100, h=50), image_w=640, image_h=480)


def test_crop_transform_invariants():
    rng = np.random.default_rng(13)
    for _ in range(200):
        image_w, image_h = int(rng.integers(10, 1000)), int(rng.integers(10, 1000))
        w = int(rng.integers(1, image_w + 1))
        h = int(rng.integers(1, image_h + 1))
        x = int(rng.integers(0, image_w - w + 1))
        y = int(rng.integers(0, image_h - h + 1))
        t = crop_square_transform(BBox(x=x, y=y, w=w, h=h), image_w, image_h)
        content_w = int(np.floor(w * t.scale + 0.5))
        content_h = int(np.floor(h * t.scale + 0.5))
        assert max(content_w, content_h) == t.target
        assert abs(t.pad_left * 2 + content_w - t.target) <= 1
        assert abs(t.pad_top * 2 + content_h - t.target) <= 1
        assert t.source_box.w == t.source_box.h == max(w, h)


def test_masks_file_roundtrip(tmp_path: Path):
    rng = np.random.default_rng(1)
    masks = [rle_encode(_random_mask(rng)) for _ in range(10)]
    path = tmp_path / "masks.json"
    write_masks(masks, path)
    assert read_masks(path) == masks


def test_read_masks_rejects_bad_documents(tmp_path: Path):
    path = tmp_path / "masks.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(Exception):
        read_masks(path)
    path.write_text(json.dumps({"size": [2, 2]}), encoding="utf-8")
    with pytest.raises(FormatError):
        read_masks(path)
    path.write_text(json.dumps([{"size": [2, 2]}]), encoding="utf-8")
    with pytest.raises(FormatError):
        read_masks(path)
