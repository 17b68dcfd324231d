"""Binary-mask utilities: RLE codec, bounding boxes, IoU and crop geometry.

Masks are plain (H, W) boolean numpy arrays, row-major in memory. The
run-length encoding scans in column-major order (pixel (row, col) sits at
linear index col * H + row) and alternates background/foreground runs starting
with background, matching the uncompressed RLE used by COCO-style tooling.

The crop geometry describes how a proposal's bounding box is scaled and padded
into a fixed square target (224 x 224 by default) so a batch of crops can be
embedded in one pass; no pixels are touched here, only coordinates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CorruptFileError, CorruptRleError, EmptyMaskError, FormatError

__all__ = [
    "TARGET_SIZE",
    "Rle",
    "BBox",
    "CropTransform",
    "bbox_from_mask",
    "rle_encode",
    "rle_decode",
    "mask_iou",
    "crop_square_transform",
    "write_masks",
    "read_masks",
]

TARGET_SIZE = 224


@dataclass(frozen=True)
class BBox:
    """Axis-aligned pixel box: top-left corner (x, y), extent (w, h)."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self) -> None:
        if self.w < 1 or self.h < 1:
            raise ValueError(f"box extent must be at least 1x1, got {self.w}x{self.h}")


@dataclass(frozen=True)
class Rle:
    """Column-major run-length encoding of a binary mask.

    ``size`` is (height, width); ``counts`` alternates background/foreground
    run lengths starting with background (the leading count may be 0).
    """

    size: tuple[int, int]
    counts: list[int]

    def to_json(self) -> dict:
        return {"size": [int(self.size[0]), int(self.size[1])], "counts": list(self.counts)}

    @classmethod
    def from_json(cls, doc: dict) -> "Rle":
        size = doc["size"]
        return cls(size=(int(size[0]), int(size[1])), counts=[int(c) for c in doc["counts"]])


@dataclass(frozen=True)
class CropTransform:
    """Geometry mapping a source box into a centered, padded square target.

    ``source_box`` is the square of side max(w, h) around the content; it may
    overhang the image border, the overhang being exactly the padded region.
    """

    source_box: BBox
    scale: float
    pad_left: int
    pad_top: int
    target: int = TARGET_SIZE


def bbox_from_mask(mask: np.ndarray) -> BBox:
    """Tightest box containing all foreground pixels of a boolean mask."""
    mask = np.asarray(mask, dtype=bool)
    rows = np.flatnonzero(mask.any(axis=1))
    if rows.size == 0:
        raise EmptyMaskError("mask has no foreground pixels")
    cols = np.flatnonzero(mask.any(axis=0))
    y0, y1 = int(rows[0]), int(rows[-1])
    x0, x1 = int(cols[0]), int(cols[-1])
    return BBox(x=x0, y=y0, w=x1 - x0 + 1, h=y1 - y0 + 1)


def rle_encode(mask: np.ndarray) -> Rle:
    """Encode a boolean mask as alternating column-major run lengths."""
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {mask.shape}")
    h, w = mask.shape
    flat = mask.flatten(order="F")
    if flat.size == 0:
        return Rle(size=(h, w), counts=[0])
    boundaries = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    edges = np.concatenate([[0], boundaries, [flat.size]])
    counts = np.diff(edges).tolist()
    if flat[0]:
        counts.insert(0, 0)
    return Rle(size=(h, w), counts=counts)


def rle_decode(rle: Rle) -> np.ndarray:
    """Decode an Rle back to a boolean (H, W) mask.

    Rejects encodings whose counts do not sum to H*W, contain negative runs,
    or contain zero runs past the leading one.
    """
    h, w = rle.size
    counts = rle.counts
    if any(c < 0 for c in counts):
        raise CorruptRleError("negative run length")
    if any(c == 0 for c in counts[1:]):
        raise CorruptRleError("zero-length run after the first count")
    total = sum(counts)
    if total != h * w:
        raise CorruptRleError(f"counts sum to {total}, mask size is {h}x{w}={h * w}")
    values = np.arange(len(counts)) % 2 == 1  # background first
    flat = np.repeat(values, counts)
    return flat.reshape((h, w), order="F")


def mask_iou(a: np.ndarray, b: np.ndarray) -> float:
    """Intersection over union of two equally sized boolean masks.

    Returns 0.0 when the union is empty.
    """
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.shape != b.shape:
        raise ValueError(f"mask shapes differ: {a.shape} vs {b.shape}")
    union = int(np.count_nonzero(a | b))
    if union == 0:
        return 0.0
    inter = int(np.count_nonzero(a & b))
    return inter / union


def crop_square_transform(
    box: BBox, image_w: int, image_h: int, target: int = TARGET_SIZE
) -> CropTransform:
    """Scale-and-pad geometry taking ``box`` into a centered target square.

    The content is scaled by target / max(w, h), so its longer side fills the
    target exactly; content dimensions round half away from zero and pads take
    the floor of the remaining margin, making outputs byte-reproducible.
    """
    if box.x < 0 or box.y < 0 or box.x + box.w > image_w or box.y + box.h > image_h:
        raise ValueError(f"box {box} exceeds image bounds {image_w}x{image_h}")
    side = max(box.w, box.h)
    scale = target / side
    content_w = int(math.floor(box.w * scale + 0.5))
    content_h = int(math.floor(box.h * scale + 0.5))
    pad_left = (target - content_w) // 2
    pad_top = (target - content_h) // 2
    source_box = BBox(
        x=box.x - (side - box.w) // 2,
        y=box.y - (side - box.h) // 2,
        w=side,
        h=side,
    )
    return CropTransform(
        source_box=source_box,
        scale=scale,
        pad_left=pad_left,
        pad_top=pad_top,
        target=target,
    )


def write_masks(masks: list[Rle], destination: str | Path) -> None:
    """Write a list of masks as a JSON array of Rle objects."""
    payload = [m.to_json() for m in masks]
    Path(destination).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def read_masks(path: str | Path) -> list[Rle]:
    """Read a masks JSON file back into Rle values."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorruptFileError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, list):
        raise FormatError(f"{path}: expected a JSON array of masks")
    masks = []
    for i, doc in enumerate(data):
        try:
            masks.append(Rle.from_json(doc))
        except (ValueError, TypeError, KeyError) as exc:
            raise FormatError(f"{path}: masks[{i}] is not a valid Rle ({exc})") from exc
    return masks
