"""Matching stage: similarity tensor, view aggregation and object assignment.

Every proposal descriptor is compared against every template descriptor with
cosine similarity, giving an N_P x N_O x N_V tensor. The per-object view
scores are reduced to one number by an aggregation function (mean of the top-k
views by default), and each proposal is labeled with the argmax object and its
score. Scores stay raw cosines in [-1, 1]; any display thresholding happens at
reporting time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .descriptors import ProposalDescriptors, ReferenceSet
from .maskops import Rle, bbox_from_mask, rle_decode

__all__ = [
    "AggregationMethod",
    "LabeledDetection",
    "similarity_tensor",
    "aggregate_views",
    "assign_objects",
    "match_proposals",
    "top_k_templates",
    "detection_record",
    "write_detections",
    "category_id_for_label",
]

_KINDS = ("mean", "median", "max", "mean_topk")


@dataclass(frozen=True)
class AggregationMethod:
    """Reduction of the per-view similarities of one (proposal, object) pair.

    ``kind`` is one of mean / median / max / mean_topk; ``k`` applies to
    mean_topk only and defaults to 5. mean_topk with k >= N_V degrades to the
    plain mean rather than erroring, so small fixtures work with the default k.
    """

    kind: str
    k: int = 5

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown aggregation {self.kind!r}, expected one of {_KINDS}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


@dataclass(frozen=True)
class LabeledDetection:
    """One proposal after matching: its mask, object label and cosine score."""

    mask: Rle
    object_label: str
    score: float
    proposal_index: int


def similarity_tensor(proposals: ProposalDescriptors, ref: ReferenceSet) -> np.ndarray:
    """Exhaustive cosine similarities, shape (N_P, N_O, N_V), float32 in [-1, 1]."""
    if proposals.dim != ref.dim:
        raise ValueError(f"descriptor dims differ: proposals {proposals.dim}, reference {ref.dim}")
    p = proposals.descriptors
    r = ref.descriptors.reshape(ref.n_objects * ref.n_views, ref.dim)
    sims = p @ r.T
    np.clip(sims, -1.0, 1.0, out=sims)
    return sims.reshape(proposals.n_proposals, ref.n_objects, ref.n_views)


def aggregate_views(tensor: np.ndarray, method: AggregationMethod) -> np.ndarray:
    """Reduce the view axis of a similarity tensor to an (N_P, N_O) float64 matrix.

    mean is the arithmetic mean, max the maximum, median the middle element
    (mean of the two middle ones for even N_V), and mean_topk the mean of the
    min(k, N_V) largest values.
    """
    tensor = np.asarray(tensor)
    if tensor.ndim != 3:
        raise ValueError(f"similarity tensor must be rank 3, got rank {tensor.ndim}")
    n_views = tensor.shape[2]
    if n_views < 1:
        raise ValueError("similarity tensor has no views to aggregate")

    if method.kind == "mean":
        return tensor.mean(axis=2, dtype=np.float64)
    if method.kind == "max":
        return tensor.max(axis=2).astype(np.float64)
    if method.kind == "median":
        return np.median(tensor.astype(np.float64), axis=2)
    k = min(method.k, n_views)
    top = np.partition(tensor, n_views - k, axis=2)[:, :, n_views - k :]
    return top.mean(axis=2, dtype=np.float64)


def assign_objects(
    agg: np.ndarray, labels: list[str], masks: list[Rle]
) -> list[LabeledDetection]:
    """Label each proposal with its best object: argmax over the object axis.

    Ties break toward the lowest object index. Every proposal yields exactly
    one detection; score filtering is a reporting concern.
    """
    agg = np.asarray(agg)
    if agg.ndim != 2:
        raise ValueError(f"aggregated matrix must be rank 2, got rank {agg.ndim}")
    n_proposals, n_objects = agg.shape
    if n_objects == 0:
        raise ValueError("cannot assign objects with an empty reference set")
    if len(labels) != n_objects:
        raise ValueError(f"{len(labels)} labels for {n_objects} objects")
    if len(masks) != n_proposals:
        raise ValueError(f"{len(masks)} masks for {n_proposals} proposals")

    detections = []
    for i in range(n_proposals):
        best = int(np.argmax(agg[i]))  # first maximum wins ties
        detections.append(
            LabeledDetection(
                mask=masks[i],
                object_label=labels[best],
                score=float(agg[i, best]),
                proposal_index=i,
            )
        )
    return detections


def match_proposals(
    proposals: ProposalDescriptors,
    masks: list[Rle],
    ref: ReferenceSet,
    method: AggregationMethod = AggregationMethod("mean_topk", k=5),
) -> list[LabeledDetection]:
    """Full matching stage: similarity tensor, view aggregation, assignment."""
    tensor = similarity_tensor(proposals, ref)
    agg = aggregate_views(tensor, method)
    return assign_objects(agg, ref.object_labels, masks)


def top_k_templates(
    tensor: np.ndarray, proposal: int, obj: int, k: int
) -> list[tuple[int, float]]:
    """The k best-matching views of one object for one proposal.

    Returns (view index, score) pairs in descending score order, ties toward
    the lower view index; at most N_V entries.
    """
    tensor = np.asarray(tensor)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n_proposals, n_objects, n_views = tensor.shape
    if not 0 <= proposal < n_proposals:
        raise ValueError(f"proposal index {proposal} out of range [0, {n_proposals})")
    if not 0 <= obj < n_objects:
        raise ValueError(f"object index {obj} out of range [0, {n_objects})")

    scores = tensor[proposal, obj]
    order = np.argsort(-scores, kind="stable")[: min(k, n_views)]
    return [(int(v), float(scores[v])) for v in order]


def detection_record(
    det: LabeledDetection,
    scene_id: int,
    image_id: int,
    category_id: int,
    time: float = -1.0,
) -> dict:
    """One detection as a BOP/COCO-compatible JSON record."""
    box = bbox_from_mask(rle_decode(det.mask))
    return {
        "scene_id": int(scene_id),
        "image_id": int(image_id),
        "category_id": int(category_id),
        "object_label": det.object_label,
        "score": det.score,
        "bbox": [box.x, box.y, box.w, box.h],
        "segmentation": det.mask.to_json(),
        "time": float(time),
    }


def write_detections(records: list[dict], destination: str | Path) -> None:
    """Write detection records as a JSON array (deterministic byte output)."""
    Path(destination).write_text(json.dumps(records, indent=2) + "\n", encoding="utf-8")


def category_id_for_label(label: str, labels: list[str]) -> int:
    """Numeric category for a label: its trailing integer if present, else 1-based index.

    Labels like ``obj_000012`` map to 12, matching BOP conventions; anything
    else falls back to its position in the reference ordering.
    """
    digits = ""
    for ch in reversed(label):
        if ch.isdigit():
            digits = ch + digits
        else:
            break
    if digits:
        return int(digits)
    return labels.index(label) + 1
