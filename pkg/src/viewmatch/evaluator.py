"""COCO-style mask AP over IoU thresholds 0.50:0.95, step 0.05.

The evaluator is deliberately brute-force-verifiable: detections are matched
greedily per image and object label, flags are pooled globally by descending
score, and AP comes from the standard 101-point interpolated precision-recall
curve. `ignore` ground-truth instances (invisible or heavily occluded ones)
neither count toward recall nor turn their matched detections into false
positives.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CorruptFileError, FormatError, ValidationError
from .maskops import Rle, mask_iou, rle_decode

__all__ = [
    "IOU_THRESHOLDS",
    "GroundTruthInstance",
    "DetectionInstance",
    "ApReport",
    "greedy_match",
    "ap_at_threshold",
    "ap_coco",
    "read_annotations",
    "read_detections",
    "write_report",
    "format_report",
]

IOU_THRESHOLDS = tuple(round(0.50 + 0.05 * i, 2) for i in range(10))

_RECALL_GRID = np.linspace(0.0, 1.0, 101)


@dataclass(frozen=True)
class GroundTruthInstance:
    """One annotated object instance in one image."""

    scene_id: int
    image_id: int
    object_label: str
    mask: Rle
    ignore: bool = False


@dataclass(frozen=True)
class DetectionInstance:
    """One scored detection, as read back from a detections file."""

    scene_id: int
    image_id: int
    object_label: str
    score: float
    mask: Rle


@dataclass(frozen=True)
class ApReport:
    """AP per IoU threshold and per object, plus their means."""

    per_threshold: dict[float, float]
    mean_ap: float
    per_object: dict[str, float]
    n_detections: int
    n_gt: int


def _iou_matrix(det_masks: list[Rle], gt_masks: list[Rle]) -> np.ndarray:
    """Pairwise mask IoU, shape (n_det, n_gt)."""
    dets = [rle_decode(m) for m in det_masks]
    gts = [rle_decode(m) for m in gt_masks]
    out = np.zeros((len(dets), len(gts)))
    for i, d in enumerate(dets):
        for j, g in enumerate(gts):
            out[i, j] = mask_iou(d, g)
    return out


def _match_flags(
    iou: np.ndarray, gt_ignore: list[bool], iou_thresh: float
) -> list[bool | None]:
    """Greedy matching given a precomputed IoU matrix.

    Detections are taken in row order (callers pass them score-sorted). Each
    claims the unmatched ground truth with the highest IoU >= iou_thresh; on
    exact ties a non-ignore instance wins, then the lower index. True is a
    true positive, False a false positive, None a detection absorbed by an
    ignore instance (excluded from precision/recall entirely).
    """
    n_det, n_gt = iou.shape
    # scan non-ignore GTs first so ties prefer countable instances
    scan = sorted(range(n_gt), key=lambda j: (gt_ignore[j], j))
    taken = [False] * n_gt
    flags: list[bool | None] = []
    for i in range(n_det):
        best_j = -1
        best = iou_thresh
        for j in scan:
            if taken[j]:
                continue
            if iou[i, j] > best or (best_j < 0 and iou[i, j] >= iou_thresh):
                best = iou[i, j]
                best_j = j
        if best_j < 0:
            flags.append(False)
        else:
            taken[best_j] = True
            flags.append(None if gt_ignore[best_j] else True)
    return flags


def greedy_match(
    dets: list[DetectionInstance],
    gts: list[GroundTruthInstance],
    iou_thresh: float,
) -> list[bool | None]:
    """Per-detection TP/FP flags for one (image, object label) group.

    Precondition: dets sorted by descending score, ties in input order. Flags
    align with dets; None marks a detection matched to an ignore instance.
    """
    iou = _iou_matrix([d.mask for d in dets], [g.mask for g in gts])
    return _match_flags(iou, [g.ignore for g in gts], iou_thresh)


def ap_at_threshold(
    flags: list[bool | None], scores: list[float], n_gt: int
) -> float:
    """101-point interpolated AP from pooled match flags.

    Flags and scores are parallel lists across all images; None entries
    (ignore matches) are dropped. Precision at each recall grid point is the
    maximum precision achieved at any recall >= that point. Returns 0.0 when
    n_gt = 0, where recall is undefined.
    """
    if len(flags) != len(scores):
        raise ValueError(f"{len(flags)} flags for {len(scores)} scores")
    if n_gt < 0:
        raise ValueError(f"n_gt must be >= 0, got {n_gt}")
    if n_gt == 0:
        return 0.0

    kept = [(f, s) for f, s in zip(flags, scores) if f is not None]
    if not kept:
        return 0.0
    order = np.argsort(-np.asarray([s for _, s in kept]), kind="stable")
    tp = np.asarray([kept[i][0] for i in order], dtype=np.float64)

    tp_cum = np.cumsum(tp)
    fp_cum = np.cumsum(1.0 - tp)
    recall = tp_cum / n_gt
    precision = tp_cum / (tp_cum + fp_cum)
    # running max from the right: best precision at recall >= each position
    precision = np.maximum.accumulate(precision[::-1])[::-1]

    idx = np.searchsorted(recall, _RECALL_GRID, side="left")
    interp = np.where(
        idx < recall.size, precision[np.minimum(idx, recall.size - 1)], 0.0
    )
    return float(interp.mean())


def ap_coco(
    dets: list[DetectionInstance],
    gts: list[GroundTruthInstance],
    object_labels: list[str] | None = None,
) -> ApReport:
    """Full evaluation: per-object AP averaged over the 10 IoU thresholds.

    The object vocabulary defaults to the labels present in the ground truth;
    detections outside it raise ValidationError. Objects enter the mean only
    if they have at least one non-ignore ground-truth instance (COCO
    category-mean convention).
    """
    if object_labels is None:
        vocab = {g.object_label for g in gts}
    else:
        vocab = set(object_labels)
        unknown_gt = sorted({g.object_label for g in gts} - vocab)
        if unknown_gt:
            raise ValidationError(
                f"ground truth references unknown object labels: {', '.join(unknown_gt)}"
            )
    unknown = sorted({d.object_label for d in dets} - vocab)
    if unknown:
        raise ValidationError(
            f"detections reference unknown object labels: {', '.join(unknown)}"
        )

    # labels scored: those with at least one countable GT instance
    n_gt_by_label: dict[str, int] = {}
    for g in gts:
        if not g.ignore:
            n_gt_by_label[g.object_label] = n_gt_by_label.get(g.object_label, 0) + 1
    labels = sorted(n_gt_by_label)

    ap: dict[str, dict[float, float]] = {}
    for label in labels:
        images = sorted(
            {(g.scene_id, g.image_id) for g in gts if g.object_label == label}
            | {(d.scene_id, d.image_id) for d in dets if d.object_label == label}
        )
        # per image: score-sorted detections and a cached IoU matrix
        groups = []
        for key in images:
            img_dets = [
                d
                for d in dets
                if d.object_label == label and (d.scene_id, d.image_id) == key
            ]
            img_dets.sort(key=lambda d: -d.score)  # stable, ties keep input order
            img_gts = [
                g
                for g in gts
                if g.object_label == label and (g.scene_id, g.image_id) == key
            ]
            iou = _iou_matrix([d.mask for d in img_dets], [g.mask for g in img_gts])
            groups.append((img_dets, [g.ignore for g in img_gts], iou))

        ap[label] = {}
        for thresh in IOU_THRESHOLDS:
            flags: list[bool | None] = []
            scores: list[float] = []
            for img_dets, gt_ignore, iou in groups:
                flags.extend(_match_flags(iou, gt_ignore, thresh))
                scores.extend(d.score for d in img_dets)
            ap[label][thresh] = ap_at_threshold(flags, scores, n_gt_by_label[label])

    if labels:
        per_threshold = {
            t: float(np.mean([ap[label][t] for label in labels]))
            for t in IOU_THRESHOLDS
        }
        per_object = {
            label: float(np.mean([ap[label][t] for t in IOU_THRESHOLDS]))
            for label in labels
        }
    else:
        per_threshold = {t: 0.0 for t in IOU_THRESHOLDS}
        per_object = {}
    mean_ap = float(np.mean(list(per_threshold.values())))

    return ApReport(
        per_threshold=per_threshold,
        mean_ap=mean_ap,
        per_object=per_object,
        n_detections=len(dets),
        n_gt=sum(n_gt_by_label.values()),
    )


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise FormatError(message)


def _rle_from_json(obj: object, context: str) -> Rle:
    try:
        return Rle.from_json(obj)  # type: ignore[arg-type]
    except (ValueError, TypeError, KeyError) as exc:
        raise FormatError(f"{context}: bad segmentation ({exc})") from exc


def read_annotations(
    path: str | Path,
) -> tuple[list[GroundTruthInstance], list[dict]]:
    """Load ground truth from an annotations JSON file.

    Returns (instances, images) where images is the file's image records
    (scene_id, image_id, height, width) as plain dicts.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorruptFileError(f"{path}: not valid JSON ({exc})") from exc

    _require(isinstance(data, dict), f"{path}: expected a JSON object at top level")
    _require("images" in data and "annotations" in data,
             f"{path}: missing 'images' or 'annotations' key")
    images = data["images"]
    annotations = data["annotations"]
    _require(isinstance(images, list), f"{path}: 'images' must be a list")
    _require(isinstance(annotations, list), f"{path}: 'annotations' must be a list")

    for i, rec in enumerate(images):
        _require(
            isinstance(rec, dict)
            and all(k in rec for k in ("scene_id", "image_id", "height", "width")),
            f"{path}: images[{i}] missing scene_id/image_id/height/width",
        )

    gts = []
    for i, rec in enumerate(annotations):
        _require(isinstance(rec, dict), f"{path}: annotations[{i}] is not an object")
        _require(
            all(k in rec for k in ("scene_id", "image_id", "object_label", "segmentation")),
            f"{path}: annotations[{i}] missing a required field",
        )
        _require(isinstance(rec["object_label"], str),
                 f"{path}: annotations[{i}] object_label must be a string")
        gts.append(
            GroundTruthInstance(
                scene_id=int(rec["scene_id"]),
                image_id=int(rec["image_id"]),
                object_label=rec["object_label"],
                mask=_rle_from_json(rec["segmentation"], f"{path}: annotations[{i}]"),
                ignore=bool(rec.get("ignore", False)),
            )
        )
    return gts, images


def read_detections(path: str | Path) -> list[DetectionInstance]:
    """Load detections from a detections JSON array."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorruptFileError(f"{path}: not valid JSON ({exc})") from exc

    _require(isinstance(data, list), f"{path}: expected a JSON array at top level")
    dets = []
    for i, rec in enumerate(data):
        _require(isinstance(rec, dict), f"{path}: detections[{i}] is not an object")
        required = ("scene_id", "image_id", "object_label", "score", "segmentation")
        _require(all(k in rec for k in required),
                 f"{path}: detections[{i}] missing a required field")
        _require(isinstance(rec["object_label"], str),
                 f"{path}: detections[{i}] object_label must be a string")
        dets.append(
            DetectionInstance(
                scene_id=int(rec["scene_id"]),
                image_id=int(rec["image_id"]),
                object_label=rec["object_label"],
                score=float(rec["score"]),
                mask=_rle_from_json(rec["segmentation"], f"{path}: detections[{i}]"),
            )
        )
    return dets


def write_report(report: ApReport, destination: str | Path) -> None:
    """Write an ApReport as deterministic JSON."""
    payload = {
        "mean_ap": report.mean_ap,
        "per_threshold": {f"{t:.2f}": report.per_threshold[t] for t in IOU_THRESHOLDS},
        "per_object": {k: report.per_object[k] for k in sorted(report.per_object)},
        "counts": {"n_detections": report.n_detections, "n_gt": report.n_gt},
    }
    Path(destination).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def format_report(report: ApReport) -> str:
    """Render an ApReport as a plain-text table."""
    lines = []
    lines.append("IoU threshold    AP")
    lines.append("-------------    ------")
    for t in IOU_THRESHOLDS:
        lines.append(f"{t:<13.2f}    {report.per_threshold[t]:.4f}")
    lines.append(f"{'mean':<13}    {report.mean_ap:.4f}")
    if report.per_object:
        width = max(len(label) for label in report.per_object)
        width = max(width, len("object"))
        lines.append("")
        lines.append(f"{'object':<{width}}    mean AP")
        lines.append(f"{'-' * width}    -------")
        for label in sorted(report.per_object):
            lines.append(f"{label:<{width}}    {report.per_object[label]:.4f}")
    lines.append("")
    lines.append(
        f"{report.n_detections} detections, {report.n_gt} ground-truth instances"
    )
    return "\n".join(lines) + "\n"
