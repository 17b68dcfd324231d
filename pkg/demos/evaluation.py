"""
COCO-style mask AP from first principles
========================================

Small hand-checkable evaluation fixtures: a detector that is right, one
that is half right, and the precision-recall arithmetic behind the number.
"""

import numpy as np

from viewmatch import maskops
from viewmatch.evaluator import (
    IOU_THRESHOLDS,
    DetectionInstance,
    GroundTruthInstance,
    ap_at_threshold,
    ap_coco,
    format_report,
)


def strip(c0, c1):
    m = np.zeros((1, 20), dtype=bool)
    m[0, c0:c1] = True
    return maskops.rle_encode(m)


# one object, one image, perfect mask: AP is 1.0 at every IoU threshold
gt = [GroundTruthInstance(1, 1, "widget", strip(0, 8))]
det = [DetectionInstance(1, 1, "widget", 0.9, strip(0, 8))]
print(format_report(ap_coco(det, gt)))

# shift the detection so IoU drops to 6/10: it still counts at thresholds
# 0.50, 0.55, 0.60 and fails the stricter seven, so the mean lands on 0.3
det = [DetectionInstance(1, 1, "widget", 0.9, strip(2, 10))]
report = ap_coco(det, gt)
row = {t: report.per_threshold[t] for t in IOU_THRESHOLDS}
print("per-threshold AP:", {f"{t:.2f}": v for t, v in row.items()})
print("mean AP:", round(report.mean_ap, 6))

# the interpolated PR curve by hand: three detections sorted by score with
# flags TP, FP, TP over two ground-truth instances samples precision 1.0
# for recall grid points up to 0.5 and 2/3 above, giving 253/303
ap = ap_at_threshold([True, False, True], [0.9, 0.8, 0.7], n_gt=2)
print("three-detection AP:", round(ap, 6), "=", "253/303 =", round(253 / 303, 6))

# an instance flagged ignore absorbs its detection without counting either
# way; here only the real instance contributes
gt = [
    GroundTruthInstance(1, 1, "widget", strip(0, 8)),
    GroundTruthInstance(1, 1, "widget", strip(10, 18), ignore=True),
]
det = [
    DetectionInstance(1, 1, "widget", 0.9, strip(0, 8)),
    DetectionInstance(1, 1, "widget", 0.8, strip(10, 18)),
]
report = ap_coco(det, gt)
print("with ignore instance: mean AP", report.mean_ap,
      "over", report.n_gt, "counted instance(s)")
