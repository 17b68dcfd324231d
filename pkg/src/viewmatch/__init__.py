"""Template matching for CAD-onboarded objects, plus a mask-AP evaluator.

The pipeline has three stages: onboarding turns per-object template views
into a reference tensor of unit descriptors, proposal generation supplies
class-agnostic masks with descriptors, and matching labels every proposal
with its nearest object by aggregated cosine similarity. The evaluator
scores detections with COCO-style mask AP over IoU thresholds 0.50:0.95.

Descriptors travel in a small binary format (CNOSDSC1) and masks as
column-major run-length encodings, so descriptor extraction can live in a
separate process or language.
"""

from .descriptors import (
    DEFAULT_DIM,
    ProposalDescriptors,
    ReferenceSet,
    cosine_similarity,
    l2_normalize,
    load_descriptors,
    save_descriptors,
    synth_proposals,
    synth_reference_set,
)
from .errors import (
    CorruptFileError,
    CorruptRleError,
    DegenerateDescriptorError,
    EmptyMaskError,
    FormatError,
    ValidationError,
    ViewmatchError,
)
from .evaluator import (
    IOU_THRESHOLDS,
    ApReport,
    DetectionInstance,
    GroundTruthInstance,
    ap_at_threshold,
    ap_coco,
    greedy_match,
    read_annotations,
    read_detections,
    write_report,
)
from .maskops import (
    BBox,
    CropTransform,
    Rle,
    bbox_from_mask,
    crop_square_transform,
    mask_iou,
    read_masks,
    rle_decode,
    rle_encode,
    write_masks,
)
from .matcher import (
    AggregationMethod,
    LabeledDetection,
    aggregate_views,
    assign_objects,
    match_proposals,
    similarity_tensor,
    top_k_templates,
    write_detections,
)
from .viewsphere import (
    CameraPose,
    Viewpoint,
    ViewpointSet,
    camera_pose_from_viewpoint,
    generate_viewpoint_set,
    icosphere_vertices,
    read_viewpoints,
    write_viewpoints,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # viewsphere
    "Viewpoint",
    "CameraPose",
    "ViewpointSet",
    "icosphere_vertices",
    "camera_pose_from_viewpoint",
    "generate_viewpoint_set",
    "write_viewpoints",
    "read_viewpoints",
    # descriptors
    "DEFAULT_DIM",
    "ReferenceSet",
    "ProposalDescriptors",
    "l2_normalize",
    "cosine_similarity",
    "save_descriptors",
    "load_descriptors",
    "synth_reference_set",
    "synth_proposals",
    # maskops
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
    # matcher
    "AggregationMethod",
    "LabeledDetection",
    "similarity_tensor",
    "aggregate_views",
    "assign_objects",
    "match_proposals",
    "top_k_templates",
    "write_detections",
    # evaluator
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
    # errors
    "ViewmatchError",
    "DegenerateDescriptorError",
    "FormatError",
    "CorruptFileError",
    "EmptyMaskError",
    "CorruptRleError",
    "ValidationError",
]
