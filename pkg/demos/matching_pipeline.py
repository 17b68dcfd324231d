"""
Matching proposals against a reference set
==========================================

The three matching steps on synthetic data: similarity tensor, view
aggregation, object assignment. Ends with a detections JSON file.
"""

import json

import numpy as np

from viewmatch import descriptors, maskops, matcher

# a reference set of 5 objects seen from 12 views, and 8 proposals whose
# true objects we know because we generated them
ref = descriptors.synth_reference_set(5, 12, dim=256, seed=4, view_noise=0.05)
truth = [0, 3, 1, 1, 4, 2, 0, 3]
props = descriptors.synth_proposals(ref, truth, noise=0.1, seed=5)

# step 1: cosine similarity of every proposal against every template
tensor = matcher.similarity_tensor(props, ref)
print("similarity tensor:", tensor.shape, "(proposals x objects x views)")

# step 2: aggregate the per-view similarities of each (proposal, object)
# pair; the mean of the top 5 views is the default
for name in ("mean", "median", "max"):
    agg = matcher.aggregate_views(tensor, matcher.AggregationMethod(name))
    print(f"{name:>9}: first-proposal scores {np.round(agg[0], 3)}")
topk = matcher.aggregate_views(tensor, matcher.AggregationMethod("mean_topk", k=5))
print("mean_topk: first-proposal scores", np.round(topk[0], 3))

# step 3: each proposal takes the best-scoring object
masks = [maskops.rle_encode(np.ones((4, 4), dtype=bool))] * len(truth)
dets = matcher.match_proposals(props, masks, ref, matcher.AggregationMethod("mean_topk", k=5))
labels = [d.object_label for d in dets]
print("assigned:", labels)
print("expected:", [ref.object_labels[t] for t in truth])
print("accuracy:", sum(d.object_label == ref.object_labels[t]
                       for d, t in zip(dets, truth)), "/", len(truth))

# detection records carry ids, label, score, bbox, and the RLE mask, ready
# for the evaluator
records = [
    matcher.detection_record(
        d, scene_id=1, image_id=1,
        category_id=matcher.category_id_for_label(d.object_label, ref.object_labels),
    )
    for d in dets
]
matcher.write_detections(records, "/tmp/demo_detections.json")
first = json.loads(open("/tmp/demo_detections.json").read())[0]
print("first record keys:", sorted(first))
