"""
Descriptor tensors and their on-disk format
===========================================

Shows L2 normalization, the reference/proposal containers, and the binary
descriptor file with its label sidecar.
"""

import numpy as np

from viewmatch import descriptors

# descriptors are compared by cosine similarity, so every row is stored
# unit-length; normalization maps [3, 4] onto [0.6, 0.8]
v = descriptors.l2_normalize(np.array([3.0, 4.0]))
print("normalize [3, 4] ->", v)

# cosine similarity of unit vectors is their dot product
a = descriptors.l2_normalize(np.array([1.0, 0.0, 1.0]))
b = descriptors.l2_normalize(np.array([0.0, 1.0, 1.0]))
print("cosine(a, b) =", round(descriptors.cosine_similarity(a, b), 6))

# a reference set holds one descriptor per (object, view); the synthetic
# generator draws a prototype per object and perturbs it per view
ref = descriptors.synth_reference_set(3, 8, dim=32, seed=0, view_noise=0.1)
print("reference tensor:", ref.descriptors.shape, ref.descriptors.dtype)
print("object labels:", ref.object_labels)

# proposals are a rank-2 stack of descriptors, one per segmentation mask
props = descriptors.synth_proposals(ref, [0, 2, 2, 1], noise=0.05, seed=1)
print("proposal matrix:", props.descriptors.shape)

# both containers share one binary file format: a magic string, the rank,
# the dimensions, then float32 payload; rank-3 files carry a JSON sidecar
# with the object labels
descriptors.save_descriptors(ref, "/tmp/reference.desc")
descriptors.save_descriptors(props, "/tmp/proposals.desc")
ref2 = descriptors.load_descriptors("/tmp/reference.desc")
props2 = descriptors.load_descriptors("/tmp/proposals.desc")
print("reference round-trip bit-exact:",
      bool(np.array_equal(ref.descriptors, ref2.descriptors)))
print("labels preserved:", ref2.object_labels == ref.object_labels)
print("proposal round-trip bit-exact:",
      bool(np.array_equal(props.descriptors, props2.descriptors)))
