"""
Timing the matching stage
=========================

Measures similarity + aggregation + assignment at dataset-scale shapes.
The matrix multiply dominates; everything else is noise.
"""

import time

import numpy as np

from viewmatch import descriptors, maskops, matcher

# 100 proposals against 132 objects x 42 views of 1024-d descriptors is a
# realistic per-image workload
N_P, N_O, N_V, D = 100, 132, 42, 1024

ref = descriptors.synth_reference_set(N_O, N_V, dim=D, seed=0, view_noise=0.1)
rng = np.random.default_rng(1)
truth = rng.integers(0, N_O, size=N_P)
props = descriptors.synth_proposals(ref, truth, noise=0.1, seed=2)
masks = [maskops.Rle(size=(1, 1), counts=[0, 1])] * N_P
method = matcher.AggregationMethod("mean_topk", k=5)

# warm up once so the first-run allocation cost stays out of the numbers
matcher.match_proposals(props, masks, ref, method)

times = []
for _ in range(7):
    t0 = time.perf_counter()
    matcher.match_proposals(props, masks, ref, method)
    times.append(time.perf_counter() - t0)

median = float(np.median(times))
flops = 2 * N_P * N_O * N_V * D
print(f"shape: {N_P} proposals x {N_O} objects x {N_V} views, D={D}")
print(f"median {median * 1e3:.2f} ms over {len(times)} runs "
      f"(p95 {float(np.percentile(times, 95)) * 1e3:.2f} ms)")
print(f"similarity GFLOPs per run: {flops / 1e9:.2f} "
      f"-> {flops / median / 1e9:.1f} GFLOP/s effective")

# the same numbers are available from the command line:
#   viewmatch bench --n-proposals 100 --n-objects 132 --n-views 42 --dim 1024
