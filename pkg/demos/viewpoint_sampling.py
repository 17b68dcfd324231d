"""
Sampling viewpoints on the icosphere
====================================

Builds the subdivision levels used for template rendering, checks the
vertex counts, and inspects one camera pose.
"""

import numpy as np

from viewmatch import viewsphere

# each subdivision level quadruples the face count; the vertex counts
# follow 10 * 4**level + 2
for level in range(3):
    vs = viewsphere.generate_viewpoint_set(level, radius=1.0)
    print(f"level {level}: {vs.n_views} viewpoints")

# every direction is a unit vector, and the ordering is canonical, so two
# runs produce identical files
vs = viewsphere.generate_viewpoint_set(1, radius=0.8)
norms = np.linalg.norm(vs.directions(), axis=1)
print(f"direction norms: min {norms.min():.12f}, max {norms.max():.12f}")

# camera poses look at the origin from radius * direction; the rotation is
# orthonormal and its third column points back along the view direction
pose = vs.poses[0]
R = pose.rotation
print("first pose rotation:")
print(np.round(R, 6))
print("R @ R.T == I:", bool(np.allclose(R @ R.T, np.eye(3), atol=1e-12)))
print("det(R):", round(float(np.linalg.det(R)), 12))

# in the camera frame the object center sits on the +z axis at the sampling
# radius
center_in_cam = -R.T @ pose.translation
print("object center in camera frame:", np.round(center_in_cam, 12))

# the set serializes to JSON with enough digits to round-trip exactly
viewsphere.write_viewpoints(vs, "/tmp/viewpoints_level1.json")
again = viewsphere.read_viewpoints("/tmp/viewpoints_level1.json")
print("JSON round-trip exact:", bool(np.array_equal(vs.directions(), again.directions())))
