"""Viewpoint sampling on the unit sphere and camera poses for template rendering.

Viewpoints come from recursive icosahedron subdivision: each refinement level
splits every triangle into four by its edge midpoints and projects the new
vertices back onto the sphere, giving 12 / 42 / 162 well-distributed directions
at levels 0 / 1 / 2. Every direction is paired with a look-at camera pose so an
external renderer can produce one template image per viewpoint.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Viewpoint",
    "CameraPose",
    "ViewpointSet",
    "icosphere_vertices",
    "camera_pose_from_viewpoint",
    "generate_viewpoint_set",
    "write_viewpoints",
    "read_viewpoints",
]

# Golden-ratio icosahedron: the 12 cyclic permutations of (0, +-1, +-phi),
# with the 20 faces of the standard vertex ordering below.
_PHI = (1.0 + math.sqrt(5.0)) / 2.0

_ICO_VERTICES = np.array(
    [
        [-1.0, _PHI, 0.0],
        [1.0, _PHI, 0.0],
        [-1.0, -_PHI, 0.0],
        [1.0, -_PHI, 0.0],
        [0.0, -1.0, _PHI],
        [0.0, 1.0, _PHI],
        [0.0, -1.0, -_PHI],
        [0.0, 1.0, -_PHI],
        [_PHI, 0.0, -1.0],
        [_PHI, 0.0, 1.0],
        [-_PHI, 0.0, -1.0],
        [-_PHI, 0.0, 1.0],
    ],
    dtype=np.float64,
)

_ICO_FACES = [
    (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
    (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
    (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
    (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
]

_FALLBACK_UP = np.array([1.0, 0.0, 0.0])
_PARALLEL_TOL = 1e-6


@dataclass(frozen=True)
class Viewpoint:
    """A unit direction from the object center toward the camera."""

    direction: np.ndarray  # (3,) float64, unit norm
    level: int


@dataclass(frozen=True)
class CameraPose:
    """Camera-to-world pose looking at the origin.

    ``rotation`` columns are the camera axes in world coordinates
    (x right, y down, z = optical axis); the optical axis points from the
    camera center back at the origin, i.e. along -direction.
    """

    rotation: np.ndarray  # (3, 3) float64, orthonormal, det +1
    translation: np.ndarray  # (3,) float64, camera center = radius * direction


@dataclass(frozen=True)
class ViewpointSet:
    """All viewpoints of one subdivision level with their camera poses."""

    level: int
    radius: float
    viewpoints: list[Viewpoint]
    poses: list[CameraPose]

    @property
    def n_views(self) -> int:
        return len(self.viewpoints)

    def directions(self) -> np.ndarray:
        """Stack the viewpoint directions into an (N, 3) array."""
        return np.stack([v.direction for v in self.viewpoints])


def icosphere_vertices(level: int) -> list[np.ndarray]:
    """Unit vertices of the icosphere at the given subdivision level.

    Level 0 is the bare icosahedron (12 vertices); each further level splits
    every triangle into four, for 10 * 4**level + 2 vertices in total. The
    result is in canonical order: sorted lexicographically by (z, y, x) after
    rounding to 1e-9, so repeated calls (and repeated runs) agree exactly.
    """
    if level < 0:
        raise ValueError(f"subdivision level must be >= 0, got {level}")

    vertices = [tuple(v) for v in _unit_rows(_ICO_VERTICES)]
    faces = list(_ICO_FACES)

    for _ in range(level):
        vertices, faces = _subdivide_once(vertices, faces)

    order = sorted(
        range(len(vertices)),
        key=lambda i: (
            round(vertices[i][2], 9),
            round(vertices[i][1], 9),
            round(vertices[i][0], 9),
        ),
    )
    return [np.array(vertices[i]) for i in order]


def camera_pose_from_viewpoint(
    direction: np.ndarray,
    radius: float,
    up_hint: np.ndarray = np.array([0.0, 1.0, 0.0]),
) -> CameraPose:
    """Look-at pose for a camera at ``radius * direction`` aimed at the origin.

    ``up_hint`` fixes the roll; if it is (numerically) parallel to the viewing
    direction it is replaced by (1, 0, 0), and by (0, 1, 0) if that is parallel
    too, so poles never fail.
    """
    direction = np.asarray(direction, dtype=np.float64).reshape(3)
    norm = np.linalg.norm(direction)
    if norm < 1e-12:
        raise ValueError("viewpoint direction must be non-zero")
    if abs(norm - 1.0) > _PARALLEL_TOL:
        raise ValueError(f"viewpoint direction must be unit-norm, got |d| = {norm}")
    if radius <= 0:
        raise ValueError(f"camera radius must be positive, got {radius}")

    up = np.asarray(up_hint, dtype=np.float64).reshape(3)
    up_norm = np.linalg.norm(up)
    up = _FALLBACK_UP if up_norm < 1e-12 else up / up_norm
    if abs(np.dot(direction, up)) > 1.0 - _PARALLEL_TOL:
        up = _FALLBACK_UP
    if abs(np.dot(direction, up)) > 1.0 - _PARALLEL_TOL:
        up = np.array([0.0, 1.0, 0.0])

    forward = -direction  # optical axis, camera looks at the origin
    right = np.cross(forward, up)
    right /= np.linalg.norm(right)
    down = np.cross(forward, right)

    rotation = np.column_stack([right, down, forward])
    translation = radius * direction
    return CameraPose(rotation=rotation, translation=translation)


def generate_viewpoint_set(
    level: int,
    radius: float = 1.0,
    up_hint: np.ndarray = np.array([0.0, 1.0, 0.0]),
) -> ViewpointSet:
    """Viewpoints plus camera poses for one subdivision level."""
    directions = icosphere_vertices(level)
    viewpoints = [Viewpoint(direction=d, level=level) for d in directions]
    poses = [camera_pose_from_viewpoint(d, radius, up_hint) for d in directions]
    return ViewpointSet(level=level, radius=float(radius), viewpoints=viewpoints, poses=poses)


def write_viewpoints(viewpoint_set: ViewpointSet, destination: str | Path) -> None:
    """Serialize a ViewpointSet as JSON.

    Floats are written with 17 significant digits, which round-trips IEEE
    doubles exactly, so ``read_viewpoints`` reproduces the set bit for bit.
    """
    records = []
    for viewpoint, pose in zip(viewpoint_set.viewpoints, viewpoint_set.poses):
        records.append(
            "    {"
            f'"direction": {_fmt_vec(viewpoint.direction)}, '
            f'"rotation": {_fmt_mat(pose.rotation)}, '
            f'"translation": {_fmt_vec(pose.translation)}'
            "}"
        )
    body = ",\n".join(records)
    text = (
        "{\n"
        f'  "level": {viewpoint_set.level},\n'
        f'  "radius": {_fmt_float(viewpoint_set.radius)},\n'
        '  "poses": [\n'
        f"{body}\n"
        "  ]\n"
        "}\n"
    )
    Path(destination).write_text(text, encoding="utf-8")


def read_viewpoints(source: str | Path) -> ViewpointSet:
    """Load a ViewpointSet written by :func:`write_viewpoints`."""
    doc = json.loads(Path(source).read_text(encoding="utf-8"))
    level = int(doc["level"])
    radius = float(doc["radius"])
    viewpoints = []
    poses = []
    for record in doc["poses"]:
        direction = np.array(record["direction"], dtype=np.float64)
        viewpoints.append(Viewpoint(direction=direction, level=level))
        poses.append(
            CameraPose(
                rotation=np.array(record["rotation"], dtype=np.float64),
                translation=np.array(record["translation"], dtype=np.float64),
            )
        )
    return ViewpointSet(level=level, radius=radius, viewpoints=viewpoints, poses=poses)


def _unit_rows(rows: np.ndarray) -> np.ndarray:
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def _subdivide_once(
    vertices: list[tuple[float, float, float]],
    faces: list[tuple[int, int, int]],
) -> tuple[list[tuple[float, float, float]], list[tuple[int, int, int]]]:
    """Split each triangle into four, projecting edge midpoints to the sphere."""
    vertices = list(vertices)
    midpoint_cache: dict[tuple[int, int], int] = {}

    def midpoint(i: int, j: int) -> int:
        key = (i, j) if i < j else (j, i)
        cached = midpoint_cache.get(key)
        if cached is not None:
            return cached
        a, b = vertices[i], vertices[j]
        m = np.array([a[0] + b[0], a[1] + b[1], a[2] + b[2]])
        m /= np.linalg.norm(m)
        idx = len(vertices)
        vertices.append(tuple(m))
        midpoint_cache[key] = idx
        return idx

    new_faces: list[tuple[int, int, int]] = []
    for a, b, c in faces:
        ab = midpoint(a, b)
        bc = midpoint(b, c)
        ca = midpoint(c, a)
        new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
    return vertices, new_faces


def _fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _fmt_vec(v: np.ndarray) -> str:
    return "[" + ", ".join(_fmt_float(x) for x in v) + "]"


def _fmt_mat(m: np.ndarray) -> str:
    return "[" + ", ".join(_fmt_vec(row) for row in m) + "]"
