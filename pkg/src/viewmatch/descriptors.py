"""Descriptors, their normalization and similarity, and the interchange file format.

A descriptor is the global embedding vector of one image crop, stored as D
32-bit floats (D = 1024 by default) and always unit L2 norm. Reference sets
stack one descriptor per (object, view) into an N_O x N_V x D tensor; proposal
descriptors are N_P x D. Both travel between the extraction side and this
engine in a small binary format (magic ``CNOSDSC1``), with object labels in a
JSON sidecar for the rank-3 case.

A seeded synthetic backend stands in for real embedding models in tests and
benchmarks: each object gets a random unit prototype, views and proposals are
Gaussian perturbations of it.
"""

from __future__ import annotations

import json
import struct
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    CorruptFileError,
    DegenerateDescriptorError,
    FormatError,
    ValidationError,
)

__all__ = [
    "DEFAULT_DIM",
    "Descriptor",
    "ReferenceSet",
    "ProposalDescriptors",
    "l2_normalize",
    "cosine_similarity",
    "save_descriptors",
    "load_descriptors",
    "synth_reference_set",
    "synth_proposals",
]

DEFAULT_DIM = 1024

MAGIC = b"CNOSDSC1"
VERSION = 1

# Alias: a single descriptor is just a unit-norm float vector.
Descriptor = np.ndarray

_DEGENERATE_NORM = 1e-12
# Rows further than this from unit norm get renormalized on load; rows already
# unit within it are left untouched so round-trips stay bit-exact.
_RENORM_TOL = 1e-6
_WARN_CHANGE = 1e-3


def l2_normalize(v: np.ndarray) -> np.ndarray:
    """Scale a vector to unit L2 norm (computed in float64).

    Raises DegenerateDescriptorError when the norm is below 1e-12.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.size == 0:
        raise ValueError("cannot normalize an empty vector")
    norm = np.linalg.norm(v)
    if norm < _DEGENERATE_NORM:
        raise DegenerateDescriptorError(f"descriptor norm {norm} is below {_DEGENERATE_NORM}")
    return v / norm


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Dot product of two unit-norm descriptors, clamped to [-1, 1]."""
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.shape != b.shape:
        raise ValueError(f"descriptor dims differ: {a.shape[0]} vs {b.shape[0]}")
    return float(np.clip(np.dot(a, b), -1.0, 1.0))


def _normalize_rows(raw: np.ndarray) -> np.ndarray:
    """Unit-normalize the last axis in float64, returning float32.

    Rows already unit within 1e-6 are passed through unchanged, so inputs that
    are unit-norm to begin with survive bit-exactly.
    """
    raw = np.asarray(raw, dtype=np.float64)
    if raw.size == 0:
        return raw.astype(np.float32)
    norms = np.linalg.norm(raw, axis=-1, keepdims=True)
    if np.any(norms < _DEGENERATE_NORM):
        raise DegenerateDescriptorError("descriptor tensor contains a (near-)zero row")
    out = np.where(np.abs(norms - 1.0) > _RENORM_TOL, raw / norms, raw)
    return out.astype(np.float32)


@dataclass(frozen=True)
class ReferenceSet:
    """Template descriptors for N_O objects under N_V views each.

    ``descriptors`` has shape (N_O, N_V, D), float32, every row unit norm.
    ``prototypes`` is only populated by the synthetic backend (the per-object
    unit vectors the views were perturbed from); it is not serialized.
    """

    object_labels: list[str]
    descriptors: np.ndarray
    prototypes: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.descriptors.ndim != 3:
            raise ValidationError(f"reference tensor must be rank 3, got rank {self.descriptors.ndim}")
        n_objects = self.descriptors.shape[0]
        if n_objects < 1:
            raise ValidationError("reference set needs at least one object")
        if len(self.object_labels) != n_objects:
            raise ValidationError(
                f"{len(self.object_labels)} labels for {n_objects} objects"
            )
        if len(set(self.object_labels)) != n_objects:
            raise ValidationError("object labels must be unique")

    @classmethod
    def from_raw(
        cls,
        object_labels: list[str],
        raw: np.ndarray,
        prototypes: np.ndarray | None = None,
    ) -> "ReferenceSet":
        """Build a reference set from unnormalized descriptors."""
        return cls(list(object_labels), _normalize_rows(raw), prototypes)

    @property
    def n_objects(self) -> int:
        return self.descriptors.shape[0]

    @property
    def n_views(self) -> int:
        return self.descriptors.shape[1]

    @property
    def dim(self) -> int:
        return self.descriptors.shape[2]


@dataclass(frozen=True)
class ProposalDescriptors:
    """Descriptors of the proposals of one image: shape (N_P, D), unit rows.

    N_P may be zero; an image can yield no proposals.
    """

    descriptors: np.ndarray

    def __post_init__(self) -> None:
        if self.descriptors.ndim != 2:
            raise ValidationError(f"proposal tensor must be rank 2, got rank {self.descriptors.ndim}")

    @classmethod
    def from_raw(cls, raw: np.ndarray) -> "ProposalDescriptors":
        return cls(_normalize_rows(np.asarray(raw)))

    @property
    def n_proposals(self) -> int:
        return self.descriptors.shape[0]

    @property
    def dim(self) -> int:
        return self.descriptors.shape[1]


def _labels_sidecar(path: Path) -> Path:
    return path.with_name(path.name + ".labels.json")


def save_descriptors(tensor: ReferenceSet | ProposalDescriptors, destination: str | Path) -> None:
    """Write a descriptor tensor in the CNOSDSC1 binary format.

    Layout (little-endian): magic (8 bytes) | version u32 | rank u32 |
    dims (rank x u32) | payload (prod(dims) x f32, last dimension contiguous).
    Reference sets additionally write ``<file>.labels.json`` with the object
    labels.
    """
    destination = Path(destination)
    data = np.ascontiguousarray(tensor.descriptors, dtype="<f4")
    dims = data.shape
    header = MAGIC + struct.pack("<II", VERSION, len(dims))
    header += struct.pack(f"<{len(dims)}I", *dims)
    destination.write_bytes(header + data.tobytes())

    if isinstance(tensor, ReferenceSet):
        sidecar = {"object_labels": tensor.object_labels}
        _labels_sidecar(destination).write_text(
            json.dumps(sidecar, indent=2) + "\n", encoding="utf-8"
        )


def load_descriptors(source: str | Path) -> ReferenceSet | ProposalDescriptors:
    """Read a CNOSDSC1 file back into a ReferenceSet (rank 3) or ProposalDescriptors (rank 2).

    Rows are renormalized if they are off unit norm by more than 1e-6 (raw
    model outputs are accepted; cosine ranking is unaffected). If that changes
    any value by more than 1e-3, a RuntimeWarning is issued so silent large
    corrections stay observable. Already-normalized payloads are preserved
    bit-exactly.
    """
    source = Path(source)
    blob = source.read_bytes()
    if len(blob) < len(MAGIC) + 8:
        raise FormatError(f"{source}: file too short for a descriptor header")
    if blob[: len(MAGIC)] != MAGIC:
        raise FormatError(f"{source}: bad magic {blob[:len(MAGIC)]!r}, expected {MAGIC!r}")
    version, rank = struct.unpack_from("<II", blob, len(MAGIC))
    if version != VERSION:
        raise FormatError(f"{source}: unsupported version {version}")
    if rank not in (2, 3):
        raise FormatError(f"{source}: rank must be 2 or 3, got {rank}")

    dims_offset = len(MAGIC) + 8
    payload_offset = dims_offset + 4 * rank
    if len(blob) < payload_offset:
        raise CorruptFileError(f"{source}: header truncated")
    dims = struct.unpack_from(f"<{rank}I", blob, dims_offset)
    expected_bytes = 4 * int(np.prod(dims, dtype=np.int64))
    actual_bytes = len(blob) - payload_offset
    if actual_bytes != expected_bytes:
        raise CorruptFileError(
            f"{source}: payload is {actual_bytes} bytes, dims {dims} require {expected_bytes}"
        )

    data = np.frombuffer(blob, dtype="<f4", offset=payload_offset).reshape(dims).copy()
    data = _renormalize_loaded(data, source)

    if rank == 2:
        return ProposalDescriptors(data)

    sidecar_path = _labels_sidecar(source)
    if not sidecar_path.exists():
        raise FormatError(f"{source}: missing labels sidecar {sidecar_path.name}")
    sidecar = json.loads(sidecar_path.read_text(encoding="utf-8"))
    labels = sidecar.get("object_labels")
    if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
        raise FormatError(f"{sidecar_path}: object_labels must be a list of strings")
    if len(labels) != dims[0]:
        raise CorruptFileError(
            f"{sidecar_path}: {len(labels)} labels for {dims[0]} objects"
        )
    return ReferenceSet(labels, data)


def _renormalize_loaded(data: np.ndarray, source: Path) -> np.ndarray:
    """Bring loaded rows to unit norm, warning on large corrections."""
    if data.size == 0:
        return data
    rows = data.reshape(-1, data.shape[-1])
    norms = np.linalg.norm(rows.astype(np.float64), axis=1)
    if np.any(norms < _DEGENERATE_NORM):
        raise DegenerateDescriptorError(f"{source}: contains a zero descriptor row")
    off = np.abs(norms - 1.0) > _RENORM_TOL
    if np.any(off):
        fixed = (rows[off].astype(np.float64) / norms[off, None]).astype(np.float32)
        max_change = float(np.max(np.abs(fixed - rows[off])))
        rows[off] = fixed
        if max_change > _WARN_CHANGE:
            warnings.warn(
                f"{source}: normalization moved descriptor values by up to {max_change:.3g}",
                RuntimeWarning,
                stacklevel=2,
            )
    return data


def synth_reference_set(
    n_objects: int,
    n_views: int,
    dim: int = DEFAULT_DIM,
    seed: int = 0,
    view_noise: float = 0.0,
) -> ReferenceSet:
    """Seeded synthetic reference set: a desk-scale substitute for real embeddings.

    Each object gets a random unit prototype; each view descriptor is
    normalize(prototype + view_noise * gaussian). Fully determined by the seed.
    """
    if n_objects < 1 or n_views < 1 or dim < 1:
        raise ValueError("n_objects, n_views and dim must all be >= 1")
    if view_noise < 0:
        raise ValueError(f"view_noise must be >= 0, got {view_noise}")

    rng = np.random.default_rng(seed)
    prototypes = rng.standard_normal((n_objects, dim))
    prototypes /= np.linalg.norm(prototypes, axis=1, keepdims=True)
    views = prototypes[:, None, :] + view_noise * rng.standard_normal((n_objects, n_views, dim))
    labels = [f"obj_{i + 1:06d}" for i in range(n_objects)]
    return ReferenceSet.from_raw(labels, views, prototypes=prototypes.astype(np.float32))


def synth_proposals(
    ref: ReferenceSet,
    assignments: list[int],
    noise: float = 0.0,
    seed: int = 0,
) -> ProposalDescriptors:
    """Seeded synthetic proposals drawn around the reference set's prototypes.

    Proposal i is normalize(prototype[assignments[i]] + noise * gaussian).
    Only reference sets produced by :func:`synth_reference_set` carry
    prototypes; pass the same set (not a reloaded copy) here.
    """
    if ref.prototypes is None:
        raise ValueError("reference set has no prototypes; use one from synth_reference_set")
    if noise < 0:
        raise ValueError(f"noise must be >= 0, got {noise}")
    assignments = list(assignments)
    for a in assignments:
        if not 0 <= a < ref.n_objects:
            raise ValueError(f"assignment {a} out of range for {ref.n_objects} objects")

    rng = np.random.default_rng(seed)
    if not assignments:
        return ProposalDescriptors(np.zeros((0, ref.dim), dtype=np.float32))
    base = ref.prototypes[np.asarray(assignments, dtype=np.intp)].astype(np.float64)
    raw = base + noise * rng.standard_normal((len(assignments), ref.dim))
    return ProposalDescriptors.from_raw(raw)
