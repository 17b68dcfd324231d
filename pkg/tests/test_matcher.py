from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from viewmatch.descriptors import (
    ProposalDescriptors,
    ReferenceSet,
    synth_proposals,
    synth_reference_set,
)
from viewmatch.maskops import Rle, rle_encode
from viewmatch.matcher import (
    AggregationMethod,
    aggregate_views,
    assign_objects,
    category_id_for_label,
    detection_record,
    match_proposals,
    similarity_tensor,
    top_k_templates,
    write_detections,
)


def _tensor_from_views(views: list[float]) -> np.ndarray:
    return np.asarray(views, dtype=np.float32).reshape(1, 1, -1)


def _dummy_masks(n: int) -> list[Rle]:
    return [Rle(size=(1, 1), counts=[0, 1])] * n


def test_aggregation_method_validation():
    AggregationMethod("mean")
    AggregationMethod("mean_topk", k=3)
    with pytest.raises(ValueError):
        AggregationMethod("sum")
    with pytest.raises(ValueError):
        AggregationMethod("mean_topk", k=0)


def test_similarity_tensor_shape_and_identity():
    ref = synth_reference_set(3, 8, dim=16, seed=2, view_noise=0.3)
    copy = ProposalDescriptors(ref.descriptors[2, 7][None, :])
    tensor = similarity_tensor(copy, ref)
    assert tensor.shape == (1, 3, 8)
    assert tensor.dtype == np.float32
    assert tensor[0, 2, 7] > 1.0 - 1e-6
    assert np.all(tensor >= -1.0) and np.all(tensor <= 1.0)


def test_similarity_tensor_orthogonal_proposal():
    # templates live on axes 0..2, proposal on axis 3: all similarities zero
    eye = np.eye(4, dtype=np.float32)
    ref = ReferenceSet(["a", "b", "c"], eye[:3].reshape(3, 1, 4))
    props = ProposalDescriptors(eye[3][None, :])
    tensor = similarity_tensor(props, ref)
    assert np.array_equal(tensor, np.zeros((1, 3, 1), dtype=np.float32))


def test_similarity_tensor_dim_mismatch():
    ref = synth_reference_set(2, 3, dim=16, seed=0)
    props = ProposalDescriptors(np.ones((1, 8), dtype=np.float32))
    with pytest.raises(ValueError):
        similarity_tensor(props, ref)


def test_aggregate_example_values():
    assert aggregate_views(_tensor_from_views([0.2, 0.9, 0.5]), AggregationMethod("max"))[0, 0] == pytest.approx(0.9)
    assert aggregate_views(
        _tensor_from_views([0.9, 0.7, 0.1]), AggregationMethod("mean_topk", k=2)
    )[0, 0] == pytest.approx(0.8)
    assert aggregate_views(
        _tensor_from_views([0.1, 0.3, 0.8, 0.9]), AggregationMethod("median")
    )[0, 0] == pytest.approx(0.55)
    assert aggregate_views(_tensor_from_views([0.2, 0.4]), AggregationMethod("mean"))[
        0, 0
    ] == pytest.approx(0.3)


def test_mean_topk_one_equals_max_exactly():
    rng = np.random.default_rng(17)
    for _ in range(50):
        tensor = rng.uniform(-1, 1, size=(4, 3, int(rng.integers(1, 40)))).astype(np.float32)
        top1 = aggregate_views(tensor, AggregationMethod("mean_topk", k=1))
        mx = aggregate_views(tensor, AggregationMethod("max"))
        assert np.array_equal(top1, mx)


def test_mean_topk_full_equals_mean():
    rng = np.random.default_rng(18)
    for _ in range(50):
        n_views = int(rng.integers(1, 40))
        tensor = rng.uniform(-1, 1, size=(2, 5, n_views)).astype(np.float32)
        full = aggregate_views(tensor, AggregationMethod("mean_topk", k=n_views))
        mean = aggregate_views(tensor, AggregationMethod("mean"))
        assert np.max(np.abs(full - mean)) < 1e-7


def test_mean_topk_oversized_k_degrades_to_mean():
    tensor = _tensor_from_views([0.1, 0.5, 0.9])
    big = aggregate_views(tensor, AggregationMethod("mean_topk", k=50))
    mean = aggregate_views(tensor, AggregationMethod("mean"))
    assert np.array_equal(big, mean)


def test_aggregates_bounded_and_permutation_invariant():
    rng = np.random.default_rng(19)
    methods = [
        AggregationMethod("mean"),
        AggregationMethod("median"),
        AggregationMethod("max"),
        AggregationMethod("mean_topk", k=5),
    ]
    for _ in range(30):
        n_views = int(rng.integers(1, 30))
        tensor = rng.uniform(-1, 1, size=(3, 4, n_views)).astype(np.float32)
        perm = tensor[:, :, rng.permutation(n_views)]
        lo = tensor.min(axis=2) - 1e-12
        hi = tensor.max(axis=2) + 1e-12
        for method in methods:
            agg = aggregate_views(tensor, method)
            assert np.all(agg >= lo) and np.all(agg <= hi)
            assert np.allclose(agg, aggregate_views(perm, method), atol=1e-12)


def test_aggregate_rejects_bad_tensors():
    with pytest.raises(ValueError):
        aggregate_views(np.zeros((2, 3)), AggregationMethod("mean"))
    with pytest.raises(ValueError):
        aggregate_views(np.zeros((2, 3, 0)), AggregationMethod("mean"))


def test_assign_objects_argmax_and_tie_break():
    agg = np.array([[0.2, 0.8, 0.5], [0.5, 0.5, 0.1]])
    dets = assign_objects(agg, ["a", "b", "c"], _dummy_masks(2))
    assert dets[0].object_label == "b"
    assert dets[0].score == pytest.approx(0.8)
    assert dets[0].proposal_index == 0
    assert dets[1].object_label == "a"  # tie toward lowest object index


def test_assign_objects_empty_and_errors():
    assert assign_objects(np.zeros((0, 3)), ["a", "b", "c"], []) == []
    with pytest.raises(ValueError):
        assign_objects(np.zeros((1, 0)), [], _dummy_masks(1))
    with pytest.raises(ValueError):
        assign_objects(np.zeros((2, 2)), ["a", "b"], _dummy_masks(1))
    with pytest.raises(ValueError):
        assign_objects(np.zeros((1, 2)), ["a"], _dummy_masks(1))


def test_match_proposals_zero_noise_labels():
    ref = synth_reference_set(6, 5, dim=64, seed=3, view_noise=0.0)
    assignments = [4, 0, 2, 2, 5]
    props = synth_proposals(ref, assignments, noise=0.0, seed=4)
    dets = match_proposals(props, _dummy_masks(5), ref, AggregationMethod("max"))
    for det, obj in zip(dets, assignments):
        assert det.object_label == ref.object_labels[obj]
        assert det.score > 1.0 - 1e-6


def test_match_proposals_object_permutation():
    ref = synth_reference_set(5, 4, dim=32, seed=6, view_noise=0.1)
    props = synth_proposals(ref, [0, 1, 2, 3, 4], noise=0.05, seed=7)
    dets = match_proposals(props, _dummy_masks(5), ref, AggregationMethod("mean"))

    perm = [3, 1, 4, 0, 2]
    permuted = ReferenceSet(
        [ref.object_labels[i] for i in perm], ref.descriptors[perm]
    )
    dets_perm = match_proposals(props, _dummy_masks(5), permuted, AggregationMethod("mean"))
    for a, b in zip(dets, dets_perm):
        assert a.object_label == b.object_label
        assert a.score == pytest.approx(b.score, abs=1e-12)


def test_top_k_templates_matches_brute_force():
    rng = np.random.default_rng(23)
    tensor = rng.uniform(-1, 1, size=(4, 3, 17)).astype(np.float32)
    scores = tensor[2, 1]
    for k in (1, 5, 17, 99):
        got = top_k_templates(tensor, proposal=2, obj=1, k=k)
        assert len(got) == min(k, 17)
        expected_order = sorted(range(17), key=lambda v: (-scores[v], v))[: min(k, 17)]
        assert [v for v, _ in got] == expected_order
        assert all(s == pytest.approx(scores[v]) for v, s in got)
    # k=1 is Max aggregation's witness
    best_view, best_score = top_k_templates(tensor, 2, 1, 1)[0]
    assert best_score == pytest.approx(
        aggregate_views(tensor, AggregationMethod("max"))[2, 1]
    )
    assert scores[best_view] == scores.max()


def test_top_k_templates_tie_prefers_lower_view():
    tensor = np.array([0.5, 0.9, 0.9, 0.1], dtype=np.float32).reshape(1, 1, 4)
    assert [v for v, _ in top_k_templates(tensor, 0, 0, 2)] == [1, 2]


def test_top_k_templates_validation():
    tensor = np.zeros((2, 2, 4), dtype=np.float32)
    with pytest.raises(ValueError):
        top_k_templates(tensor, 2, 0, 1)
    with pytest.raises(ValueError):
        top_k_templates(tensor, 0, -1, 1)
    with pytest.raises(ValueError):
        top_k_templates(tensor, 0, 0, 0)


def test_detection_record_fields():
    mask = np.zeros((4, 6), dtype=bool)
    mask[1:3, 2:5] = True
    rle = rle_encode(mask)
    dets = assign_objects(np.array([[0.3, 0.7]]), ["obj_000004", "obj_000009"], [rle])
    rec = detection_record(dets[0], scene_id=2, image_id=31, category_id=9, time=0.25)
    assert rec["scene_id"] == 2
    assert rec["image_id"] == 31
    assert rec["category_id"] == 9
    assert rec["object_label"] == "obj_000009"
    assert rec["score"] == pytest.approx(0.7)
    assert rec["bbox"] == [2, 1, 3, 2]
    assert rec["segmentation"] == rle.to_json()
    assert rec["time"] == 0.25


def test_write_detections_deterministic(tmp_path: Path):
    mask = rle_encode(np.ones((2, 2), dtype=bool))
    dets = assign_objects(np.array([[0.4]]), ["obj_000001"], [mask])
    records = [detection_record(d, 1, 1, 1) for d in dets]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    write_detections(records, a)
    write_detections(records, b)
    assert a.read_bytes() == b.read_bytes()
    parsed = json.loads(a.read_text(encoding="utf-8"))
    assert parsed[0]["time"] == -1.0  # no wall clock in outputs


def test_category_id_from_label():
    labels = ["obj_000012", "widget", "part7"]
    assert category_id_for_label("obj_000012", labels) == 12
    assert category_id_for_label("part7", labels) == 7
    assert category_id_for_label("widget", labels) == 2  # 1-based position
