"""Command-line entry points: viewpoints, match, eval, synth, bench.

The CLI wires the library stages into dataset-scale runs. `match` consumes a
reference descriptor file plus a manifest listing per-image proposal files and
emits one detections JSON; `eval` scores detections against annotations;
`synth` builds seeded synthetic fixtures; `bench` times the matching stage on
synthetic data.

Exit codes: 0 success, 2 configuration error (bad flags, missing paths,
mismatched descriptor dimensions), 3 data or format error (corrupt or
malformed input files). All JSON outputs are byte-deterministic for a fixed
configuration and seed; wall-clock timings go to stdout only, except the
optional times carried in the manifest, which are copied into the detections.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import descriptors, evaluator, maskops, matcher, viewsphere
from .errors import CorruptFileError, FormatError, ViewmatchError

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3


def _load_config(path: str | None) -> dict:
    """Optional JSON config mirroring the match/eval flags."""
    if path is None:
        return {}
    p = Path(path)
    if not p.is_file():
        raise ValueError(f"config file not found: {p}")
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"config file {p} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValueError(f"config file {p} must hold a JSON object")
    return data


def _opt(args: argparse.Namespace, cfg: dict, key: str, default):
    """Flag value with config-file fallback: CLI beats config beats default."""
    value = getattr(args, key.replace("-", "_"), None)
    if value is not None:
        return value
    if key in cfg:
        return cfg[key]
    return default


def _require_file(path: Path, what: str) -> Path:
    if not path.is_file():
        raise ValueError(f"{what} not found: {path}")
    return path


def _required_path(args: argparse.Namespace, cfg: dict, key: str, what: str) -> Path:
    value = _opt(args, cfg, key, None)
    if value is None:
        raise ValueError(f"missing --{key} (or {key!r} in the config file)")
    return _require_file(Path(value), what)


def _aggregation_method(name: str, topk: int) -> matcher.AggregationMethod:
    return matcher.AggregationMethod(str(name).replace("-", "_"), k=int(topk))


def _load_manifest(path: Path) -> tuple[list[dict], dict]:
    """Manifest JSON: {"images": [{scene_id, image_id, descriptors, masks, time?}]}.

    Relative descriptor/mask paths are resolved against the manifest's
    directory. Returns (entries, extra metadata such as stage timings).
    """
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorruptFileError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict) or "images" not in data:
        raise FormatError(f"{path}: manifest must be an object with an 'images' list")
    images = data["images"]
    if not isinstance(images, list):
        raise FormatError(f"{path}: 'images' must be a list")

    base = path.parent
    entries = []
    for i, rec in enumerate(images):
        if not isinstance(rec, dict) or not all(
            k in rec for k in ("scene_id", "image_id", "descriptors", "masks")
        ):
            raise FormatError(
                f"{path}: images[{i}] needs scene_id, image_id, descriptors, masks"
            )
        entry = {
            "scene_id": int(rec["scene_id"]),
            "image_id": int(rec["image_id"]),
            "descriptors": base / str(rec["descriptors"]),
            "masks": base / str(rec["masks"]),
            "time": float(rec.get("time", -1.0)),
        }
        entries.append(entry)
    meta = {k: v for k, v in data.items() if k != "images"}
    return entries, meta


def cmd_viewpoints(args: argparse.Namespace) -> int:
    vs = viewsphere.generate_viewpoint_set(args.level, radius=args.radius)
    viewsphere.write_viewpoints(vs, args.out)
    print(f"{vs.n_views} viewpoints (level {args.level}, radius {args.radius}) -> {args.out}")
    return EXIT_OK


def _match_one(
    entry: dict, ref: descriptors.ReferenceSet, method: matcher.AggregationMethod
) -> list[dict]:
    """Match one manifest entry, returning detection records in proposal order."""
    loaded = descriptors.load_descriptors(entry["descriptors"])
    if not isinstance(loaded, descriptors.ProposalDescriptors):
        raise ValueError(
            f"{entry['descriptors']}: expected a rank-2 proposal descriptor file"
        )
    masks = maskops.read_masks(entry["masks"])
    if len(masks) != loaded.n_proposals:
        raise FormatError(
            f"{entry['masks']}: {len(masks)} masks for {loaded.n_proposals} proposal descriptors"
        )

    keep = []
    for i, mask in enumerate(masks):
        if sum(mask.counts[1::2]) == 0:  # no foreground runs
            print(
                f"warning: scene {entry['scene_id']} image {entry['image_id']} "
                f"proposal {i}: empty mask, skipped",
                file=sys.stderr,
            )
        else:
            keep.append(i)
    if len(keep) < loaded.n_proposals:
        kept = descriptors.ProposalDescriptors(loaded.descriptors[keep])
    else:
        kept = loaded
    kept_masks = [masks[i] for i in keep]

    dets = matcher.match_proposals(kept, kept_masks, ref, method)
    return [
        matcher.detection_record(
            d,
            scene_id=entry["scene_id"],
            image_id=entry["image_id"],
            category_id=matcher.category_id_for_label(d.object_label, ref.object_labels),
            time=entry["time"],
        )
        for d in dets
    ]


def _reported_path(out: Path) -> Path:
    return out.with_name(out.stem + ".reported" + (out.suffix or ".json"))


def cmd_match(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    ref_path = _required_path(args, cfg, "ref", "reference file")
    manifest_path = _required_path(args, cfg, "manifest", "manifest file")
    out = Path(_opt(args, cfg, "out", "detections.json"))
    method = _aggregation_method(
        _opt(args, cfg, "aggregation", "mean-topk"), _opt(args, cfg, "topk", 5)
    )
    threshold = float(_opt(args, cfg, "report_threshold", 0.5))
    workers = int(_opt(args, cfg, "workers", 1))
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")

    t0 = time.perf_counter()
    ref = descriptors.load_descriptors(ref_path)
    if not isinstance(ref, descriptors.ReferenceSet):
        raise ValueError(f"{ref_path}: expected a rank-3 reference descriptor file")
    t_ref = time.perf_counter() - t0

    entries, meta = _load_manifest(manifest_path)

    t1 = time.perf_counter()
    if workers == 1:
        per_image = [_match_one(e, ref, method) for e in entries]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_image = list(pool.map(lambda e: _match_one(e, ref, method), entries))
    t_match = time.perf_counter() - t1

    records = [rec for recs in per_image for rec in recs]
    matcher.write_detections(records, out)
    reported = [r for r in records if r["score"] >= threshold]
    sidecar = _reported_path(out)
    matcher.write_detections(reported, sidecar)

    print(f"{len(records)} detections across {len(entries)} images -> {out}")
    print(f"{len(reported)} detections with score >= {threshold} -> {sidecar}")
    stages = [f"reference load {t_ref:.3f} s", f"matching {t_match:.3f} s"]
    for key in ("onboarding_s", "proposal_s"):  # extractor-recorded stage times
        if key in meta:
            stages.insert(0, f"{key[:-2]} {float(meta[key]):.3f} s")
    print("timing: " + ", ".join(stages))
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    det_path = _required_path(args, cfg, "detections", "detections file")
    ann_path = _required_path(args, cfg, "annotations", "annotations file")
    out = Path(_opt(args, cfg, "out", "report.json"))

    dets = evaluator.read_detections(det_path)
    gts, _images = evaluator.read_annotations(ann_path)
    report = evaluator.ap_coco(dets, gts)

    evaluator.write_report(report, out)
    table = evaluator.format_report(report)
    table_path = out.with_suffix(".txt")
    table_path.write_text(table, encoding="utf-8")

    print(table, end="")
    print(f"mean AP {report.mean_ap:.4f} -> {out}")
    return EXIT_OK


def _grid_masks(n: int, cell: int = 12, side: int = 8) -> tuple[list[maskops.Rle], int, int]:
    """n disjoint square masks laid out on a grid, plus the image size."""
    cols = max(1, math.ceil(math.sqrt(n)))
    rows = max(1, math.ceil(n / cols)) if n else 1
    h, w = rows * cell, cols * cell
    masks = []
    for i in range(n):
        r, c = divmod(i, cols)
        mask = np.zeros((h, w), dtype=bool)
        y0, x0 = r * cell + 2, c * cell + 2
        mask[y0 : y0 + side, x0 : x0 + side] = True
        masks.append(maskops.rle_encode(mask))
    return masks, h, w


def cmd_synth(args: argparse.Namespace) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    ref = descriptors.synth_reference_set(
        args.n_objects, args.n_views, dim=args.dim,
        seed=args.seed, view_noise=args.view_noise,
    )
    rng = np.random.default_rng(args.seed + 1)
    assignments = rng.integers(0, args.n_objects, size=args.n_proposals)
    proposals = descriptors.synth_proposals(
        ref, assignments, noise=args.proposal_noise, seed=args.seed + 2
    )
    masks, h, w = _grid_masks(args.n_proposals)

    descriptors.save_descriptors(ref, out_dir / "reference.desc")
    descriptors.save_descriptors(proposals, out_dir / "proposals.desc")
    maskops.write_masks(masks, out_dir / "masks.json")

    manifest = {
        "images": [
            {
                "scene_id": 1,
                "image_id": 1,
                "descriptors": "proposals.desc",
                "masks": "masks.json",
            }
        ]
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )

    annotations = {
        "images": [{"scene_id": 1, "image_id": 1, "height": h, "width": w}],
        "annotations": [
            {
                "scene_id": 1,
                "image_id": 1,
                "object_label": ref.object_labels[int(a)],
                "segmentation": masks[i].to_json(),
                "ignore": False,
            }
            for i, a in enumerate(assignments)
        ],
    }
    (out_dir / "annotations.json").write_text(
        json.dumps(annotations, indent=2) + "\n", encoding="utf-8"
    )

    truth = {"object_labels": [ref.object_labels[int(a)] for a in assignments]}
    (out_dir / "truth.json").write_text(
        json.dumps(truth, indent=2) + "\n", encoding="utf-8"
    )

    print(
        f"synthetic fixtures: {args.n_objects} objects x {args.n_views} views, "
        f"dim {args.dim}, {args.n_proposals} proposals "
        f"(view noise {args.view_noise}, proposal noise {args.proposal_noise}) -> {out_dir}"
    )
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    for name in ("n_proposals", "n_objects", "n_views", "dim", "repeats"):
        if getattr(args, name) < 1:
            raise ValueError(f"--{name.replace('_', '-')} must be >= 1")
    method = _aggregation_method(args.aggregation, args.topk)

    ref = descriptors.synth_reference_set(
        args.n_objects, args.n_views, dim=args.dim, seed=args.seed, view_noise=0.1
    )
    rng = np.random.default_rng(args.seed + 1)
    assignments = rng.integers(0, args.n_objects, size=args.n_proposals)
    proposals = descriptors.synth_proposals(ref, assignments, noise=0.1, seed=args.seed + 2)
    masks = [maskops.Rle(size=(1, 1), counts=[0, 1])] * args.n_proposals

    times = []
    for _ in range(args.repeats):
        t0 = time.perf_counter()
        tensor = matcher.similarity_tensor(proposals, ref)
        agg = matcher.aggregate_views(tensor, method)
        matcher.assign_objects(agg, ref.object_labels, masks)
        times.append(time.perf_counter() - t0)

    median = float(np.median(times))
    p95 = float(np.percentile(times, 95))
    flops = 2 * args.n_proposals * args.n_objects * args.n_views * args.dim

    print(
        f"matching benchmark: N_P={args.n_proposals} N_O={args.n_objects} "
        f"N_V={args.n_views} D={args.dim} aggregation={args.aggregation}(k={args.topk})"
    )
    print(f"median {median:.4f} s, p95 {p95:.4f} s over {args.repeats} repeats")
    print(f"similarity FLOPs per run: {flops:.3e}")

    if args.out is not None:
        payload = {
            "params": {
                "n_proposals": args.n_proposals,
                "n_objects": args.n_objects,
                "n_views": args.n_views,
                "dim": args.dim,
                "aggregation": args.aggregation,
                "topk": args.topk,
                "seed": args.seed,
            },
            "repeats": args.repeats,
            "median_s": median,
            "p95_s": p95,
            "similarity_flops": flops,
        }
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        print(f"benchmark report -> {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="viewmatch",
        description="Template matching and COCO-style mask AP evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("viewpoints", help="sample icosphere viewpoints with camera poses")
    p.add_argument("--level", type=int, required=True, help="subdivision level (0 -> 12 views, 1 -> 42, 2 -> 162)")
    p.add_argument("--radius", type=float, default=1.0, help="camera distance from the origin")
    p.add_argument("--out", type=Path, default=Path("viewpoints.json"))
    p.set_defaults(func=cmd_viewpoints)

    p = sub.add_parser("match", help="label proposals against a reference descriptor set")
    p.add_argument("--ref", help="rank-3 reference descriptor file")
    p.add_argument("--manifest", help="manifest JSON listing per-image proposal files")
    p.add_argument("--aggregation", choices=["mean", "median", "max", "mean-topk"])
    p.add_argument("--topk", type=int, help="k for mean-topk aggregation (default 5)")
    p.add_argument("--report-threshold", type=float,
                   help="score cutoff for the filtered sidecar (default 0.5)")
    p.add_argument("--workers", type=int, help="worker threads over images (default 1)")
    p.add_argument("--out", help="detections JSON path (default detections.json)")
    p.add_argument("--config", help="JSON config supplying defaults for these flags")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("eval", help="score detections against ground-truth annotations")
    p.add_argument("--detections", help="detections JSON from `match`")
    p.add_argument("--annotations", help="annotations JSON")
    p.add_argument("--out", help="report JSON path (default report.json)")
    p.add_argument("--config", help="JSON config supplying defaults for these flags")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate seeded synthetic fixtures")
    p.add_argument("--n-objects", type=int, default=10)
    p.add_argument("--n-views", type=int, default=42)
    p.add_argument("--dim", type=int, default=descriptors.DEFAULT_DIM)
    p.add_argument("--view-noise", type=float, default=0.1,
                   help="sigma of per-view perturbation around each prototype")
    p.add_argument("--proposal-noise", type=float, default=0.0,
                   help="sigma of proposal perturbation")
    p.add_argument("--n-proposals", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", type=Path, required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="time the matching stage on synthetic data")
    p.add_argument("--n-proposals", type=int, default=100)
    p.add_argument("--n-objects", type=int, default=132)
    p.add_argument("--n-views", type=int, default=42)
    p.add_argument("--dim", type=int, default=descriptors.DEFAULT_DIM)
    p.add_argument("--aggregation", choices=["mean", "median", "max", "mean-topk"],
                   default="mean-topk")
    p.add_argument("--topk", type=int, default=5)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="optional benchmark report JSON path")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ViewmatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
