/**
 * Detection overlays: blend each reported mask over its test image with a
 * per-label color and an opaque bounding-box outline.
 */

import * as path from "path";
import { DetectionRecord, ensureDir, readDetections } from "./formats";
import { Image, cloneImage, loadImage, saveImage } from "./image";
import { rleDecode } from "./rle";

// a fixed palette keeps colors stable across runs; labels index it by hash
const PALETTE: [number, number, number][] = [
  [230, 25, 75],
  [60, 180, 75],
  [255, 225, 25],
  [0, 130, 200],
  [245, 130, 48],
  [145, 30, 180],
  [70, 240, 240],
  [240, 50, 230],
  [210, 245, 60],
  [250, 190, 190],
  [0, 128, 128],
  [170, 110, 40],
];

export function labelColor(label: string): [number, number, number] {
  let hash = 2166136261;
  for (let i = 0; i < label.length; i++) {
    hash = (hash ^ label.charCodeAt(i)) >>> 0;
    hash = Math.imul(hash, 16777619) >>> 0;
  }
  return PALETTE[hash % PALETTE.length];
}

function blendMask(image: Image, det: DetectionRecord): void {
  const [cr, cg, cb] = labelColor(det.object_label);
  const mask = rleDecode(det.segmentation);
  if (mask.width !== image.width || mask.height !== image.height) {
    throw new Error(
      `detection mask ${mask.width}x${mask.height} does not match image ` +
        `${image.width}x${image.height}`
    );
  }
  for (let p = 0; p < mask.data.length; p++) {
    if (!mask.data[p]) continue;
    const base = p * 4;
    image.data[base] = Math.round(0.5 * image.data[base] + 0.5 * cr);
    image.data[base + 1] = Math.round(0.5 * image.data[base + 1] + 0.5 * cg);
    image.data[base + 2] = Math.round(0.5 * image.data[base + 2] + 0.5 * cb);
  }
  const [bx, by, bw, bh] = det.bbox.map(Math.round);
  for (let x = bx; x < bx + bw; x++) {
    for (const y of [by, by + bh - 1]) {
      if (x >= 0 && x < image.width && y >= 0 && y < image.height) {
        const base = (y * image.width + x) * 4;
        image.data[base] = cr;
        image.data[base + 1] = cg;
        image.data[base + 2] = cb;
      }
    }
  }
  for (let y = by; y < by + bh; y++) {
    for (const x of [bx, bx + bw - 1]) {
      if (x >= 0 && x < image.width && y >= 0 && y < image.height) {
        const base = (y * image.width + x) * 4;
        image.data[base] = cr;
        image.data[base + 1] = cg;
        image.data[base + 2] = cb;
      }
    }
  }
}

export interface OverlayJob {
  detectionsFile: string;
  imagesDir: string; // files named <scene:06>_<image:06>.png
  outDir: string;
  threshold?: number;
}

export interface OverlayResult {
  nImages: number;
  nDrawn: number;
}

export function imageFileName(sceneId: number, imageId: number): string {
  return `${String(sceneId).padStart(6, "0")}_${String(imageId).padStart(6, "0")}.png`;
}

export function renderOverlays(job: OverlayJob): OverlayResult {
  const threshold = job.threshold ?? 0.5;
  const detections = readDetections(job.detectionsFile);
  ensureDir(job.outDir);

  const groups = new Map<string, DetectionRecord[]>();
  for (const det of detections) {
    const key = imageFileName(det.scene_id, det.image_id);
    const group = groups.get(key) ?? [];
    group.push(det);
    groups.set(key, group);
  }

  let drawn = 0;
  for (const [name, group] of [...groups.entries()].sort()) {
    const image = cloneImage(loadImage(path.join(job.imagesDir, name)));
    const reported = group
      .filter((d) => d.score >= threshold)
      .sort((a, b) => a.score - b.score); // strongest drawn last, on top
    for (const det of reported) {
      blendMask(image, det);
      drawn++;
    }
    saveImage(image, path.join(job.outDir, name));
  }
  return { nImages: groups.size, nDrawn: drawn };
}
