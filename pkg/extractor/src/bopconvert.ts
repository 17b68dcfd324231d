/**
 * BOP ground-truth conversion: a dataset split directory becomes one
 * annotations JSON in the evaluator's schema.
 *
 * Expected layout per scene: `<split>/<scene>/scene_gt.json`, optional
 * `scene_gt_info.json` with visibility fractions, and visible-region masks
 * under `mask_visib/<image:06>_<instance:06>.png`. Instances whose
 * visibility fraction falls below the threshold are flagged `ignore`: they
 * may absorb a detection during evaluation but never count toward recall.
 */

import * as fs from "fs";
import * as path from "path";
import { z } from "zod";
import { AnnotationRecord, ImageRecord, writeAnnotations } from "./formats";
import { loadImage } from "./image";
import { ExtractionManifest, defaultPreprocessing, writeManifest } from "./manifest";
import { Mask, rleEncode } from "./rle";

export const DEFAULT_VISIBILITY_THRESHOLD = 0.1;

const sceneGtSchema = z.record(
  z.string(),
  z.array(z.object({ obj_id: z.number().int() }).loose())
);
const sceneGtInfoSchema = z.record(
  z.string(),
  z.array(z.object({ visib_fract: z.number() }).loose())
);

export interface ConvertJob {
  splitDir: string;
  out: string;
  visibilityThreshold?: number;
}

export interface ConvertResult {
  nScenes: number;
  nImages: number;
  nAnnotations: number;
  nIgnored: number;
}

export function objectLabel(objId: number): string {
  return `obj_${String(objId).padStart(6, "0")}`;
}

function maskToBinary(file: string): Mask {
  const image = loadImage(file);
  const data = new Uint8Array(image.width * image.height);
  for (let p = 0; p < data.length; p++) {
    data[p] = image.data[p * 4] ? 1 : 0;
  }
  return { height: image.height, width: image.width, data };
}

export function convertBopGt(job: ConvertJob): ConvertResult {
  const threshold = job.visibilityThreshold ?? DEFAULT_VISIBILITY_THRESHOLD;
  const sceneDirs = fs
    .readdirSync(job.splitDir)
    .filter((d) => /^\d+$/.test(d))
    .filter((d) => fs.statSync(path.join(job.splitDir, d)).isDirectory())
    .sort();
  if (sceneDirs.length === 0) {
    throw new Error(`no scene directories under ${job.splitDir}`);
  }

  const images: ImageRecord[] = [];
  const annotations: AnnotationRecord[] = [];
  let ignored = 0;

  for (const sceneDir of sceneDirs) {
    const sceneId = parseInt(sceneDir, 10);
    const root = path.join(job.splitDir, sceneDir);
    const gt = sceneGtSchema.parse(
      JSON.parse(fs.readFileSync(path.join(root, "scene_gt.json"), "utf-8"))
    );
    const infoFile = path.join(root, "scene_gt_info.json");
    const info = fs.existsSync(infoFile)
      ? sceneGtInfoSchema.parse(JSON.parse(fs.readFileSync(infoFile, "utf-8")))
      : null;

    const imageIds = Object.keys(gt)
      .map((k) => parseInt(k, 10))
      .sort((a, b) => a - b);
    for (const imageId of imageIds) {
      const instances = gt[String(imageId)];
      const visibs = info ? info[String(imageId)] ?? [] : [];
      let dims: [number, number] | null = null;
      instances.forEach((inst, idx) => {
        const maskFile = path.join(
          root,
          "mask_visib",
          `${String(imageId).padStart(6, "0")}_${String(idx).padStart(6, "0")}.png`
        );
        if (!fs.existsSync(maskFile)) {
          throw new Error(`missing visible mask ${maskFile}`);
        }
        const mask = maskToBinary(maskFile);
        dims = dims ?? [mask.height, mask.width];
        const visib = visibs[idx]?.visib_fract ?? 1.0;
        const ignore = visib < threshold;
        if (ignore) ignored++;
        annotations.push({
          scene_id: sceneId,
          image_id: imageId,
          object_label: objectLabel(inst.obj_id),
          segmentation: rleEncode(mask),
          ignore,
        });
      });
      if (dims) {
        images.push({ scene_id: sceneId, image_id: imageId, height: dims[0], width: dims[1] });
      }
    }
  }

  writeAnnotations(images, annotations, job.out);
  const manifest: ExtractionManifest = {
    tool: "convert-gt",
    preprocessing: defaultPreprocessing(),
    images: images.map((i) => `${i.scene_id}/${i.image_id}`),
    visibility_threshold: threshold,
    timing: {},
  };
  writeManifest(manifest, job.out);
  return {
    nScenes: sceneDirs.length,
    nImages: images.length,
    nAnnotations: annotations.length,
    nIgnored: ignored,
  };
}
