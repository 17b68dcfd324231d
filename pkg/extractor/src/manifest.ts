/**
 * Extraction manifests: enough metadata to reproduce every emitted file.
 */

import * as fs from "fs";
import { BACKGROUND_FILL, RESAMPLE, RESIZE_WIDTH, TARGET_SIZE } from "./preprocess";

export interface Preprocessing {
  resize_width: number;
  target: number;
  background_fill: string;
  resample: string;
}

export interface ExtractionManifest {
  tool: string;
  embedding_backend?: string;
  segmentation_backend?: string;
  preprocessing: Preprocessing;
  images: string[];
  visibility_threshold?: number;
  box_source?: string;
  timing: Record<string, number>;
}

export function defaultPreprocessing(): Preprocessing {
  return {
    resize_width: RESIZE_WIDTH,
    target: TARGET_SIZE,
    background_fill: BACKGROUND_FILL,
    resample: RESAMPLE,
  };
}

export function manifestPath(outputFile: string): string {
  return outputFile + ".manifest.json";
}

export function writeManifest(manifest: ExtractionManifest, outputFile: string): string {
  const file = manifestPath(outputFile);
  fs.writeFileSync(file, JSON.stringify(manifest, null, 2) + "\n");
  return file;
}
