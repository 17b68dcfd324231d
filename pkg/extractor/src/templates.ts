/**
 * Template extraction: one descriptor per (object, view) from rendered
 * template images, written as a rank-3 descriptor file plus labels sidecar.
 *
 * Layout: `<templatesDir>/<object_label>/*.png`, one image per view, view
 * order = lexicographic file order. All objects must expose the same view
 * count. Crop boxes come from a boxes JSON (`{label: [[x,y,w,h], ...]}`);
 * without one, the tight box around non-background pixels is used.
 */

import * as fs from "fs";
import * as path from "path";
import { z } from "zod";
import { EmbeddingBackend } from "./backends";
import { writeDescriptors } from "./formats";
import { Image, loadImage } from "./image";
import { ExtractionManifest, defaultPreprocessing, writeManifest } from "./manifest";
import { squareCrop, TARGET_SIZE } from "./preprocess";
import { Box } from "./rle";

const boxesSchema = z.record(
  z.string(),
  z.array(z.tuple([z.number(), z.number(), z.number(), z.number()]))
);

export interface TemplateJob {
  templatesDir: string;
  out: string;
  embedding: EmbeddingBackend;
  boxesFile?: string;
}

function listViews(dir: string): string[] {
  return fs
    .readdirSync(dir)
    .filter((f) => f.toLowerCase().endsWith(".png"))
    .sort();
}

/** Tight box around pixels that differ from the (0, 0) corner color. */
export function autoBox(image: Image): Box {
  const [br, bg, bb] = [image.data[0], image.data[1], image.data[2]];
  let x0 = image.width;
  let y0 = image.height;
  let x1 = -1;
  let y1 = -1;
  for (let r = 0; r < image.height; r++) {
    for (let c = 0; c < image.width; c++) {
      const base = (r * image.width + c) * 4;
      if (image.data[base] !== br || image.data[base + 1] !== bg || image.data[base + 2] !== bb) {
        if (c < x0) x0 = c;
        if (c > x1) x1 = c;
        if (r < y0) y0 = r;
        if (r > y1) y1 = r;
      }
    }
  }
  if (x1 < 0) return { x: 0, y: 0, w: image.width, h: image.height };
  return { x: x0, y: y0, w: x1 - x0 + 1, h: y1 - y0 + 1 };
}

export function extractTemplateDescriptors(job: TemplateJob): ExtractionManifest {
  const started = Date.now();
  const labels = fs
    .readdirSync(job.templatesDir)
    .filter((d) => fs.statSync(path.join(job.templatesDir, d)).isDirectory())
    .sort();
  if (labels.length === 0) {
    throw new Error(`no object directories under ${job.templatesDir}`);
  }

  let boxes: Record<string, [number, number, number, number][]> | null = null;
  if (job.boxesFile) {
    boxes = boxesSchema.parse(JSON.parse(fs.readFileSync(job.boxesFile, "utf-8")));
  }

  const perObject = labels.map((label) => listViews(path.join(job.templatesDir, label)));
  const nViews = perObject[0].length;
  labels.forEach((label, i) => {
    if (perObject[i].length !== nViews) {
      throw new Error(
        `object ${label} has ${perObject[i].length} views, expected ${nViews} ` +
          `(view count must match across objects)`
      );
    }
    if (perObject[i].length === 0) {
      throw new Error(`object ${label} has no view images`);
    }
    if (boxes && (boxes[label] ?? []).length !== nViews) {
      throw new Error(`boxes file has ${(boxes[label] ?? []).length} boxes for ${label}, expected ${nViews}`);
    }
  });

  const dim = job.embedding.dim;
  const data = new Float32Array(labels.length * nViews * dim);
  const files: string[] = [];
  labels.forEach((label, o) => {
    perObject[o].forEach((name, v) => {
      const file = path.join(job.templatesDir, label, name);
      let image: Image;
      try {
        image = loadImage(file);
      } catch (err) {
        throw new Error(`object ${label} view ${v}: ${(err as Error).message}`);
      }
      const rawBox = boxes ? boxes[label][v] : null;
      const box: Box = rawBox
        ? { x: rawBox[0], y: rawBox[1], w: rawBox[2], h: rawBox[3] }
        : autoBox(image);
      const crop = squareCrop(image, box, TARGET_SIZE);
      data.set(job.embedding.embed(crop), (o * nViews + v) * dim);
      files.push(file);
    });
  });

  writeDescriptors(
    { rank: 3, dims: [labels.length, nViews, dim], data, objectLabels: labels },
    job.out
  );

  const manifest: ExtractionManifest = {
    tool: "extract-templates",
    embedding_backend: job.embedding.name,
    preprocessing: defaultPreprocessing(),
    images: files,
    box_source: boxes ? path.basename(job.boxesFile as string) : "auto",
    timing: { total_s: Math.round(Date.now() - started) / 1000 },
  };
  writeManifest(manifest, job.out);
  return manifest;
}
