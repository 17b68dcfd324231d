/**
 * Proposal extraction: segment a test image, remove each proposal's
 * background, crop to the embedding input square, and emit the rank-2
 * descriptor file plus the matching masks JSON.
 *
 * Images are resized to the standard 640-pixel width before segmentation,
 * so masks and descriptors live in that resolution.
 */

import { EmbeddingBackend, SegmentationBackend } from "./backends";
import { writeDescriptors, writeMasks } from "./formats";
import { loadImage, resizeToWidth } from "./image";
import { ExtractionManifest, defaultPreprocessing, writeManifest } from "./manifest";
import { removeBackground, squareCrop, RESIZE_WIDTH, TARGET_SIZE } from "./preprocess";
import { Rle, maskBBox, rleEncode } from "./rle";

export interface ProposalJob {
  image: string;
  outDescriptors: string;
  outMasks: string;
  embedding: EmbeddingBackend;
  segmentation: SegmentationBackend;
  warn?: (message: string) => void;
}

export interface ProposalResult {
  nProposals: number;
  manifest: ExtractionManifest;
}

export function extractProposals(job: ProposalJob): ProposalResult {
  const started = Date.now();
  const warn = job.warn ?? ((m) => process.stderr.write(m + "\n"));

  const source = loadImage(job.image);
  const image = resizeToWidth(source, RESIZE_WIDTH);
  const t0 = Date.now();
  const masks = job.segmentation.segment(image);
  const segmentS = Math.round(Date.now() - t0) / 1000;

  const dim = job.embedding.dim;
  const rows: Float32Array[] = [];
  const kept: Rle[] = [];
  masks.forEach((mask, i) => {
    const box = maskBBox(mask);
    if (!box) {
      warn(`proposal ${i}: empty mask, skipped`);
      return;
    }
    const cleared = removeBackground(image, mask);
    const crop = squareCrop(cleared, box, TARGET_SIZE);
    rows.push(job.embedding.embed(crop));
    kept.push(rleEncode(mask));
  });

  const data = new Float32Array(rows.length * dim);
  rows.forEach((row, i) => data.set(row, i * dim));
  writeDescriptors({ rank: 2, dims: [rows.length, dim], data }, job.outDescriptors);
  writeMasks(kept, job.outMasks);

  const manifest: ExtractionManifest = {
    tool: "extract-proposals",
    embedding_backend: job.embedding.name,
    segmentation_backend: job.segmentation.name,
    preprocessing: defaultPreprocessing(),
    images: [job.image],
    timing: {
      total_s: Math.round(Date.now() - started) / 1000,
      proposal_s: segmentS,
    },
  };
  writeManifest(manifest, job.outDescriptors);
  return { nProposals: rows.length, manifest };
}
