/**
 * The interchange files shared with the matching engine: binary descriptor
 * tensors (magic CNOSDSC1), mask lists, annotations, and detections JSON.
 */

import * as fs from "fs";
import * as path from "path";
import { z } from "zod";
import { Rle } from "./rle";

const MAGIC = Buffer.from("CNOSDSC1", "ascii");
const VERSION = 1;

export interface ReferenceTensor {
  rank: 3;
  dims: [number, number, number]; // objects x views x dim
  data: Float32Array;
  objectLabels: string[];
}

export interface ProposalMatrix {
  rank: 2;
  dims: [number, number]; // proposals x dim
  data: Float32Array;
}

function labelsSidecar(file: string): string {
  return file + ".labels.json";
}

function writeHeader(rank: number, dims: number[]): Buffer {
  const header = Buffer.alloc(MAGIC.length + 4 + 4 + 4 * dims.length);
  MAGIC.copy(header, 0);
  header.writeUInt32LE(VERSION, MAGIC.length);
  header.writeUInt32LE(rank, MAGIC.length + 4);
  dims.forEach((d, i) => header.writeUInt32LE(d, MAGIC.length + 8 + 4 * i));
  return header;
}

export function writeDescriptors(tensor: ReferenceTensor | ProposalMatrix, file: string): void {
  const expected = tensor.dims.reduce((a, b) => a * b, 1);
  if (tensor.data.length !== expected) {
    throw new Error(`payload has ${tensor.data.length} floats, dims imply ${expected}`);
  }
  const payload = Buffer.alloc(4 * tensor.data.length);
  for (let i = 0; i < tensor.data.length; i++) {
    payload.writeFloatLE(tensor.data[i], 4 * i);
  }
  fs.writeFileSync(file, Buffer.concat([writeHeader(tensor.rank, tensor.dims), payload]));
  if (tensor.rank === 3) {
    if (tensor.objectLabels.length !== tensor.dims[0]) {
      throw new Error(`${tensor.objectLabels.length} labels for ${tensor.dims[0]} objects`);
    }
    fs.writeFileSync(
      labelsSidecar(file),
      JSON.stringify({ object_labels: tensor.objectLabels }, null, 2) + "\n"
    );
  }
}

export function readDescriptors(file: string): ReferenceTensor | ProposalMatrix {
  const buf = fs.readFileSync(file);
  if (buf.length < MAGIC.length + 8 || !buf.subarray(0, MAGIC.length).equals(MAGIC)) {
    throw new Error(`${file}: not a descriptor file`);
  }
  const version = buf.readUInt32LE(MAGIC.length);
  if (version !== VERSION) throw new Error(`${file}: unsupported version ${version}`);
  const rank = buf.readUInt32LE(MAGIC.length + 4);
  if (rank !== 2 && rank !== 3) throw new Error(`${file}: bad rank ${rank}`);
  const dims: number[] = [];
  for (let i = 0; i < rank; i++) dims.push(buf.readUInt32LE(MAGIC.length + 8 + 4 * i));
  const start = MAGIC.length + 8 + 4 * rank;
  const count = dims.reduce((a, b) => a * b, 1);
  if (buf.length !== start + 4 * count) {
    throw new Error(`${file}: truncated payload`);
  }
  const data = new Float32Array(count);
  for (let i = 0; i < count; i++) data[i] = buf.readFloatLE(start + 4 * i);
  if (rank === 2) {
    return { rank: 2, dims: [dims[0], dims[1]], data };
  }
  const sidecar = labelsSidecar(file);
  const labels = z
    .object({ object_labels: z.array(z.string()) })
    .parse(JSON.parse(fs.readFileSync(sidecar, "utf-8")));
  return {
    rank: 3,
    dims: [dims[0], dims[1], dims[2]],
    data,
    objectLabels: labels.object_labels,
  };
}

const rleSchema = z.object({
  size: z.tuple([z.number().int(), z.number().int()]),
  counts: z.array(z.number().int()),
});

export function writeMasks(masks: Rle[], file: string): void {
  fs.writeFileSync(file, JSON.stringify(masks, null, 2) + "\n");
}

export function readMasks(file: string): Rle[] {
  const doc = JSON.parse(fs.readFileSync(file, "utf-8"));
  return z.array(rleSchema).parse(doc).map((m) => ({ size: m.size, counts: m.counts }));
}

export interface AnnotationRecord {
  scene_id: number;
  image_id: number;
  object_label: string;
  segmentation: Rle;
  ignore: boolean;
}

export interface ImageRecord {
  scene_id: number;
  image_id: number;
  height: number;
  width: number;
}

export function writeAnnotations(
  images: ImageRecord[],
  annotations: AnnotationRecord[],
  file: string
): void {
  fs.writeFileSync(file, JSON.stringify({ images, annotations }, null, 2) + "\n");
}

const detectionSchema = z.object({
  scene_id: z.number().int(),
  image_id: z.number().int(),
  category_id: z.number().int(),
  object_label: z.string(),
  score: z.number(),
  bbox: z.tuple([z.number(), z.number(), z.number(), z.number()]),
  segmentation: rleSchema,
  time: z.number(),
});

export type DetectionRecord = z.infer<typeof detectionSchema>;

export function readDetections(file: string): DetectionRecord[] {
  const doc = JSON.parse(fs.readFileSync(file, "utf-8"));
  return z.array(detectionSchema).parse(doc);
}

export function ensureDir(dir: string): void {
  fs.mkdirSync(path.resolve(dir), { recursive: true });
}
