/**
 * Pluggable embedding and segmentation backends, with deterministic
 * stand-ins that need no model weights.
 *
 * The hash embedding derives every descriptor from the crop bytes alone, so
 * identical preprocessing always yields an identical descriptor file. The
 * component segmenter proposes connected regions that differ from the
 * background color. Both exist so pipelines can be built and tested end to
 * end before a real model is wired in behind the same interfaces.
 */

import { Image } from "./image";
import { Mask } from "./rle";

export interface EmbeddingBackend {
  readonly name: string;
  readonly dim: number;
  embed(crop: Image): Float32Array;
}

export interface SegmentationBackend {
  readonly name: string;
  segment(image: Image): Mask[];
}

function fnv1a64(bytes: Uint8Array, seed: string): bigint {
  const prime = 0x100000001b3n;
  const mask = 0xffffffffffffffffn;
  let hash = 0xcbf29ce484222325n;
  for (let i = 0; i < seed.length; i++) {
    hash = ((hash ^ BigInt(seed.charCodeAt(i))) * prime) & mask;
  }
  for (const b of bytes) {
    hash = ((hash ^ BigInt(b)) * prime) & mask;
  }
  return hash;
}

function splitmix64(state: bigint): [bigint, bigint] {
  const mask = 0xffffffffffffffffn;
  state = (state + 0x9e3779b97f4a7c15n) & mask;
  let z = state;
  z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & mask;
  z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & mask;
  z = z ^ (z >> 31n);
  return [z, state];
}

export class HashEmbedding implements EmbeddingBackend {
  readonly name: string;
  readonly dim: number;

  constructor(dim = 1024) {
    this.dim = dim;
    this.name = `hash-embedding-d${dim}`;
  }

  embed(crop: Image): Float32Array {
    // hash the RGB bytes (alpha carries no signal)
    const rgb = new Uint8Array(crop.width * crop.height * 3);
    for (let i = 0, j = 0; i < crop.data.length; i += 4, j += 3) {
      rgb[j] = crop.data[i];
      rgb[j + 1] = crop.data[i + 1];
      rgb[j + 2] = crop.data[i + 2];
    }
    let state = fnv1a64(rgb, this.name);
    const values = new Float64Array(this.dim);
    let normSq = 0;
    for (let i = 0; i < this.dim; i++) {
      let draw: bigint;
      [draw, state] = splitmix64(state);
      const u = Number(draw >> 11n) / 2 ** 53; // [0, 1)
      values[i] = 2 * u - 1;
      normSq += values[i] * values[i];
    }
    const norm = Math.sqrt(normSq) || 1;
    const out = new Float32Array(this.dim);
    for (let i = 0; i < this.dim; i++) out[i] = values[i] / norm;
    return out;
  }
}

/** Background color taken from the most common of the four corner pixels. */
export function backgroundColor(image: Image): [number, number, number] {
  const corners = [
    0,
    (image.width - 1) * 4,
    (image.height - 1) * image.width * 4,
    (image.height * image.width - 1) * 4,
  ];
  const votes = new Map<string, number>();
  for (const base of corners) {
    const key = `${image.data[base]},${image.data[base + 1]},${image.data[base + 2]}`;
    votes.set(key, (votes.get(key) ?? 0) + 1);
  }
  let best = "";
  let bestCount = -1;
  for (const [key, count] of votes) {
    if (count > bestCount) {
      best = key;
      bestCount = count;
    }
  }
  const [r, g, b] = best.split(",").map(Number);
  return [r, g, b];
}

export class ComponentSegmentation implements SegmentationBackend {
  readonly name: string;
  readonly minArea: number;

  constructor(minArea = 4) {
    this.minArea = minArea;
    this.name = `component-segmentation-a${minArea}`;
  }

  segment(image: Image): Mask[] {
    const [br, bg, bb] = backgroundColor(image);
    const { width, height, data } = image;
    const foreground = new Uint8Array(width * height);
    for (let p = 0; p < width * height; p++) {
      const base = p * 4;
      if (data[base] !== br || data[base + 1] !== bg || data[base + 2] !== bb) {
        foreground[p] = 1;
      }
    }

    const seen = new Uint8Array(width * height);
    const masks: Mask[] = [];
    const queue = new Int32Array(width * height);
    for (let start = 0; start < width * height; start++) {
      if (!foreground[start] || seen[start]) continue;
      const mask = new Uint8Array(width * height);
      let head = 0;
      let tail = 0;
      queue[tail++] = start;
      seen[start] = 1;
      let area = 0;
      while (head < tail) {
        const p = queue[head++];
        mask[p] = 1;
        area++;
        const r = Math.floor(p / width);
        const c = p % width;
        const neighbors = [
          r > 0 ? p - width : -1,
          r < height - 1 ? p + width : -1,
          c > 0 ? p - 1 : -1,
          c < width - 1 ? p + 1 : -1,
        ];
        for (const q of neighbors) {
          if (q >= 0 && foreground[q] && !seen[q]) {
            seen[q] = 1;
            queue[tail++] = q;
          }
        }
      }
      if (area >= this.minArea) {
        masks.push({ height, width, data: mask });
      }
    }
    return masks;
  }
}
