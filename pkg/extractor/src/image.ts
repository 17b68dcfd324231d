/**
 * PNG-backed RGBA images and the bilinear resampling used everywhere.
 */

import * as fs from "fs";
import { PNG } from "pngjs";

export interface Image {
  width: number;
  height: number;
  data: Uint8Array; // RGBA, row-major
}

export function loadImage(file: string): Image {
  let png: PNG;
  try {
    png = PNG.sync.read(fs.readFileSync(file));
  } catch (err) {
    throw new Error(`cannot read image ${file}: ${(err as Error).message}`);
  }
  return { width: png.width, height: png.height, data: new Uint8Array(png.data) };
}

export function saveImage(image: Image, file: string): void {
  const png = new PNG({ width: image.width, height: image.height });
  Buffer.from(image.data).copy(png.data);
  fs.writeFileSync(file, PNG.sync.write(png));
}

export function blankImage(width: number, height: number): Image {
  const data = new Uint8Array(width * height * 4);
  for (let i = 3; i < data.length; i += 4) data[i] = 255;
  return { width, height, data };
}

export function cloneImage(image: Image): Image {
  return { width: image.width, height: image.height, data: new Uint8Array(image.data) };
}

function samplePlane(
  image: Image,
  channel: number,
  x: number,
  y: number
): number {
  // bilinear with clamp-to-edge; (x, y) in source pixel coordinates
  const x0 = Math.floor(x);
  const y0 = Math.floor(y);
  const fx = x - x0;
  const fy = y - y0;
  const clampX = (v: number) => Math.min(Math.max(v, 0), image.width - 1);
  const clampY = (v: number) => Math.min(Math.max(v, 0), image.height - 1);
  const at = (cx: number, cy: number) =>
    image.data[(clampY(cy) * image.width + clampX(cx)) * 4 + channel];
  const top = at(x0, y0) * (1 - fx) + at(x0 + 1, y0) * fx;
  const bottom = at(x0, y0 + 1) * (1 - fx) + at(x0 + 1, y0 + 1) * fx;
  return top * (1 - fy) + bottom * fy;
}

/** Bilinear resize to an exact target size. */
export function resize(image: Image, width: number, height: number): Image {
  const out = blankImage(width, height);
  const sx = image.width / width;
  const sy = image.height / height;
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const srcX = (x + 0.5) * sx - 0.5;
      const srcY = (y + 0.5) * sy - 0.5;
      const base = (y * width + x) * 4;
      for (let ch = 0; ch < 3; ch++) {
        out.data[base + ch] = Math.round(samplePlane(image, ch, srcX, srcY));
      }
      out.data[base + 3] = 255;
    }
  }
  return out;
}

/** Resize so the width matches, preserving aspect ratio. */
export function resizeToWidth(image: Image, width: number): Image {
  if (image.width === width) return image;
  const height = Math.max(1, Math.round((image.height * width) / image.width));
  return resize(image, width, height);
}
