import * as fs from "fs";
import * as path from "path";
import { blankImage, saveImage } from "../src/image";
import type { Image } from "../src/image";

export function paintRect(
  image: Image,
  x0: number,
  y0: number,
  w: number,
  h: number,
  rgb: [number, number, number]
): void {
  for (let y = y0; y < y0 + h; y++) {
    for (let x = x0; x < x0 + w; x++) {
      const p = (y * image.width + x) * 4;
      image.data[p] = rgb[0];
      image.data[p + 1] = rgb[1];
      image.data[p + 2] = rgb[2];
    }
  }
}

/** Write a PNG with a single colored rectangle on black. */
export function writeRectPng(
  file: string,
  width: number,
  height: number,
  rect: [number, number, number, number],
  rgb: [number, number, number]
): void {
  const image = blankImage(width, height);
  paintRect(image, rect[0], rect[1], rect[2], rect[3], rgb);
  fs.mkdirSync(path.dirname(file), { recursive: true });
  saveImage(image, file);
}

/**
 * Build `<dir>/<label>/view_<v>.png` template trees: each object gets
 * `views` images of a colored rectangle whose position shifts per view.
 */
export function writeTemplateTree(dir: string, labels: string[], views: number): void {
  labels.forEach((label, o) => {
    for (let v = 0; v < views; v++) {
      writeRectPng(
        path.join(dir, label, `view_${String(v).padStart(2, "0")}.png`),
        64,
        48,
        [4 + 3 * v, 6 + 2 * o, 12 + o, 8 + v],
        [(60 + 70 * o) % 256, (200 - 40 * v) % 256, (30 + 50 * o + 20 * v) % 256]
      );
    }
  });
}
