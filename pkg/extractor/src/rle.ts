/**
 * Column-major run-length codec for binary masks.
 *
 * A mask is a row-major Uint8Array of 0/1 with explicit height and width.
 * Counts alternate background/foreground starting with background, so the
 * first count is 0 when pixel (0, 0) is foreground.
 */

export interface Rle {
  size: [number, number]; // [height, width]
  counts: number[];
}

export interface Mask {
  height: number;
  width: number;
  data: Uint8Array; // row-major, 0 or 1
}

export function rleEncode(mask: Mask): Rle {
  const { height, width, data } = mask;
  if (data.length !== height * width) {
    throw new Error(`mask data length ${data.length} != ${height}x${width}`);
  }
  const counts: number[] = [];
  let current = 0; // runs start with background
  let run = 0;
  for (let c = 0; c < width; c++) {
    for (let r = 0; r < height; r++) {
      const v = data[r * width + c] ? 1 : 0;
      if (v === current) {
        run++;
      } else {
        counts.push(run);
        current = v;
        run = 1;
      }
    }
  }
  counts.push(run);
  return { size: [height, width], counts };
}

export function rleDecode(rle: Rle): Mask {
  const [height, width] = rle.size;
  const total = height * width;
  const data = new Uint8Array(total);
  let index = 0;
  let value = 0;
  for (let i = 0; i < rle.counts.length; i++) {
    const count = rle.counts[i];
    if (count < 0 || !Number.isInteger(count)) {
      throw new Error(`corrupt RLE: bad count ${count}`);
    }
    if (count === 0 && i > 0) {
      throw new Error("corrupt RLE: zero-length run after the first count");
    }
    for (let k = 0; k < count; k++) {
      if (index >= total) break;
      const c = Math.floor(index / height);
      const r = index % height;
      data[r * width + c] = value;
      index++;
    }
    index = Math.min(index, total);
    value = 1 - value;
  }
  let sum = 0;
  for (const c of rle.counts) sum += c;
  if (sum !== total) {
    throw new Error(`corrupt RLE: counts sum to ${sum}, mask size is ${height}x${width}=${total}`);
  }
  return { height, width, data };
}

export function maskArea(mask: Mask): number {
  let area = 0;
  for (const v of mask.data) area += v;
  return area;
}

export interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

/** Tightest box around the foreground, or null for an empty mask. */
export function maskBBox(mask: Mask): Box | null {
  let x0 = mask.width;
  let y0 = mask.height;
  let x1 = -1;
  let y1 = -1;
  for (let r = 0; r < mask.height; r++) {
    for (let c = 0; c < mask.width; c++) {
      if (mask.data[r * mask.width + c]) {
        if (c < x0) x0 = c;
        if (c > x1) x1 = c;
        if (r < y0) y0 = r;
        if (r > y1) y1 = r;
      }
    }
  }
  if (x1 < 0) return null;
  return { x: x0, y: y0, w: x1 - x0 + 1, h: y1 - y0 + 1 };
}
