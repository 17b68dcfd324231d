/**
 * Pixel processing between segmentation and embedding: background removal,
 * square crop geometry, and the resample to the embedding input size.
 *
 * The crop geometry mirrors the matching engine exactly: content is scaled
 * by target / max(w, h), content dimensions round half away from zero, pads
 * take the floor of the remaining margin.
 */

import { Image, blankImage, cloneImage } from "./image";
import { Box, Mask } from "./rle";

export const RESIZE_WIDTH = 640;
export const TARGET_SIZE = 224;
export const BACKGROUND_FILL = "black";
export const RESAMPLE = "bilinear";

export interface CropGeometry {
  sourceBox: Box; // square window around the content, may overhang the image
  scale: number;
  padLeft: number;
  padTop: number;
  contentW: number;
  contentH: number;
  target: number;
}

export function cropGeometry(box: Box, target = TARGET_SIZE): CropGeometry {
  const side = Math.max(box.w, box.h);
  const scale = target / side;
  const contentW = Math.floor(box.w * scale + 0.5);
  const contentH = Math.floor(box.h * scale + 0.5);
  return {
    sourceBox: {
      x: box.x - Math.floor((side - box.w) / 2),
      y: box.y - Math.floor((side - box.h) / 2),
      w: side,
      h: side,
    },
    scale,
    padLeft: Math.floor((target - contentW) / 2),
    padTop: Math.floor((target - contentH) / 2),
    contentW,
    contentH,
    target,
  };
}

/** Zero every pixel outside the mask, keeping alpha opaque. */
export function removeBackground(image: Image, mask: Mask): Image {
  if (mask.width !== image.width || mask.height !== image.height) {
    throw new Error(
      `mask ${mask.width}x${mask.height} does not cover image ${image.width}x${image.height}`
    );
  }
  const out = cloneImage(image);
  for (let p = 0; p < mask.data.length; p++) {
    if (!mask.data[p]) {
      out.data[p * 4] = 0;
      out.data[p * 4 + 1] = 0;
      out.data[p * 4 + 2] = 0;
    }
  }
  return out;
}

function sampleBox(image: Image, channel: number, x: number, y: number): number {
  // bilinear over the image, black outside its bounds
  const x0 = Math.floor(x);
  const y0 = Math.floor(y);
  const fx = x - x0;
  const fy = y - y0;
  const at = (cx: number, cy: number) => {
    if (cx < 0 || cy < 0 || cx >= image.width || cy >= image.height) return 0;
    return image.data[(cy * image.width + cx) * 4 + channel];
  };
  const top = at(x0, y0) * (1 - fx) + at(x0 + 1, y0) * fx;
  const bottom = at(x0, y0 + 1) * (1 - fx) + at(x0 + 1, y0 + 1) * fx;
  return top * (1 - fy) + bottom * fy;
}

/**
 * Scale the box content into a centered target square on black.
 *
 * The pixels come from `image` (already background-removed for proposals);
 * regions of the source box outside the image stay black, matching the
 * padding convention.
 */
export function squareCrop(image: Image, box: Box, target = TARGET_SIZE): Image {
  const geom = cropGeometry(box, target);
  const out = blankImage(target, target);
  for (let i = 0; i < out.data.length; i += 4) {
    out.data[i] = 0;
    out.data[i + 1] = 0;
    out.data[i + 2] = 0;
  }
  for (let dy = 0; dy < geom.contentH; dy++) {
    for (let dx = 0; dx < geom.contentW; dx++) {
      const srcX = box.x + ((dx + 0.5) * box.w) / geom.contentW - 0.5;
      const srcY = box.y + ((dy + 0.5) * box.h) / geom.contentH - 0.5;
      const base = ((geom.padTop + dy) * target + geom.padLeft + dx) * 4;
      for (let ch = 0; ch < 3; ch++) {
        out.data[base + ch] = Math.round(sampleBox(image, ch, srcX, srcY));
      }
    }
  }
  return out;
}
