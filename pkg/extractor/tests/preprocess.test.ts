import { describe, expect, it } from "vitest";
import { blankImage } from "../src/image";
import { resizeToWidth } from "../src/image";
import { cropGeometry, removeBackground, squareCrop, RESIZE_WIDTH, TARGET_SIZE } from "../src/preprocess";
import type { Box } from "../src/rle";
import type { Mask } from "../src/rle";

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

describe("cropGeometry", () => {
  it("pads a tall box left and right", () => {
    const geo = cropGeometry({ x: 40, y: 10, w: 100, h: 200 }, 224);
    expect(geo.scale).toBeCloseTo(1.12, 12);
    expect(geo.contentH).toBe(224);
    expect(geo.contentW).toBe(112);
    expect(geo.padLeft).toBe(56);
    expect(geo.padTop).toBe(0);
    expect(geo.sourceBox.x).toBe(40 - 50);
    expect(geo.sourceBox.y).toBe(10);
    expect(geo.sourceBox.w).toBe(200);
    expect(geo.sourceBox.h).toBe(200);
  });

  it("maps an already-square target box to the identity", () => {
    const geo = cropGeometry({ x: 0, y: 0, w: 224, h: 224 }, 224);
    expect(geo.scale).toBe(1);
    expect(geo.padLeft).toBe(0);
    expect(geo.padTop).toBe(0);
    expect(geo.contentW).toBe(224);
    expect(geo.contentH).toBe(224);
  });

  it("upscales small boxes", () => {
    const geo = cropGeometry({ x: 5, y: 5, w: 10, h: 10 }, 224);
    expect(geo.scale).toBeCloseTo(22.4, 12);
    expect(geo.contentW).toBe(224);
    expect(geo.contentH).toBe(224);
  });

  it("keeps the long side exact and the padding balanced", () => {
    const rand = mulberry32(99);
    for (let i = 0; i < 200; i++) {
      const box: Box = {
        x: Math.floor(rand() * 50),
        y: Math.floor(rand() * 50),
        w: 1 + Math.floor(rand() * 300),
        h: 1 + Math.floor(rand() * 300),
      };
      const geo = cropGeometry(box, 224);
      expect(Math.max(geo.contentW, geo.contentH)).toBe(224);
      expect(Math.abs(2 * geo.padLeft + geo.contentW - 224)).toBeLessThanOrEqual(1);
      expect(Math.abs(2 * geo.padTop + geo.contentH - 224)).toBeLessThanOrEqual(1);
      expect(geo.sourceBox.w).toBe(geo.sourceBox.h);
    }
  });
});

describe("removeBackground", () => {
  it("zeroes pixels outside the mask and keeps the rest", () => {
    const image = blankImage(4, 2);
    image.data.fill(150);
    const mask: Mask = { height: 2, width: 4, data: Uint8Array.from([1, 0, 0, 0, 0, 0, 0, 1]) };
    const out = removeBackground(image, mask);
    expect(Array.from(out.data.subarray(0, 4))).toEqual([150, 150, 150, 150]);
    expect(Array.from(out.data.subarray(4, 8))).toEqual([0, 0, 0, 150]);
    const last = (2 * 4 - 1) * 4;
    expect(Array.from(out.data.subarray(last, last + 4))).toEqual([150, 150, 150, 150]);
  });

  it("rejects mismatched mask dimensions", () => {
    const mask: Mask = { height: 3, width: 3, data: new Uint8Array(9) };
    expect(() => removeBackground(blankImage(4, 2), mask)).toThrow(/mask/);
  });
});

describe("squareCrop", () => {
  it("fills the content region with the source color and pads with black", () => {
    const image = blankImage(50, 50);
    for (let i = 0; i < image.data.length; i += 4) {
      image.data[i] = 200;
      image.data[i + 1] = 100;
      image.data[i + 2] = 50;
    }
    const crop = squareCrop(image, { x: 10, y: 10, w: 10, h: 20 }, 40);
    expect(crop.width).toBe(40);
    expect(crop.height).toBe(40);
    const geo = cropGeometry({ x: 10, y: 10, w: 10, h: 20 }, 40);
    const centre = (20 * 40 + geo.padLeft + Math.floor(geo.contentW / 2)) * 4;
    expect(Array.from(crop.data.subarray(centre, centre + 3))).toEqual([200, 100, 50]);
    const pad = (20 * 40 + 0) * 4;
    expect(Array.from(crop.data.subarray(pad, pad + 3))).toEqual([0, 0, 0]);
  });

  it("treats regions that overhang the image as padding", () => {
    const image = blankImage(10, 10);
    image.data.fill(255);
    const crop = squareCrop(image, { x: 0, y: 0, w: 4, h: 10 }, 20);
    const left = (10 * 20 + 0) * 4;
    expect(Array.from(crop.data.subarray(left, left + 3))).toEqual([0, 0, 0]);
  });
});

describe("resizeToWidth", () => {
  it("scales height proportionally", () => {
    const image = blankImage(320, 200);
    const out = resizeToWidth(image, RESIZE_WIDTH);
    expect(out.width).toBe(640);
    expect(out.height).toBe(400);
  });

  it("passes matching widths through untouched", () => {
    const image = blankImage(640, 480);
    expect(resizeToWidth(image, 640)).toBe(image);
  });

  it("exports the documented constants", () => {
    expect(RESIZE_WIDTH).toBe(640);
    expect(TARGET_SIZE).toBe(224);
  });
});
