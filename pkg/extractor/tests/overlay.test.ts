import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { afterEach, beforeEach, describe, expect, it } from "vitest";
import { blankImage, loadImage, saveImage } from "../src/image";
import { imageFileName, labelColor, renderOverlays } from "../src/overlay";
import { rleEncode } from "../src/rle";
import { paintRect } from "./helpers";
import type { Mask } from "../src/rle";

let dir: string;

beforeEach(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), "ovl-"));
});

afterEach(() => {
  fs.rmSync(dir, { recursive: true, force: true });
});

function rectMask(width: number, height: number, rect: [number, number, number, number]): Mask {
  const data = new Uint8Array(width * height);
  for (let y = rect[1]; y < rect[1] + rect[3]; y++) {
    for (let x = rect[0]; x < rect[0] + rect[2]; x++) data[y * width + x] = 1;
  }
  return { height, width, data };
}

function detection(score: number, rect: [number, number, number, number], size: [number, number] = [40, 60]) {
  return {
    scene_id: 1,
    image_id: 2,
    category_id: 5,
    object_label: "obj_000005",
    score,
    bbox: rect,
    segmentation: rleEncode(rectMask(size[1], size[0], rect)),
    time: -1.0,
  };
}

function setup(detections: object[]): { imagesDir: string; outDir: string; detectionsFile: string } {
  const imagesDir = path.join(dir, "scenes");
  const outDir = path.join(dir, "overlays");
  fs.mkdirSync(imagesDir, { recursive: true });
  const image = blankImage(60, 40);
  paintRect(image, 0, 0, 60, 40, [100, 100, 100]);
  saveImage(image, path.join(imagesDir, imageFileName(1, 2)));
  const detectionsFile = path.join(dir, "detections.json");
  fs.writeFileSync(detectionsFile, JSON.stringify(detections));
  return { imagesDir, outDir, detectionsFile };
}

describe("renderOverlays", () => {
  it("blends confident detections over the image", () => {
    const { imagesDir, outDir, detectionsFile } = setup([detection(0.9, [10, 5, 8, 6])]);
    const result = renderOverlays({ detectionsFile, imagesDir, outDir });
    expect(result).toEqual({ nImages: 1, nDrawn: 1 });

    const out = loadImage(path.join(outDir, imageFileName(1, 2)));
    const [cr] = labelColor("obj_000005");
    const inside = (7 * 60 + 12) * 4;
    expect(out.data[inside]).toBe(Math.round(0.5 * 100 + 0.5 * cr));
    const outside = (30 * 60 + 50) * 4;
    expect(out.data[outside]).toBe(100);
  });

  it("copies the image untouched when every detection is below threshold", () => {
    const { imagesDir, outDir, detectionsFile } = setup([detection(0.2, [10, 5, 8, 6])]);
    const result = renderOverlays({ detectionsFile, imagesDir, outDir, threshold: 0.5 });
    expect(result).toEqual({ nImages: 1, nDrawn: 0 });
    const original = loadImage(path.join(imagesDir, imageFileName(1, 2)));
    const copy = loadImage(path.join(outDir, imageFileName(1, 2)));
    expect(Buffer.from(copy.data).equals(Buffer.from(original.data))).toBe(true);
  });

  it("rejects masks that do not match the image size", () => {
    const { imagesDir, outDir, detectionsFile } = setup([detection(0.9, [1, 1, 2, 2], [10, 10])]);
    expect(() => renderOverlays({ detectionsFile, imagesDir, outDir })).toThrow(
      /mask 10x10 does not match image 60x40/
    );
  });

  it("draws the strongest detection last", () => {
    const weak = detection(0.6, [10, 5, 8, 6]);
    const strong = { ...detection(0.9, [10, 5, 8, 6]), object_label: "obj_000001", category_id: 1 };
    const { imagesDir, outDir, detectionsFile } = setup([strong, weak]);
    renderOverlays({ detectionsFile, imagesDir, outDir });
    const out = loadImage(path.join(outDir, imageFileName(1, 2)));
    const inside = (7 * 60 + 12) * 4;
    const weakFirst = Math.round(0.5 * 100 + 0.5 * labelColor("obj_000005")[0]);
    const strongLast = Math.round(0.5 * weakFirst + 0.5 * labelColor("obj_000001")[0]);
    expect(out.data[inside]).toBe(strongLast);
  });
});

describe("labelColor and file names", () => {
  it("maps labels to stable palette colors", () => {
    const color = labelColor("obj_000005");
    expect(labelColor("obj_000005")).toEqual(color);
    expect(color).toHaveLength(3);
    for (const c of color) {
      expect(Number.isInteger(c)).toBe(true);
      expect(c).toBeGreaterThanOrEqual(0);
      expect(c).toBeLessThanOrEqual(255);
    }
  });

  it("pads scene and image ids in file names", () => {
    expect(imageFileName(1, 2)).toBe("000001_000002.png");
    expect(imageFileName(123, 4567)).toBe("000123_004567.png");
  });
});
