/**
 * Command-line entry points: extract-templates, extract-proposals,
 * convert-gt, overlay.
 *
 * Exit codes match the matching engine's convention: 0 success, 2
 * configuration error, 3 data error (unreadable or malformed inputs).
 */

import * as fs from "fs";
import yargs from "yargs";
import { ComponentSegmentation, HashEmbedding } from "./backends";
import { convertBopGt } from "./bopconvert";
import { renderOverlays } from "./overlay";
import { extractProposals } from "./proposals";
import { extractTemplateDescriptors } from "./templates";

function requireDir(dir: string, what: string): string {
  if (!fs.existsSync(dir) || !fs.statSync(dir).isDirectory()) {
    throw new ConfigError(`${what} not found: ${dir}`);
  }
  return dir;
}

function requireFile(file: string, what: string): string {
  if (!fs.existsSync(file) || !fs.statSync(file).isFile()) {
    throw new ConfigError(`${what} not found: ${file}`);
  }
  return file;
}

class ConfigError extends Error {}

function cmdExtractTemplates(argv: Record<string, unknown>): void {
  const manifest = extractTemplateDescriptors({
    templatesDir: requireDir(String(argv.templates), "templates directory"),
    out: String(argv.out),
    embedding: new HashEmbedding(Number(argv.dim)),
    boxesFile: argv.boxes ? requireFile(String(argv.boxes), "boxes file") : undefined,
  });
  console.log(
    `${manifest.images.length} template crops embedded ` +
      `(${manifest.embedding_backend}) -> ${argv.out}`
  );
}

function cmdExtractProposals(argv: Record<string, unknown>): void {
  const result = extractProposals({
    image: requireFile(String(argv.image), "input image"),
    outDescriptors: String(argv.outDescriptors),
    outMasks: String(argv.outMasks),
    embedding: new HashEmbedding(Number(argv.dim)),
    segmentation: new ComponentSegmentation(Number(argv.minArea)),
  });
  console.log(
    `${result.nProposals} proposals -> ${argv.outDescriptors} + ${argv.outMasks}`
  );
}

function cmdConvertGt(argv: Record<string, unknown>): void {
  const result = convertBopGt({
    splitDir: requireDir(String(argv.split), "split directory"),
    out: String(argv.out),
    visibilityThreshold: Number(argv.visibThreshold),
  });
  console.log(
    `${result.nAnnotations} annotations (${result.nIgnored} ignored) across ` +
      `${result.nImages} images in ${result.nScenes} scenes -> ${argv.out}`
  );
}

function cmdOverlay(argv: Record<string, unknown>): void {
  const result = renderOverlays({
    detectionsFile: requireFile(String(argv.detections), "detections file"),
    imagesDir: requireDir(String(argv.images), "images directory"),
    outDir: String(argv.outDir),
    threshold: Number(argv.threshold),
  });
  console.log(`${result.nDrawn} detections drawn over ${result.nImages} images -> ${argv.outDir}`);
}

export function main(commandName: string, args: string[]): number {
  const parser = yargs(args)
    .scriptName(commandName)
    .exitProcess(false)
    .strict()
    .fail((msg, err) => {
      throw err ?? new ConfigError(msg ?? "bad arguments");
    });

  switch (commandName) {
    case "extract-templates":
      parser
        .option("templates", { type: "string", demandOption: true, describe: "directory with one subdirectory of view images per object" })
        .option("out", { type: "string", demandOption: true, describe: "output descriptor file" })
        .option("dim", { type: "number", default: 1024 })
        .option("boxes", { type: "string", describe: "JSON of per-view crop boxes; tight auto boxes otherwise" });
      break;
    case "extract-proposals":
      parser
        .option("image", { type: "string", demandOption: true })
        .option("out-descriptors", { type: "string", demandOption: true })
        .option("out-masks", { type: "string", demandOption: true })
        .option("dim", { type: "number", default: 1024 })
        .option("min-area", { type: "number", default: 4, describe: "smallest proposal area in pixels" });
      break;
    case "convert-gt":
      parser
        .option("split", { type: "string", demandOption: true, describe: "dataset split directory of scenes" })
        .option("out", { type: "string", demandOption: true })
        .option("visib-threshold", { type: "number", default: 0.1, describe: "visibility fraction below which instances are flagged ignore" });
      break;
    case "overlay":
      parser
        .option("detections", { type: "string", demandOption: true })
        .option("images", { type: "string", demandOption: true, describe: "directory of <scene:06>_<image:06>.png files" })
        .option("out-dir", { type: "string", demandOption: true })
        .option("threshold", { type: "number", default: 0.5 });
      break;
    default:
      process.stderr.write(`error: unknown command ${commandName}\n`);
      return 2;
  }

  try {
    const argv = parser.parseSync();
    if (argv.help || argv.version) return 0; // yargs already printed it
    switch (commandName) {
      case "extract-templates":
        cmdExtractTemplates(argv);
        break;
      case "extract-proposals":
        cmdExtractProposals(argv);
        break;
      case "convert-gt":
        cmdConvertGt(argv);
        break;
      case "overlay":
        cmdOverlay(argv);
        break;
    }
    return 0;
  } catch (err) {
    const message = (err as Error).message ?? String(err);
    process.stderr.write(`error: ${message}\n`);
    return err instanceof ConfigError ? 2 : 3;
  }
}
