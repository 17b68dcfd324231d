export { Rle, Mask, Box, rleEncode, rleDecode, maskArea, maskBBox } from "./rle";
export {
  ReferenceTensor,
  ProposalMatrix,
  AnnotationRecord,
  ImageRecord,
  DetectionRecord,
  writeDescriptors,
  readDescriptors,
  writeMasks,
  readMasks,
  writeAnnotations,
  readDetections,
} from "./formats";
export { Image, loadImage, saveImage, blankImage, cloneImage, resize, resizeToWidth } from "./image";
export {
  EmbeddingBackend,
  SegmentationBackend,
  HashEmbedding,
  ComponentSegmentation,
} from "./backends";
export {
  CropGeometry,
  cropGeometry,
  removeBackground,
  squareCrop,
  RESIZE_WIDTH,
  TARGET_SIZE,
  BACKGROUND_FILL,
  RESAMPLE,
} from "./preprocess";
export { ExtractionManifest, Preprocessing, defaultPreprocessing, writeManifest, manifestPath } from "./manifest";
export { TemplateJob, extractTemplateDescriptors, autoBox } from "./templates";
export { ProposalJob, ProposalResult, extractProposals } from "./proposals";
export { ConvertJob, ConvertResult, convertBopGt, objectLabel, DEFAULT_VISIBILITY_THRESHOLD } from "./bopconvert";
export { OverlayJob, OverlayResult, renderOverlays, labelColor, imageFileName } from "./overlay";
export { main } from "./cli";
