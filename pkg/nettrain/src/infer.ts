/** Decompose one image with a trained checkpoint, writing layer files in
 * the primary toolkit's conventions so its compose/upsample/eval commands
 * run on them directly. */

import * as tf from "@tensorflow/tfjs";
import { initBackend } from "./backend.js";
import { loadCheckpoint } from "./checkpoint.js";
import { padSquareWhite, readPngLinear } from "./image.js";
import { writePfm } from "./pfm.js";
import { splitLayers } from "./network.js";

export interface InferResult {
  res: number;
  files: string[];
}

export async function infer(imagePath: string, checkpointDir: string, outStem: string): Promise<InferResult> {
  await initBackend();
  const model = await loadCheckpoint(checkpointDir);
  const inputRes = model.inputs[0].shape[1] as number;
  const channels = (model.outputs[0].shape[3] as number) as 10 | 40;

  const padded = padSquareWhite(readPngLinear(imagePath));
  const pixels = tf.tensor4d(padded.data, [1, padded.height, padded.width, 3]);
  const resized =
    padded.width === inputRes
      ? pixels
      : tf.image.resizeBilinear(pixels as tf.Tensor4D, [inputRes, inputRes]);

  const packed = model.apply(resized) as tf.Tensor;
  const layers = splitLayers(packed, channels);
  const occ = layers.occlusion.dataSync() as Float32Array;
  const irr = layers.irradiance.dataSync() as Float32Array;
  const alb = layers.albedo.dataSync() as Float32Array;
  const spec = layers.specular.dataSync() as Float32Array;

  const files = [
    `${outStem}.occ.pfm`,
    `${outStem}.irr.pfm`,
    `${outStem}.alb.pfm`,
    `${outStem}.spec.pfm`,
  ];
  writePfm({ width: inputRes, height: inputRes, channels: 1, data: occ }, files[0]);
  writePfm({ width: inputRes, height: inputRes, channels: 3, data: irr }, files[1]);
  writePfm({ width: inputRes, height: inputRes, channels: 3, data: alb }, files[2]);
  writePfm({ width: inputRes, height: inputRes, channels: 3, data: spec }, files[3]);

  tf.dispose([pixels, resized, packed, layers.occlusion, layers.irradiance, layers.albedo, layers.specular]);
  return { res: inputRes, files };
}
