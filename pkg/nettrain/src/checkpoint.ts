/** Filesystem checkpointing for LayersModels (the browser-oriented tfjs
 * build ships no file:// IO handler, so this provides one): model.json
 * holds the topology and weight specs, weights.bin the raw data. */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import * as tf from "@tensorflow/tfjs";

export async function saveCheckpoint(model: tf.LayersModel, dir: string): Promise<void> {
  mkdirSync(dir, { recursive: true });
  await model.save(
    tf.io.withSaveHandler(async (artifacts) => {
      const weightData = artifacts.weightData as ArrayBuffer;
      writeFileSync(
        join(dir, "model.json"),
        JSON.stringify({
          modelTopology: artifacts.modelTopology,
          weightSpecs: artifacts.weightSpecs,
        }),
      );
      writeFileSync(join(dir, "weights.bin"), Buffer.from(weightData));
      return { modelArtifactsInfo: { dateSaved: new Date(), modelTopologyType: "JSON" } };
    }),
  );
}

export async function loadCheckpoint(dir: string): Promise<tf.LayersModel> {
  const meta = JSON.parse(readFileSync(join(dir, "model.json"), "utf-8"));
  const weights = readFileSync(join(dir, "weights.bin"));
  const weightData = weights.buffer.slice(
    weights.byteOffset,
    weights.byteOffset + weights.byteLength,
  );
  return tf.loadLayersModel(
    tf.io.fromMemory({
      modelTopology: meta.modelTopology,
      weightSpecs: meta.weightSpecs,
      weightData,
    }),
  );
}
