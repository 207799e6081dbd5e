/** Training loop: Adam on the combined per-layer + recombination loss.
 *
 * Deterministic given the seed up to backend float nondeterminism: weight
 * initializers and the batch shuffler are seeded; the wasm backend itself
 * is deterministic for a fixed build.
 */

import { appendFileSync, mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import * as tf from "@tensorflow/tfjs";
import { initBackend } from "./backend.js";
import { networkConfig, NetworkConfig, TrainConfig } from "./config.js";
import { loadDataset, TrainingRecord } from "./dataset.js";
import { recombinationLoss, r1Stats } from "./loss.js";
import { buildNetwork } from "./network.js";
import { saveCheckpoint } from "./checkpoint.js";

/** Deterministic uniform ints (PCG-ish LCG, good enough for shuffling). */
export class SeededPicker {
  private state: number;

  constructor(seed: number) {
    this.state = (seed >>> 0) || 1;
  }

  next(bound: number): number {
    this.state = (Math.imul(this.state, 1664525) + 1013904223) >>> 0;
    return this.state % bound;
  }
}

export interface TrainResult {
  initialLoss: number;
  finalLoss: number;
  /** Mean-squared r1 over (up to 8) training records after training. */
  r1MeanSquare: number;
  /** Mean |r1| over the same records. */
  r1MeanAbs: number;
  steps: number;
  backend: string;
}

function makeBatch(records: TrainingRecord[], picks: number[]): { x: tf.Tensor4D; y: tf.Tensor4D } {
  const res = records[0].res;
  const n = picks.length;
  const x = new Float32Array(n * res * res * 3);
  const y = new Float32Array(n * res * res * 10);
  picks.forEach((pick, i) => {
    x.set(records[pick].input, i * res * res * 3);
    y.set(records[pick].target, i * res * res * 10);
  });
  return {
    x: tf.tensor4d(x, [n, res, res, 3]),
    y: tf.tensor4d(y, [n, res, res, 10]),
  };
}

export async function train(
  tc: TrainConfig,
  netOverrides: Partial<NetworkConfig> = {},
): Promise<TrainResult> {
  const backend = await initBackend();
  const records = loadDataset(tc.manifest, undefined, { consistent: tc.consistentData });
  if (records.length === 0) throw new Error(`no records in ${tc.manifest}`);
  const res = records[0].res;
  const cfg = networkConfig({ inputRes: res, seed: tc.seed, ...netOverrides });
  const model = buildNetwork(cfg);
  const optimizer = tf.train.adam(tc.learningRate);
  const picker = new SeededPicker(tc.seed * 7919 + 17);
  const lossOpts = { weights: tc.lossWeights, referenceResiduals: tc.referenceResiduals };

  mkdirSync(tc.checkpointDir, { recursive: true });
  const logPath = join(tc.checkpointDir, "loss.log");
  writeFileSync(logPath, "");

  let initialLoss = NaN;
  let finalLoss = NaN;
  for (let step = 0; step < tc.steps; step++) {
    const fraction = tc.steps > 1 ? step / (tc.steps - 1) : 0;
    (optimizer as unknown as { learningRate: number }).learningRate =
      tc.learningRate * (1 - (1 - tc.lrDecayTo) * fraction);
    const picks = Array.from({ length: tc.batchSize }, () => picker.next(records.length));
    const { x, y } = makeBatch(records, picks);
    const lossTensor = optimizer.minimize(
      () => recombinationLoss(model.apply(x) as tf.Tensor, x, y, cfg.outputChannels, lossOpts),
      true,
    ) as tf.Scalar;
    const loss = lossTensor.dataSync()[0];
    lossTensor.dispose();
    x.dispose();
    y.dispose();
    if (step === 0) initialLoss = loss;
    finalLoss = loss;
    if (step % tc.logEvery === 0 || step === tc.steps - 1) {
      appendFileSync(logPath, `${step} ${loss}\n`);
    }
  }

  await saveCheckpoint(model, tc.checkpointDir);

  const { x, y } = makeBatch(records, records.map((_, i) => i).slice(0, Math.min(8, records.length)));
  const pred = model.apply(x) as tf.Tensor;
  const r1 = r1Stats(pred, x, cfg.outputChannels);
  const evalLoss = recombinationLoss(pred, x, y, cfg.outputChannels, lossOpts).dataSync()[0];
  pred.dispose();
  x.dispose();
  y.dispose();
  optimizer.dispose();
  appendFileSync(
    logPath,
    `# final eval_loss=${evalLoss} r1_mean_square=${r1.meanSquare} r1_mean_abs=${r1.meanAbs}\n`,
  );
  return {
    initialLoss,
    finalLoss,
    r1MeanSquare: r1.meanSquare,
    r1MeanAbs: r1.meanAbs,
    steps: tc.steps,
    backend,
  };
}
