/** Training loss: per-layer L2 plus the three recombination residuals.
 *
 * All terms live in the same RGB-difference range and default to equal
 * weights:
 *   r1 = C - O * (I*rho + S)
 *   r2 = C / max(O', eps) - (I*rho + S)
 *   r3 = C / max(O', eps) - S' - I*rho
 * where O' and S' are the predictions by default, or the ground truth when
 * referenceResiduals is set.
 */

import * as tf from "@tensorflow/tfjs";
import { splitLayers } from "./network.js";

export const RESIDUAL_EPS = 1e-4;

export interface LossWeights {
  /** [L2(O), L2(I), L2(rho), L2(S), r1, r2, r3] */
  weights: number[];
  referenceResiduals: boolean;
}

export const DEFAULT_LOSS: LossWeights = {
  weights: [1, 1, 1, 1, 1, 1, 1],
  referenceResiduals: false,
};

export function recombinationLoss(
  pred: tf.Tensor,
  input: tf.Tensor,
  gt: tf.Tensor,
  channels: 10 | 40 = 10,
  opts: LossWeights = DEFAULT_LOSS,
): tf.Scalar {
  const w = opts.weights;
  if (w.length !== 7) throw new Error(`expected 7 loss weights, got ${w.length}`);
  return tf.tidy(() => {
    const p = splitLayers(pred, channels);
    const g = splitLayers(gt, channels);

    const mse = (a: tf.Tensor, b: tf.Tensor) => a.sub(b).square().mean() as tf.Scalar;
    let total = tf.scalar(0);
    total = total.add(mse(p.occlusion, g.occlusion).mul(w[0]));
    total = total.add(mse(p.irradiance, g.irradiance).mul(w[1]));
    total = total.add(mse(p.albedo, g.albedo).mul(w[2]));
    total = total.add(mse(p.specular, g.specular).mul(w[3]));

    const diffuse = p.irradiance.mul(p.albedo);
    const body = diffuse.add(p.specular);
    const r1 = input.sub(p.occlusion.mul(body));
    const occRef = opts.referenceResiduals ? g.occlusion : p.occlusion;
    const specRef = opts.referenceResiduals ? g.specular : p.specular;
    const overO = input.div(occRef.maximum(RESIDUAL_EPS));
    const r2 = overO.sub(body);
    const r3 = overO.sub(specRef).sub(diffuse);
    total = total.add(r1.square().mean().mul(w[4]));
    total = total.add(r2.square().mean().mul(w[5]));
    total = total.add(r3.square().mean().mul(w[6]));
    return total as tf.Scalar;
  });
}

/** r1 summaries of a prediction: the mean-squared scalar (the same
 * aggregation the loss and the evaluation report use) plus the mean
 * absolute value, both in RGB-difference units. */
export function r1Stats(
  pred: tf.Tensor,
  input: tf.Tensor,
  channels: 10 | 40 = 10,
): { meanSquare: number; meanAbs: number } {
  return tf.tidy(() => {
    const p = splitLayers(pred, channels);
    const recomposed = p.occlusion.mul(p.irradiance.mul(p.albedo).add(p.specular));
    const r1 = input.sub(recomposed);
    return {
      meanSquare: r1.square().mean().dataSync()[0],
      meanAbs: r1.abs().mean().dataSync()[0],
    };
  });
}
