/** Fully-convolutional hourglass decomposer.
 *
 * Encoder: stride-2 convolutions down to 2x2 (first layer 5x5, rest 3x3).
 * Bottleneck: two stride-1 convolutions widening the features to
 * outputChannels * bottleneckMultiplier.
 * Decoder: per stage, nearest-neighbor upsample + stride-1 convolution
 * (resize-conv), crosslink concatenation with the matching encoder stage
 * (the input image at full resolution), and another stride-1 convolution.
 * Every convolution is followed by ReLU except the final one, which uses a
 * sigmoid so all outputs land in (0, 1).  The last two convolutions are
 * 5x5, matching the first layer.
 *
 * Convolutions run through a custom gradient: the wasm backend ships no
 * Conv2DBackpropFilter kernel, so stock convolutions cannot train there.
 * The forward pass is a plain conv2d on an explicitly padded input; the
 * input gradient is conv2dTranspose (registered on wasm) and the filter
 * gradient is expressed as a dilated conv2d with batch and channel axes
 * swapped, so every heavy op stays on the fast fused-conv path.
 */

import * as tf from "@tensorflow/tfjs";
import { NetworkConfig } from "./config.js";

interface PatchConvConfig {
  filters: number;
  kernelSize: number;
  strides: 1 | 2;
  activation: "relu" | "sigmoid" | "linear";
  seed: number;
  name?: string;
}

export class PatchConv2D extends tf.layers.Layer {
  static className = "PatchConv2D";

  private readonly filters: number;
  private readonly kernelSize: number;
  private readonly stridesSpatial: 1 | 2;
  private readonly activation: "relu" | "sigmoid" | "linear";
  private readonly seed: number;
  private kernel!: ReturnType<tf.layers.Layer["addWeight"]>;
  private bias!: ReturnType<tf.layers.Layer["addWeight"]>;

  constructor(config: PatchConvConfig) {
    super({ name: config.name });
    this.filters = config.filters;
    this.kernelSize = config.kernelSize;
    this.stridesSpatial = config.strides;
    this.activation = config.activation;
    this.seed = config.seed;
  }

  override build(inputShape: tf.Shape | tf.Shape[]): void {
    const shape = (Array.isArray(inputShape[0]) ? inputShape[0] : inputShape) as number[];
    const inChannels = shape[3];
    const k = this.kernelSize;
    this.kernel = this.addWeight(
      "kernel",
      [k, k, inChannels, this.filters],
      "float32",
      tf.initializers.heNormal({ seed: this.seed }),
    );
    this.bias = this.addWeight("bias", [this.filters], "float32", tf.initializers.zeros());
    this.built = true;
  }

  override computeOutputShape(inputShape: tf.Shape | tf.Shape[]): tf.Shape {
    const shape = (Array.isArray(inputShape[0]) ? inputShape[0] : inputShape) as number[];
    const s = this.stridesSpatial;
    return [shape[0], Math.ceil(shape[1] / s), Math.ceil(shape[2] / s), this.filters];
  }

  override call(inputs: tf.Tensor | tf.Tensor[]): tf.Tensor {
    return tf.tidy(() => {
      const x = (Array.isArray(inputs) ? inputs[0] : inputs) as tf.Tensor4D;
      const [, h, w] = x.shape.slice(0, 3);
      const k = this.kernelSize;
      const s = this.stridesSpatial;
      const p = Math.floor(k / 2);
      const oh = Math.ceil(h / s);
      const ow = Math.ceil(w / s);
      // Explicit padding: p before, whatever the output grid still needs
      // after (asymmetric for stride 2), then a valid-mode convolution.
      const prH = s * (oh - 1) + k - h - p;
      const prW = s * (ow - 1) + k - w - p;

      const convOp = tf.customGrad(
        // tf.customGrad types the inputs as generic tensors.
        (...args: unknown[]) => {
          const [xp, kernel, save] = args as [tf.Tensor4D, tf.Tensor4D, tf.GradSaveFunc];
          save([xp, kernel]);
          const value = tf.conv2d(xp, kernel, s, "valid");
          const gradFunc = (dy: tf.Tensor4D, saved: tf.Tensor[]) => {
            const [xpS, kS] = saved as [tf.Tensor4D, tf.Tensor4D];
            // dX as a forward convolution of the (zero-stuffed, padded)
            // upstream gradient with the rotated, channel-swapped kernel;
            // the forward conv kernel is several times faster on wasm than
            // Conv2DBackpropInput.
            let dyFull = dy;
            if (s === 2) {
              const [db, dh, dw_] = dy.shape.slice(0, 3);
              dyFull = dy
                .reshape([db, dh, 1, dw_, 1, this.filters])
                .pad([[0, 0], [0, 0], [0, 1], [0, 0], [0, 1], [0, 0]])
                .reshape([db, dh * 2, dw_ * 2, this.filters])
                .slice([0, 0, 0, 0], [db, xpS.shape[1] - k + 1, xpS.shape[2] - k + 1, this.filters]) as tf.Tensor4D;
            }
            const flipped = tf.transpose(
              tf.reverse(kS, [0, 1]), [0, 1, 3, 2],
            ) as tf.Tensor4D;
            const dxp = tf.conv2d(
              tf.pad(dyFull, [[0, 0], [k - 1, k - 1], [k - 1, k - 1], [0, 0]]) as tf.Tensor4D,
              flipped, 1, "valid",
            );
            // dW as a stride-1 convolution with dilation s: batch plays the
            // reduced channel, the upstream gradient plays the filter.
            const xT = tf.transpose(xpS, [3, 1, 2, 0]) as tf.Tensor4D;
            const dyT = tf.transpose(dy, [1, 2, 0, 3]) as tf.Tensor4D;
            const dwT = tf.conv2d(xT, dyT, 1, "valid", "NHWC", [s, s]);
            return [dxp, tf.transpose(dwT, [1, 2, 0, 3])];
          };
          return { value, gradFunc };
        },
      );

      const xp = tf.pad(x, [[0, 0], [p, prH], [p, prW], [0, 0]]);
      let out = convOp(xp, this.kernel.read()).add(this.bias.read());
      if (this.activation === "relu") out = tf.relu(out);
      else if (this.activation === "sigmoid") out = tf.sigmoid(out);
      return out;
    });
  }

  override getConfig(): tf.serialization.ConfigDict {
    return {
      ...super.getConfig(),
      filters: this.filters,
      kernelSize: this.kernelSize,
      strides: this.stridesSpatial,
      activation: this.activation,
      seed: this.seed,
    };
  }

  static override fromConfig<T extends tf.serialization.Serializable>(
    cls: tf.serialization.SerializableConstructor<T>,
    config: tf.serialization.ConfigDict,
  ): T {
    return new cls(config as unknown as PatchConvConfig);
  }
}

tf.serialization.registerClass(PatchConv2D);

function conv(
  x: tf.SymbolicTensor,
  filters: number,
  kernel: number,
  stride: 1 | 2,
  activation: "relu" | "sigmoid",
  seed: number,
  name: string,
): tf.SymbolicTensor {
  return new PatchConv2D({
    filters,
    kernelSize: kernel,
    strides: stride,
    activation,
    seed,
    name,
  }).apply(x) as tf.SymbolicTensor;
}

export function buildNetwork(cfg: NetworkConfig): tf.LayersModel {
  const input = tf.input({ shape: [cfg.inputRes, cfg.inputRes, 3], name: "image" });
  let seed = cfg.seed * 1000 + 1;

  const encoder: tf.SymbolicTensor[] = [];
  let x = input;
  for (let i = 0; i < cfg.downBlocks; i++) {
    const kernel = i === 0 ? 5 : 3;
    x = conv(x, cfg.channelsPerStage[i], kernel, 2, "relu", seed++, `enc${i}`);
    encoder.push(x);
  }

  const bottleneck = cfg.outputChannels * cfg.bottleneckMultiplier;
  x = conv(x, bottleneck, 3, 1, "relu", seed++, "bottleneck0");
  x = conv(x, bottleneck, 3, 1, "relu", seed++, "bottleneck1");

  for (let i = cfg.downBlocks - 1; i >= 0; i--) {
    const width = cfg.channelsPerStage[i];
    x = tf.layers.upSampling2d({ size: [2, 2], name: `up${i}` }).apply(x) as tf.SymbolicTensor;
    x = conv(x, width, 3, 1, "relu", seed++, `dec${i}_resize`);
    // Crosslink with the same-resolution encoder stage; the full-resolution
    // stage links back to the input image itself.
    const link = i > 0 ? encoder[i - 1] : input;
    x = tf.layers
      .concatenate({ name: `crosslink${i}` })
      .apply([x, link]) as tf.SymbolicTensor;
    const last = i === 0;
    x = conv(x, width, last ? 5 : 3, 1, "relu", seed++, `dec${i}_fuse`);
  }

  const output = conv(x, cfg.outputChannels, 5, 1, "sigmoid", seed++, "layers_out");
  return tf.model({ inputs: input, outputs: output, name: "hourglass_decomposer" });
}

/** Channel slices of the network output. */
export interface LayerSlices {
  occlusion: tf.Tensor; // (..., 1)
  irradiance: tf.Tensor; // (..., 3): total diffuse light (sum over directions)
  albedo: tf.Tensor; // (..., 3)
  specular: tf.Tensor; // (..., 3): total specular (sum over directions)
}

/** Split packed output channels into model layers.
 * 10 channels: [O, I*3, rho*3, S*3].
 * 40 channels: [O, rho*3, D0..5 * 3, S0..5 * 3]; directional groups are
 * summed so the composition terms are directly comparable. */
export function splitLayers(packed: tf.Tensor, channels: 10 | 40): LayerSlices {
  const rank = packed.shape.length;
  const slice = (begin: number, size: number) => {
    const begins = new Array(rank).fill(0);
    begins[rank - 1] = begin;
    const sizes = packed.shape.slice() as number[];
    sizes[rank - 1] = size;
    return packed.slice(begins, sizes);
  };
  if (channels === 10) {
    return {
      occlusion: slice(0, 1),
      irradiance: slice(1, 3),
      albedo: slice(4, 3),
      specular: slice(7, 3),
    };
  }
  const sumDirections = (begin: number) =>
    tf.tidy(() => {
      let total = slice(begin, 3);
      for (let d = 1; d < 6; d++) total = total.add(slice(begin + 3 * d, 3));
      return total;
    });
  return {
    occlusion: slice(0, 1),
    albedo: slice(1, 3),
    irradiance: sumDirections(4),
    specular: sumDirections(22),
  };
}
