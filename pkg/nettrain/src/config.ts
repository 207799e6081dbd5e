/** Network and training configuration. */

export interface NetworkConfig {
  /** Square input resolution; 64 is the toy scale, 256 the full one. */
  inputRes: number;
  /** Stride-2 stages; inputRes / 2^downBlocks must be >= 2. */
  downBlocks: number;
  /** Encoder channel widths, one per down block. */
  channelsPerStage: number[];
  /** 10 = occlusion 1 + irradiance 3 + albedo 3 + specular 3;
   *  40 = occlusion 1 + albedo 3 + 6 diffuse directions * 3 + 6 specular * 3. */
  outputChannels: 10 | 40;
  /** Bottleneck width = outputChannels * this; 4 for the plain layer model,
   * 6 for the directional one (one slot per direction). */
  bottleneckMultiplier: number;
  seed: number;
}

export function networkConfig(overrides: Partial<NetworkConfig> = {}): NetworkConfig {
  const outputChannels = overrides.outputChannels ?? 10;
  const inputRes = overrides.inputRes ?? 64;
  const downBlocks = overrides.downBlocks ?? Math.round(Math.log2(inputRes / 2));
  const cfg: NetworkConfig = {
    inputRes,
    downBlocks,
    channelsPerStage:
      overrides.channelsPerStage ??
      Array.from({ length: downBlocks }, (_, i) => Math.min(8 << Math.floor(i / 2), 32)),
    outputChannels,
    bottleneckMultiplier: overrides.bottleneckMultiplier ?? (outputChannels === 40 ? 6 : 4),
    seed: overrides.seed ?? 0,
  };
  if (cfg.inputRes >> cfg.downBlocks < 2) {
    throw new Error(
      `inputRes ${cfg.inputRes} with ${cfg.downBlocks} down blocks bottoms out below 2x2`,
    );
  }
  if (cfg.channelsPerStage.length !== cfg.downBlocks) {
    throw new Error(
      `channelsPerStage has ${cfg.channelsPerStage.length} entries for ${cfg.downBlocks} blocks`,
    );
  }
  return cfg;
}

export interface TrainConfig {
  manifest: string;
  checkpointDir: string;
  steps: number;
  batchSize: number;
  learningRate: number;
  /** [L2(O), L2(I), L2(rho), L2(S), r1, r2, r3]; equal by default. */
  lossWeights: number[];
  /** Use ground-truth occlusion/specular in r2/r3 instead of predictions. */
  referenceResiduals: boolean;
  /** Rescale records so the composition identity is exact (see dataset.ts). */
  consistentData: boolean;
  /** Linearly decay the learning rate to this fraction of its start value. */
  lrDecayTo: number;
  seed: number;
  logEvery: number;
}

export function trainConfig(overrides: Partial<TrainConfig> & { manifest: string; checkpointDir: string }): TrainConfig {
  return {
    steps: 500,
    batchSize: 4,
    learningRate: 2e-3,
    lossWeights: [1, 1, 1, 1, 1, 1, 1],
    referenceResiduals: false,
    consistentData: false,
    lrDecayTo: 0.1,
    seed: 0,
    logEvery: 10,
    ...overrides,
  };
}
