import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import * as tf from "@tensorflow/tfjs";
import { beforeAll, describe, expect, it } from "vitest";
import { initBackend } from "../src/backend.js";
import { loadCheckpoint, saveCheckpoint } from "../src/checkpoint.js";
import { networkConfig } from "../src/config.js";
import { buildNetwork, splitLayers } from "../src/network.js";
import { recombinationLoss } from "../src/loss.js";

beforeAll(async () => {
  await initBackend();
});

describe("networkConfig", () => {
  it("derives down blocks from the resolution", () => {
    expect(networkConfig({ inputRes: 64 }).downBlocks).toBe(5);
    expect(networkConfig({ inputRes: 256 }).downBlocks).toBe(7);
  });

  it("extra block keeps the bottleneck at 2x2 when resolution doubles", () => {
    const base = networkConfig({ inputRes: 64 });
    const doubled = networkConfig({ inputRes: 128 });
    expect(doubled.downBlocks).toBe(base.downBlocks + 1);
    expect(128 >> doubled.downBlocks).toBe(2);
  });

  it("rejects bottoming out below 2x2", () => {
    expect(() => networkConfig({ inputRes: 16, downBlocks: 4 })).toThrow(/2x2/);
  });

  it("directional variant defaults to sextuple bottleneck expansion", () => {
    expect(networkConfig({ outputChannels: 40 }).bottleneckMultiplier).toBe(6);
    expect(networkConfig({ outputChannels: 10 }).bottleneckMultiplier).toBe(4);
  });
});

describe("buildNetwork", () => {
  it("maps input resolution to the same output resolution with 10 channels in (0,1)", () => {
    const model = buildNetwork(networkConfig({ inputRes: 32, seed: 3 }));
    const x = tf.randomUniform([2, 32, 32, 3], 0, 1, "float32", 1);
    const y = model.apply(x) as tf.Tensor;
    expect(y.shape).toEqual([2, 32, 32, 10]);
    const data = y.dataSync();
    for (const v of data) {
      expect(v).toBeGreaterThan(0);
      expect(v).toBeLessThan(1);
    }
  });

  it("directional config yields 40 channels", () => {
    const model = buildNetwork(networkConfig({ inputRes: 32, outputChannels: 40, seed: 3 }));
    const y = model.apply(tf.zeros([1, 32, 32, 3])) as tf.Tensor;
    expect(y.shape).toEqual([1, 32, 32, 40]);
  });

  it("is deterministic per seed", () => {
    const x = tf.randomUniform([1, 16, 16, 3], 0, 1, "float32", 2);
    const cfg = { inputRes: 16, downBlocks: 3, channelsPerStage: [4, 6, 8] };
    const a = buildNetwork(networkConfig({ ...cfg, seed: 9 })).apply(x) as tf.Tensor;
    const b = buildNetwork(networkConfig({ ...cfg, seed: 9 })).apply(x) as tf.Tensor;
    const c = buildNetwork(networkConfig({ ...cfg, seed: 10 })).apply(x) as tf.Tensor;
    expect(Array.from(a.dataSync())).toEqual(Array.from(b.dataSync()));
    expect(Array.from(a.dataSync())).not.toEqual(Array.from(c.dataSync()));
  });

  it("splitLayers partitions the channels", () => {
    const packed = tf.range(0, 40).reshape([1, 1, 1, 40]);
    const parts = splitLayers(packed, 40);
    expect(parts.occlusion.dataSync()[0]).toBe(0);
    expect(Array.from(parts.albedo.dataSync())).toEqual([1, 2, 3]);
    // directional sums: D channels are 4..21, S channels 22..39
    expect(parts.irradiance.dataSync()[0]).toBe(4 + 7 + 10 + 13 + 16 + 19);
    expect(parts.specular.dataSync()[0]).toBe(22 + 25 + 28 + 31 + 34 + 37);
  });
});

describe("checkpoint", () => {
  it("round-trips the model and reproduces the loss at save time", async () => {
    const cfg = networkConfig({ inputRes: 16, downBlocks: 3, channelsPerStage: [4, 6, 8], seed: 5 });
    const model = buildNetwork(cfg);
    const x = tf.randomUniform([2, 16, 16, 3], 0, 1, "float32", 7);
    const gt = tf.randomUniform([2, 16, 16, 10], 0, 1, "float32", 8) as tf.Tensor4D;
    const before = recombinationLoss(model.apply(x) as tf.Tensor, x, gt, 10).dataSync()[0];

    const dir = mkdtempSync(join(tmpdir(), "ckpt-"));
    await saveCheckpoint(model, dir);
    const loaded = await loadCheckpoint(dir);
    const after = recombinationLoss(loaded.apply(x) as tf.Tensor, x, gt, 10).dataSync()[0];
    expect(Math.abs(after - before)).toBeLessThan(1e-5);
  });
});
