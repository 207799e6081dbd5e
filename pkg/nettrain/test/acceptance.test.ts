/** Secondary acceptance criteria, one PASS/FAIL line each.
 *
 * Training data comes from the primary toolkit's CLI (its external
 * interface); these tests therefore need `python3 -m lightlayers.cli` on
 * the path and take several minutes (the overfit run alone is 2000 steps).
 */

import { execFileSync } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import * as tf from "@tensorflow/tfjs";
import { beforeAll, describe, expect, it } from "vitest";
import { initBackend } from "../src/backend.js";
import { trainConfig } from "../src/config.js";
import { networkConfig } from "../src/config.js";
import { loadRecord, readManifest } from "../src/dataset.js";
import { infer } from "../src/infer.js";
import { recombinationLoss } from "../src/loss.js";
import { buildNetwork } from "../src/network.js";
import { readPfm } from "../src/pfm.js";
import { train } from "../src/train.js";

function report(name: string, ok: boolean, detail: string) {
  console.log(`ACCEPTANCE ${ok ? "PASS" : "FAIL"}: ${name}  [${detail}]`);
  expect(ok, `${name}: ${detail}`).toBe(true);
}

function genData(dir: string, count: number, seed: number): string {
  execFileSync("python3", [
    "-m", "lightlayers.cli", "gen-data",
    "--out", dir, "--count", String(count), "--seed", String(seed),
    "--res", "64", "--no-directional", "--env-count", "3", "--occ-samples", "64",
  ]);
  return join(dir, "manifest.txt");
}

beforeAll(async () => {
  await initBackend();
});

describe("network shape and range", () => {
  it("outputs match input dims with 10 or 40 channels, all in (0,1)", () => {
    const plain = buildNetwork(networkConfig({ inputRes: 64, seed: 0 }));
    const directional = buildNetwork(
      networkConfig({ inputRes: 64, outputChannels: 40, seed: 0 }),
    );
    const x = tf.randomUniform([2, 64, 64, 3], 0, 1, "float32", 11);
    const yPlain = plain.apply(x) as tf.Tensor;
    const yDir = directional.apply(x) as tf.Tensor;
    const inRange = (t: tf.Tensor) => {
      const d = t.dataSync();
      let lo = 1, hi = 0;
      for (const v of d) {
        lo = Math.min(lo, v);
        hi = Math.max(hi, v);
      }
      return lo > 0 && hi < 1;
    };
    report(
      "network shape/range (10- and 40-channel variants)",
      yPlain.shape.join("x") === "2x64x64x10" &&
        yDir.shape.join("x") === "2x64x64x40" &&
        inRange(yPlain) &&
        inRange(yDir),
      `plain=${yPlain.shape.join("x")}, directional=${yDir.shape.join("x")}`,
    );
  });
});

describe("loss gradient check", () => {
  it("analytic gradient matches float64 central differences within 1e-4", () => {
    // Float64 scalar reference of the loss; finite differences at float64
    // precision, compared against the framework's analytic gradient.
    const { lossRef, pred, input, gt } = toyLossSetup(4);
    const weights = [1, 1, 1, 1, 1, 1, 1];
    const predT = tf.tensor4d(pred, [1, 4, 4, 10]);
    const inputT = tf.tensor4d(input, [1, 4, 4, 3]);
    const gtT = tf.tensor4d(gt, [1, 4, 4, 10]);
    const analytic = Array.from(
      tf.grad((p: tf.Tensor) =>
        recombinationLoss(p, inputT, gtT, 10, { weights, referenceResiduals: false }),
      )(predT).dataSync(),
    );
    const h = 1e-6;
    let num = 0;
    let den = 0;
    for (let i = 0; i < pred.length; i++) {
      const plus = pred.slice();
      const minus = pred.slice();
      plus[i] += h;
      minus[i] -= h;
      const fd = (lossRef(plus) - lossRef(minus)) / (2 * h);
      num += (fd - analytic[i]) ** 2;
      den += fd ** 2;
    }
    const rel = Math.sqrt(num / den);
    report("loss gradient vs central finite differences", rel < 1e-4, `rel=${rel.toExponential(2)}`);
  });
});

describe("training", () => {
  it("overfit: 4 images, 2000 steps drive the r1 scalar below 0.01", async () => {
    const dir = mkdtempSync(join(tmpdir(), "overfit-"));
    const manifest = genData(dir, 4, 30);
    const ckpt = join(dir, "ckpt");
    const result = await train(
      trainConfig({
        manifest,
        checkpointDir: ckpt,
        steps: 2000,
        batchSize: 4,
        learningRate: 5e-3,
        consistentData: true,
        seed: 1,
        logEvery: 250,
      }),
    );
    report(
      "overfit smoke test (4 images, 2000 steps, mean-squared r1 < 0.01)",
      result.r1MeanSquare < 0.01,
      `r1 mean square=${result.r1MeanSquare.toExponential(3)}, mean |r1|=${result.r1MeanAbs.toFixed(4)}`,
    );

    // The overfit checkpoint should decompose a training composite better
    // than a constant-grey albedo baseline, through the file interface.
    const records = readManifest(manifest);
    const stem = join(dir, records[0].stem);
    const outStem = join(dir, "decomp");
    await infer(`${stem}.composed.png`, ckpt, outStem);
    execFileSync("python3", [
      "-m", "lightlayers.cli", "compose",
      "--layers", outStem, "--out", join(dir, "recomposed.png"),
    ]);
    const gtAlb = readPfm(`${stem}.alb.pfm`);
    const predAlb = readPfm(`${outStem}.alb.pfm`);
    const gamma = (v: number) => Math.pow(Math.min(Math.max(v, 0), 1), 0.5);
    let predErr = 0;
    let greyErr = 0;
    let refNorm = 0;
    for (let i = 0; i < gtAlb.data.length; i++) {
      const ref = gamma(gtAlb.data[i]);
      predErr += (gamma(predAlb.data[i]) - ref) ** 2;
      greyErr += (gamma(0.5) - ref) ** 2;
      refNorm += ref ** 2;
    }
    const predNrmse = Math.sqrt(predErr / refNorm);
    const greyNrmse = Math.sqrt(greyErr / refNorm);
    report(
      "inference beats the constant-grey albedo baseline",
      predNrmse < greyNrmse,
      `albedo NRMSE ${predNrmse.toFixed(4)} vs grey ${greyNrmse.toFixed(4)}`,
    );
  });

  it("200-record toy training halves its initial loss", async () => {
    const dir = mkdtempSync(join(tmpdir(), "toy200-"));
    const manifest = genData(dir, 200, 77);
    const result = await train(
      trainConfig({
        manifest,
        checkpointDir: join(dir, "ckpt"),
        steps: 400,
        batchSize: 4,
        learningRate: 3e-3,
        consistentData: true,
        seed: 2,
        logEvery: 50,
      }),
    );
    report(
      "200-record toy training halves its initial loss",
      result.finalLoss < 0.5 * result.initialLoss,
      `loss ${result.initialLoss.toFixed(4)} -> ${result.finalLoss.toFixed(4)}`,
    );
  });
});

function mulberry(seed: number) {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function toyLossSetup(seed: number) {
  const rand = mulberry(seed);
  const pred = Array.from({ length: 160 }, () => 0.1 + 0.8 * rand());
  const gt = Array.from({ length: 160 }, () => 0.1 + 0.8 * rand());
  const input = Array.from({ length: 48 }, () => 0.1 + 0.8 * rand());
  const eps = 1e-4;
  const lossRef = (p: number[]): number => {
    let l2o = 0, l2i = 0, l2r = 0, l2s = 0, r1 = 0, r2 = 0, r3 = 0;
    for (let px = 0; px < 16; px++) {
      const po = p[px * 10];
      l2o += (po - gt[px * 10]) ** 2;
      for (let c = 0; c < 3; c++) {
        const pi = p[px * 10 + 1 + c], pr = p[px * 10 + 4 + c], ps = p[px * 10 + 7 + c];
        l2i += (pi - gt[px * 10 + 1 + c]) ** 2;
        l2r += (pr - gt[px * 10 + 4 + c]) ** 2;
        l2s += (ps - gt[px * 10 + 7 + c]) ** 2;
        const cc = input[px * 3 + c];
        const body = pi * pr + ps;
        const og = Math.max(po, eps);
        r1 += (cc - po * body) ** 2;
        r2 += (cc / og - body) ** 2;
        r3 += (cc / og - ps - pi * pr) ** 2;
      }
    }
    return l2o / 16 + (l2i + l2r + l2s + r1 + r2 + r3) / 48;
  };
  return { lossRef, pred, input, gt };
}
