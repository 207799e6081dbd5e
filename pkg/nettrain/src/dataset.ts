/** Loading datasets produced by the primary toolkit's gen-data command.
 *
 * Records arrive as a manifest plus per-record files: an LDR composite
 * (gamma 2.0 PNG) and linear PFM layers with the exposure scale in the
 * metadata sidecar.  For training, the composite is decoded to linear and
 * irradiance/specular are multiplied by the stored scale so the
 * composition identity C = O * (I*rho + S) holds in the decoded LDR
 * units; layer values are then clamped to [0, 1] to match the network's
 * sigmoid range.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { readPfm } from "./pfm.js";
import { readPngLinear } from "./image.js";

export interface ManifestRecord {
  stem: string;
  fields: Record<string, string>;
}

export interface TrainingRecord {
  /** Square side in pixels. */
  res: number;
  /** Linear composite, (res*res*3). */
  input: Float32Array;
  /** Packed target layers [O, I*3, rho*3, S*3], (res*res*10). */
  target: Float32Array;
}

export function readManifest(path: string): ManifestRecord[] {
  const records: ManifestRecord[] = [];
  for (const raw of readFileSync(path, "utf-8").split("\n")) {
    const line = raw.trim();
    if (!line || line.startsWith("#")) continue;
    const parts = line.split(/\s+/);
    const fields: Record<string, string> = {};
    for (const part of parts.slice(1)) {
      const eq = part.indexOf("=");
      if (eq > 0) fields[part.slice(0, eq)] = part.slice(eq + 1);
    }
    records.push({ stem: parts[0], fields });
  }
  return records;
}

function readMeta(stem: string): Record<string, string> {
  const meta: Record<string, string> = {};
  for (const raw of readFileSync(`${stem}.meta.txt`, "utf-8").split("\n")) {
    const line = raw.trim();
    if (!line || line.startsWith("#")) continue;
    const eq = line.indexOf("=");
    if (eq > 0) meta[line.slice(0, eq)] = line.slice(eq + 1);
  }
  return meta;
}

const clamp01 = (v: number) => Math.min(Math.max(v, 0), 1);

export interface LoadOptions {
  /** Exactly-consistent mode: instead of clamping the scaled HDR layers to
   * the sigmoid range (which leaves C != O*(I*rho + S) at bright pixels and
   * puts a floor under the recombination residual), rescale the whole
   * record by one factor so irradiance and specular fit [0, 1] unclamped,
   * and recompose the input from the layers.  Used by the overfit tests;
   * the default keeps the stored composite as the input. */
  consistent?: boolean;
}

export function loadRecord(stem: string, opts: LoadOptions = {}): TrainingRecord {
  const composite = readPngLinear(`${stem}.composed.png`);
  const occ = readPfm(`${stem}.occ.pfm`);
  const irr = readPfm(`${stem}.irr.pfm`);
  const alb = readPfm(`${stem}.alb.pfm`);
  const spec = readPfm(`${stem}.spec.pfm`);
  const res = composite.width;
  if (composite.height !== res || occ.width !== res || occ.height !== res) {
    throw new Error(`${stem}: records must be square and consistent`);
  }
  let scale = Number(readMeta(stem).scale ?? "1");
  const input = composite.data;
  if (opts.consistent) {
    let peak = 1;
    for (let i = 0; i < irr.data.length; i++) {
      peak = Math.max(peak, irr.data[i] * scale, spec.data[i] * scale);
    }
    scale /= peak;
  }
  const target = new Float32Array(res * res * 10);
  for (let px = 0; px < res * res; px++) {
    const o = clamp01(occ.data[px]);
    target[px * 10] = o;
    for (let ch = 0; ch < 3; ch++) {
      const i = clamp01(irr.data[px * 3 + ch] * scale);
      const r = clamp01(alb.data[px * 3 + ch]);
      const s = clamp01(spec.data[px * 3 + ch] * scale);
      target[px * 10 + 1 + ch] = i;
      target[px * 10 + 4 + ch] = r;
      target[px * 10 + 7 + ch] = s;
      if (opts.consistent) input[px * 3 + ch] = o * (i * r + s);
    }
  }
  return { res, input, target };
}

export function loadDataset(
  manifestPath: string,
  limit?: number,
  opts: LoadOptions = {},
): TrainingRecord[] {
  const base = dirname(manifestPath);
  const entries = readManifest(manifestPath);
  const take = limit === undefined ? entries : entries.slice(0, limit);
  return take.map((rec) => loadRecord(join(base, rec.stem), opts));
}
