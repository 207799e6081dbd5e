/** PNG loading and the gamma/padding conventions shared with the primary
 * toolkit: LDR composites are gamma 2.0; all training math runs in linear
 * units; padding for non-square inputs uses white (linear 1.0). */

import { readFileSync, writeFileSync } from "node:fs";
import { PNG } from "pngjs";

export const GAMMA = 2.0;

export interface LinearImage {
  width: number;
  height: number;
  /** Row-major RGB, linear units, length = width*height*3. */
  data: Float32Array;
}

export function readPngLinear(path: string): LinearImage {
  const png = PNG.sync.read(readFileSync(path));
  const data = new Float32Array(png.width * png.height * 3);
  for (let px = 0; px < png.width * png.height; px++) {
    for (let ch = 0; ch < 3; ch++) {
      const encoded = png.data[px * 4 + ch] / 255;
      data[px * 3 + ch] = Math.pow(encoded, GAMMA);
    }
  }
  return { width: png.width, height: png.height, data };
}

export function writePngGamma(img: LinearImage, path: string): void {
  const png = new PNG({ width: img.width, height: img.height });
  for (let px = 0; px < img.width * img.height; px++) {
    for (let ch = 0; ch < 3; ch++) {
      const clamped = Math.min(Math.max(img.data[px * 3 + ch], 0), 1);
      png.data[px * 4 + ch] = Math.round(Math.pow(clamped, 1 / GAMMA) * 255);
    }
  }
  png.data.fill(255, 3, undefined);
  for (let px = 0; px < img.width * img.height; px++) png.data[px * 4 + 3] = 255;
  writeFileSync(path, PNG.sync.write(png));
}

/** Pad to a square with white (linear 1.0), image centered. */
export function padSquareWhite(img: LinearImage): LinearImage {
  const side = Math.max(img.width, img.height);
  if (img.width === img.height) return img;
  const data = new Float32Array(side * side * 3).fill(1.0);
  const offX = Math.floor((side - img.width) / 2);
  const offY = Math.floor((side - img.height) / 2);
  for (let y = 0; y < img.height; y++) {
    for (let x = 0; x < img.width; x++) {
      const src = (y * img.width + x) * 3;
      const dst = ((y + offY) * side + (x + offX)) * 3;
      data[dst] = img.data[src];
      data[dst + 1] = img.data[src + 1];
      data[dst + 2] = img.data[src + 2];
    }
  }
  return { width: side, height: side, data };
}
