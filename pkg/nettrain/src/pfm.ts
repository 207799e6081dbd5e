/** Portable float map I/O, matching the primary toolkit's files:
 * header "PF"/"Pf", "<w> <h>", scale "-1.0" (little endian), rows
 * bottom-up, float32 samples. */

import { readFileSync, writeFileSync } from "node:fs";

export interface PfmImage {
  width: number;
  height: number;
  channels: 1 | 3;
  /** Row-major, top-down, length = width*height*channels. */
  data: Float32Array;
}

export function readPfm(path: string): PfmImage {
  const buf = readFileSync(path);
  let offset = 0;
  const line = (): string => {
    const end = buf.indexOf(0x0a, offset);
    if (end < 0) throw new Error(`${path}: truncated PFM header`);
    const text = buf.subarray(offset, end).toString("ascii");
    offset = end + 1;
    return text;
  };
  const tag = line();
  if (tag !== "PF" && tag !== "Pf") throw new Error(`${path}: not a PFM file (tag ${tag})`);
  const channels = tag === "PF" ? 3 : 1;
  const dims = line().split(/\s+/).map(Number);
  if (dims.length !== 2 || !dims.every(Number.isInteger)) {
    throw new Error(`${path}: malformed PFM dimensions`);
  }
  const [width, height] = dims;
  const scale = Number(line());
  if (!Number.isFinite(scale) || scale === 0) throw new Error(`${path}: bad PFM scale`);
  const littleEndian = scale < 0;
  const count = width * height * channels;
  if (buf.length - offset < 4 * count) throw new Error(`${path}: truncated PFM payload`);
  const view = new DataView(buf.buffer, buf.byteOffset + offset, 4 * count);
  const data = new Float32Array(count);
  const rowLen = width * channels;
  for (let row = 0; row < height; row++) {
    const srcRow = height - 1 - row; // file rows are bottom-up
    for (let i = 0; i < rowLen; i++) {
      data[row * rowLen + i] = view.getFloat32((srcRow * rowLen + i) * 4, littleEndian);
    }
  }
  return { width, height, channels, data };
}

export function writePfm(img: PfmImage, path: string): void {
  const { width, height, channels, data } = img;
  if (data.length !== width * height * channels) {
    throw new Error(`pfm payload size ${data.length} != ${width}x${height}x${channels}`);
  }
  for (const v of data) {
    if (!Number.isFinite(v)) throw new Error("refusing to write non-finite values to PFM");
  }
  const header = Buffer.from(`${channels === 3 ? "PF" : "Pf"}\n${width} ${height}\n-1.0\n`, "ascii");
  const payload = Buffer.alloc(data.length * 4);
  const rowLen = width * channels;
  for (let row = 0; row < height; row++) {
    const dstRow = height - 1 - row;
    for (let i = 0; i < rowLen; i++) {
      payload.writeFloatLE(data[row * rowLen + i], (dstRow * rowLen + i) * 4);
    }
  }
  writeFileSync(path, Buffer.concat([header, payload]));
}
