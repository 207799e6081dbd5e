import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { readPfm, writePfm } from "../src/pfm.js";

const FIXTURE = join(__dirname, "fixtures", "mini");

describe("pfm", () => {
  it("round-trips float32 data bit-exactly", () => {
    const dir = mkdtempSync(join(tmpdir(), "pfm-"));
    const data = new Float32Array(4 * 3 * 3);
    for (let i = 0; i < data.length; i++) data[i] = Math.fround(Math.sin(i) * 5);
    const path = join(dir, "t.pfm");
    writePfm({ width: 4, height: 3, channels: 3, data }, path);
    const back = readPfm(path);
    expect(back.width).toBe(4);
    expect(back.height).toBe(3);
    expect(back.channels).toBe(3);
    expect(Array.from(back.data)).toEqual(Array.from(data));
  });

  it("reads layer files written by the primary toolkit", () => {
    const occ = readPfm(join(FIXTURE, "records", "rec00000.occ.pfm"));
    expect(occ.channels).toBe(1);
    expect(occ.width).toBe(16);
    expect(occ.height).toBe(16);
    for (const v of occ.data) {
      expect(v).toBeGreaterThanOrEqual(0);
      expect(v).toBeLessThanOrEqual(1);
    }
    const alb = readPfm(join(FIXTURE, "records", "rec00000.alb.pfm"));
    expect(alb.channels).toBe(3);
    expect(alb.data.length).toBe(16 * 16 * 3);
  });

  it("rejects malformed headers", () => {
    const dir = mkdtempSync(join(tmpdir(), "pfm-"));
    const path = join(dir, "bad.pfm");
    writePfm({ width: 1, height: 1, channels: 1, data: new Float32Array([1]) }, path);
    expect(() => readPfm(join(dir, "missing.pfm"))).toThrow();
  });

  it("refuses non-finite values", () => {
    const dir = mkdtempSync(join(tmpdir(), "pfm-"));
    const data = new Float32Array([1, NaN, 3]);
    expect(() =>
      writePfm({ width: 3, height: 1, channels: 1, data }, join(dir, "nan.pfm")),
    ).toThrow(/non-finite/);
  });
});
