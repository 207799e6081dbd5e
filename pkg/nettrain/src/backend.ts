/** Backend bootstrap: wasm (fast on node) with plain-JS cpu fallback. */

import * as tf from "@tensorflow/tfjs";
import { setWasmPaths } from "@tensorflow/tfjs-backend-wasm";
import { createRequire } from "node:module";
import { dirname, join } from "node:path";

let ready: Promise<string> | null = null;

export function initBackend(): Promise<string> {
  if (!ready) {
    ready = (async () => {
      try {
        const require = createRequire(import.meta.url);
        const wasmDir = dirname(require.resolve("@tensorflow/tfjs-backend-wasm"));
        setWasmPaths(join(wasmDir, "/"));
        await tf.setBackend("wasm");
      } catch {
        await tf.setBackend("cpu");
      }
      await tf.ready();
      return tf.getBackend();
    })();
  }
  return ready;
}
