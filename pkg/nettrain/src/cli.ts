/** Command line: train on a lightlayers dataset manifest, or decompose an
 * image with a trained checkpoint.
 *
 *   tsx src/cli.ts train --manifest ds/manifest.txt --out ckpt [--steps 500]
 *                        [--batch 4] [--lr 2e-3] [--seed 0] [--directional]
 *   tsx src/cli.ts infer --image photo.png --checkpoint ckpt --out layers/photo
 */

import { parseArgs } from "node:util";
import { trainConfig } from "./config.js";
import { train } from "./train.js";
import { infer } from "./infer.js";

async function main(argv: string[]): Promise<number> {
  const command = argv[0];
  const rest = argv.slice(1);
  if (command === "train") {
    const { values } = parseArgs({
      args: rest,
      options: {
        manifest: { type: "string" },
        out: { type: "string" },
        steps: { type: "string", default: "500" },
        batch: { type: "string", default: "4" },
        lr: { type: "string", default: "2e-3" },
        seed: { type: "string", default: "0" },
        directional: { type: "boolean", default: false },
      },
    });
    if (!values.manifest || !values.out) {
      console.error("train needs --manifest and --out");
      return 1;
    }
    const tc = trainConfig({
      manifest: values.manifest,
      checkpointDir: values.out,
      steps: Number(values.steps),
      batchSize: Number(values.batch),
      learningRate: Number(values.lr),
      seed: Number(values.seed),
    });
    const result = await train(tc, values.directional ? { outputChannels: 40 } : {});
    console.log(
      `trained ${result.steps} steps on ${result.backend}: ` +
        `loss ${result.initialLoss.toFixed(5)} -> ${result.finalLoss.toFixed(5)}, ` +
        `r1 mean square ${result.r1MeanSquare.toExponential(3)}`,
    );
    return 0;
  }
  if (command === "infer") {
    const { values } = parseArgs({
      args: rest,
      options: {
        image: { type: "string" },
        checkpoint: { type: "string" },
        out: { type: "string" },
      },
    });
    if (!values.image || !values.checkpoint || !values.out) {
      console.error("infer needs --image, --checkpoint, and --out");
      return 1;
    }
    const result = await infer(values.image, values.checkpoint, values.out);
    console.log(`wrote ${result.files.join(", ")} at ${result.res}x${result.res}`);
    return 0;
  }
  console.error("usage: cli.ts <train|infer> ...");
  return 1;
}

main(process.argv.slice(2)).then(
  (code) => process.exit(code),
  (err) => {
    console.error(`error: ${err?.message ?? err}`);
    process.exit(2);
  },
);
