#!/usr/bin/env node
/* synth --manifest <file> --out-dir <dir> [--model tone] [--concurrency N]
         [--out-manifest <file>] */

import { synthesizeManifest } from "./index.js";

interface Args {
  manifest?: string;
  "out-dir"?: string;
  model: string;
  concurrency: string;
  "out-manifest"?: string;
}

function parseArgs(argv: string[]): Args {
  const args: Record<string, string> = { model: "tone", concurrency: "4" };
  for (let i = 0; i < argv.length; i++) {
    const token = argv[i];
    if (!token.startsWith("--")) {
      throw new Error(`unexpected argument: ${token}`);
    }
    const key = token.slice(2);
    const value = argv[i + 1];
    if (value === undefined || value.startsWith("--")) {
      throw new Error(`missing value for --${key}`);
    }
    args[key] = value;
    i++;
  }
  return args as unknown as Args;
}

async function main(): Promise<number> {
  let args: Args;
  try {
    args = parseArgs(process.argv.slice(2));
    if (!args.manifest || !args["out-dir"]) {
      throw new Error("--manifest and --out-dir are required");
    }
  } catch (err) {
    console.error(`synth: ${(err as Error).message}`);
    return 1;
  }
  try {
    const summary = await synthesizeManifest(args.manifest, args["out-dir"], {
      model: args.model,
      concurrency: Number(args.concurrency),
      outManifest: args["out-manifest"],
    });
    console.log(
      `rendered ${summary.rendered} records (${summary.failed} failed) -> ${summary.manifestPath}`
    );
    return 0;
  } catch (err) {
    console.error(`synth: ${(err as Error).message}`);
    return 2;
  }
}

main().then((code) => {
  process.exitCode = code;
});
