import fs from "node:fs";
import path from "node:path";

import {
  ManifestRecord,
  ipaSegments,
  readManifest,
  silenceDurations,
  writeManifest,
} from "./manifest.js";
import { runPool } from "./pool.js";
import { Voice, getVoice } from "./synth.js";
import { encodeWav } from "./wav.js";

export * from "./manifest.js";
export * from "./synth.js";
export * from "./wav.js";

export interface SynthesisSummary {
  rendered: number;
  failed: number;
  manifestPath: string;
}

export interface SynthesisOptions {
  model?: string;
  concurrency?: number;
  /** Where to write the updated manifest; defaults to rewriting in place. */
  outManifest?: string;
}

async function renderRecord(
  record: ManifestRecord,
  voice: Voice,
  outDir: string
): Promise<ManifestRecord> {
  const segments = ipaSegments(record);
  if (segments.length === 0) {
    return { ...record, error: "record has no ipa" };
  }
  try {
    const samples = voice.render(segments, {
      silenceDurations: silenceDurations(record),
    });
    const wavPath = path.join(outDir, `${record.utterance_id}.wav`);
    await fs.promises.writeFile(wavPath, encodeWav(samples));
    return { ...record, audio_path: wavPath };
  } catch (err) {
    return { ...record, error: (err as Error).message };
  }
}

/** Render every manifest record to a mono 16 kHz WAV and write audio_path
    back. Records that fail get an error field; the rest still render. */
export async function synthesizeManifest(
  manifestPath: string,
  outDir: string,
  opts: SynthesisOptions = {}
): Promise<SynthesisSummary> {
  const voice = getVoice(opts.model ?? "tone");
  const records = readManifest(manifestPath);
  await fs.promises.mkdir(outDir, { recursive: true });
  const updated = await runPool(
    records,
    (record) => renderRecord(record, voice, outDir),
    opts.concurrency ?? 4
  );
  const target = opts.outManifest ?? manifestPath;
  writeManifest(updated, target);
  const failed = updated.filter((r) => r.error).length;
  return { rendered: updated.length - failed, failed, manifestPath: target };
}
