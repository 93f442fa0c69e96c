/* Line-delimited manifest records, read and written bit-compatibly with the
   dysflux harness: one JSON object per line, UTF-8, unknown fields preserved. */

import fs from "node:fs";

export interface ManifestRecord {
  utterance_id: string;
  level: string;
  reference_text: string;
  annotated_text: string;
  realized_units: string[] | null;
  realized_durations_s: number[] | null;
  ipa: string | null;
  events: unknown[];
  audio_path: string | null;
  metadata: Record<string, unknown>;
  error?: string;
}

export function readManifest(path: string): ManifestRecord[] {
  const lines = fs.readFileSync(path, "utf-8").split("\n");
  const records: ManifestRecord[] = [];
  lines.forEach((line, i) => {
    if (!line.trim()) return;
    try {
      records.push(JSON.parse(line) as ManifestRecord);
    } catch (err) {
      throw new Error(`${path}: line ${i + 1}: ${(err as Error).message}`);
    }
  });
  return records;
}

export function writeManifest(records: ManifestRecord[], path: string): void {
  const body = records.map((r) => JSON.stringify(r)).join("\n");
  fs.writeFileSync(path, body + "\n", "utf-8");
}

/** IPA segments of one record; the manifest stores them space-joined. */
export function ipaSegments(record: ManifestRecord): string[] {
  if (!record.ipa) return [];
  return record.ipa.split(/\s+/).filter((s) => s.length > 0);
}

/** Durations of the silence units, in realized order, for pause rendering. */
export function silenceDurations(record: ManifestRecord): number[] {
  const units = record.realized_units ?? [];
  const durations = record.realized_durations_s ?? [];
  const out: number[] = [];
  units.forEach((u, i) => {
    if (u === "sil" && typeof durations[i] === "number") out.push(durations[i]);
  });
  return out;
}
