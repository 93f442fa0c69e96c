/* The TTS voice behind the bridge. Voices implement a one-function adapter;
   the built-in "tone" voice is a deterministic signal generator that maps
   each IPA segment to a fixed-frequency note, so pipelines can be exercised
   end to end without model weights. */

import { SAMPLE_RATE } from "./wav.js";

export interface RenderOptions {
  /** Durations (seconds) for the silence segments, in order of appearance. */
  silenceDurations?: number[];
}

export interface Voice {
  readonly name: string;
  render(segments: string[], opts?: RenderOptions): Float32Array;
}

export class UnrenderableSegmentError extends Error {
  constructor(segment: string) {
    super(`unrenderable segment: ${segment}`);
    this.name = "UnrenderableSegment";
  }
}

export class ModelUnavailableError extends Error {
  constructor(model: string) {
    super(`unknown TTS model: ${model}`);
    this.name = "ModelUnavailable";
  }
}

export const SILENCE_SEGMENT = "‖";
export const LENGTH_MARK = "ː";

/* IPA inventory the dysflux phoneme table emits. */
const KNOWN_SEGMENTS = [
  "ɑː", "æ", "ʌ", "ɔː", "aʊ", "aɪ", "b", "tʃ", "d", "ð",
  "ɛ", "ɜː", "eɪ", "f", "ɡ", "h", "ɪ", "iː", "dʒ", "k",
  "l", "m", "n", "ŋ", "oʊ", "ɔɪ", "p", "ɹ", "s", "ʃ",
  "t", "θ", "ʊ", "uː", "v", "w", "j", "z", "ʒ",
];
const KNOWN = new Set(KNOWN_SEGMENTS);

export interface ParsedSegment {
  base: string;
  extraMarks: number;
  silence: boolean;
}

/** Split a segment into its inventory base plus stacked length marks. */
export function parseSegment(segment: string): ParsedSegment {
  if (segment === SILENCE_SEGMENT) {
    return { base: segment, extraMarks: 0, silence: true };
  }
  let base = segment;
  let extra = 0;
  while (base.length > 0 && !KNOWN.has(base)) {
    if (!base.endsWith(LENGTH_MARK)) break;
    base = base.slice(0, -LENGTH_MARK.length);
    extra += 1;
  }
  if (!KNOWN.has(base)) throw new UnrenderableSegmentError(segment);
  return { base, extraMarks: extra, silence: false };
}

const BASE_DURATION_S = 0.09;
const MARK_STRETCH_S = 0.08;
const DEFAULT_SILENCE_S = 1.0;
const AMPLITUDE = 0.3;
const EDGE_S = 0.01; // attack/release ramp

function segmentFrequency(base: string): number {
  let h = 0;
  for (const ch of base) h = (h * 31 + ch.codePointAt(0)!) >>> 0;
  return 160 + (h % 24) * 35; // 160..965 Hz, deterministic per segment
}

export class ToneVoice implements Voice {
  readonly name = "tone";

  render(segments: string[], opts: RenderOptions = {}): Float32Array {
    const silences = [...(opts.silenceDurations ?? [])];
    const pieces: Float32Array[] = [];
    for (const segment of segments) {
      const parsed = parseSegment(segment);
      if (parsed.silence) {
        const dur = silences.length > 0 ? silences.shift()! : DEFAULT_SILENCE_S;
        pieces.push(new Float32Array(Math.round(dur * SAMPLE_RATE)));
        continue;
      }
      const dur = BASE_DURATION_S + parsed.extraMarks * MARK_STRETCH_S;
      pieces.push(tone(segmentFrequency(parsed.base), dur));
    }
    const total = pieces.reduce((n, p) => n + p.length, 0);
    const out = new Float32Array(total);
    let at = 0;
    for (const p of pieces) {
      out.set(p, at);
      at += p.length;
    }
    return out;
  }
}

function tone(freq: number, durationS: number): Float32Array {
  const n = Math.round(durationS * SAMPLE_RATE);
  const edge = Math.min(Math.round(EDGE_S * SAMPLE_RATE), Math.floor(n / 2));
  const out = new Float32Array(n);
  for (let i = 0; i < n; i++) {
    let env = 1.0;
    if (i < edge) env = i / edge;
    else if (i >= n - edge) env = (n - 1 - i) / edge;
    out[i] = AMPLITUDE * env * Math.sin(2 * Math.PI * freq * (i / SAMPLE_RATE));
  }
  return out;
}

const VOICES: Record<string, () => Voice> = {
  tone: () => new ToneVoice(),
};

export function getVoice(model: string): Voice {
  const factory = VOICES[model];
  if (!factory) throw new ModelUnavailableError(model);
  return factory();
}
