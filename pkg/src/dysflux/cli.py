"""Command-line harness: generate / detect / evaluate / features / vocab.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from . import align, features, manifest, metrics, simulate, tokenizer
from .annotation import AnnotationLevel, DysfluencyType, parse_annotated, render_annotated
from .errors import DysfluxError, IdMismatch
from .phonemes import PronunciationDict, default_dict_path
from .simulate import SimulationConfig, normalize_transcript, record_seed

USAGE_EXIT = 1
DATA_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _load_config_file(path) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _simulation_config(args, overrides: dict) -> SimulationConfig:
    level = AnnotationLevel(args.level)
    kwargs = {"level": level, "seed": args.seed}
    if args.types:
        kwargs["enabled_types"] = tuple(
            DysfluencyType(t.strip()) for t in args.types.split(",")
        )
    for key, value in overrides.get("simulation", {}).items():
        if key == "enabled_types":
            value = tuple(DysfluencyType(t) for t in value)
        elif key == "level":
            value = AnnotationLevel(value)
        elif isinstance(value, list):
            value = tuple(value)
        kwargs[key] = value
    return SimulationConfig(**kwargs)


def _detector_config(overrides: dict) -> align.DetectorConfig:
    return align.DetectorConfig(**overrides.get("detector", {}))


def _dictionary(args) -> PronunciationDict:
    path = args.dict or default_dict_path()
    return PronunciationDict.load(path)


def cmd_generate(args) -> int:
    overrides = _load_config_file(args.config)
    config = _simulation_config(args, overrides)
    dictionary = _dictionary(args)
    transcripts = Path(args.transcripts).read_text(encoding="utf-8").splitlines()
    transcripts = [t for t in transcripts if t.strip()]
    records = simulate.simulate_corpus(transcripts, config, dictionary)
    manifest.write_manifest(records, args.out)
    if args.split is not None:
        _write_split(records, args.out, args.split, config.seed)
    counts = Counter(e.kind.value for r in records for e in r.events)
    skipped = len(transcripts) - len(records)
    print(f"wrote {len(records)} records to {args.out} ({skipped} transcripts skipped)")
    for kind in simulate.CANONICAL_TYPE_ORDER:
        if counts.get(kind.value):
            print(f"  {kind.value}: {counts[kind.value]}")
    return 0


def _write_split(records, out_path, ratio, seed):
    if not 0.0 <= ratio <= 1.0:
        raise DysfluxError(f"--split must be in [0, 1], got {ratio}")
    train, test = [], []
    for rec in records:
        u = record_seed(seed, rec.utterance_id + ":split") / 2**64
        (train if u < ratio else test).append(rec)
    out = Path(out_path)
    manifest.write_manifest(train, out.with_suffix(out.suffix + ".train"))
    manifest.write_manifest(test, out.with_suffix(out.suffix + ".test"))
    print(f"split: {len(train)} train / {len(test)} test")


def cmd_detect(args) -> int:
    overrides = _load_config_file(args.config)
    config = _detector_config(overrides)
    records = manifest.read_manifest(args.manifest)
    preds = []
    failures = 0
    for rec in records:
        observed = None
        if args.alignments:
            ali = Path(args.alignments) / f"{rec.utterance_id}.txt"
            if ali.exists():
                observed = align.read_alignment_file(ali)
        if observed is None:
            if rec.realized_units is None:
                preds.append(
                    manifest.PredictionRecord(
                        rec.utterance_id, error="missing realized_units"
                    )
                )
                failures += 1
                continue
            observed = rec.timed_units()
        annotated, events = align.detect(
            rec.reference_units, observed, rec.level, config
        )
        preds.append(
            manifest.PredictionRecord(
                rec.utterance_id, render_annotated(annotated), tuple(events)
            )
        )
    manifest.write_predictions(preds, args.out)
    print(f"wrote {len(preds)} predictions to {args.out} ({failures} records failed)")
    return 0


def cmd_evaluate(args) -> int:
    records = manifest.read_manifest(args.manifest)
    if not records:
        raise DysfluxError(f"{args.manifest}: empty manifest")
    level = records[0].level
    preds = manifest.read_predictions(args.predictions, level)
    by_id = {p.utterance_id: p for p in preds}
    missing = [r.utterance_id for r in records if r.utterance_id not in by_id]
    extra = sorted(set(by_id) - {r.utterance_id for r in records})
    if missing or extra:
        raise IdMismatch(f"missing predictions: {missing[:5]}, extra: {extra[:5]}")

    if args.vocab:
        vocab = tokenizer.Vocabulary.load(args.vocab, level)
    else:
        vocab = _build_vocab(records, level)
    evals = []
    groups: dict[DysfluencyType, list[metrics.UtteranceEval]] = {}
    for rec in records:
        pred = by_id[rec.utterance_id]
        ref_ids = _content_ids(rec.annotated_text, vocab)
        hyp_ids = ()
        if pred.annotated_text is not None and pred.error is None:
            try:
                hyp_ids = _content_ids(pred.annotated_text, vocab)
            except DysfluxError:
                hyp_ids = ()  # malformed prediction scores as a full miss
        ev = metrics.UtteranceEval(
            true_events=rec.events,
            predicted_events=pred.events if pred.error is None else (),
            reference_length=max(len(rec.reference_units), 1),
            reference_tokens=ref_ids,
            hypothesis_tokens=hyp_ids,
        )
        evals.append(ev)
        for kind in {e.kind for e in rec.events}:
            groups.setdefault(kind, []).append(ev)

    report = metrics.build_report(groups, overall=evals)
    text = report.to_text()
    print(text)
    if args.report:
        Path(args.report).write_text(text + "\n", encoding="utf-8")
    if args.report_jsonl:
        Path(args.report_jsonl).write_text(report.to_jsonl(), encoding="utf-8")
    return 0


def _build_vocab(records, level) -> tokenizer.Vocabulary:
    if level is AnnotationLevel.PHONEME:
        return tokenizer.build_phoneme_vocab()
    words = sorted({u for rec in records for u in rec.reference_units})
    return tokenizer.build_word_vocab(words)


def _content_ids(text, vocab) -> tuple[int, ...]:
    ids = tokenizer.encode(parse_annotated(text, vocab.level), vocab)
    return tuple(ids[1:-1])  # TER scores content tokens, not BOS/EOS


def cmd_features(args) -> int:
    samples = features.read_wav(args.wav)
    frames = features.log_mel(samples)
    features.write_lmel(args.out, frames)
    print(f"{args.wav}: {frames.shape[0]} frames x {frames.shape[1]} bands -> {args.out}")
    return 0


def cmd_vocab(args) -> int:
    level = AnnotationLevel(args.level)
    if level is AnnotationLevel.PHONEME:
        vocab = tokenizer.build_phoneme_vocab()
    else:
        if not args.transcripts:
            raise DysfluxError("word-level vocab needs --transcripts")
        lines = Path(args.transcripts).read_text(encoding="utf-8").splitlines()
        words = sorted({w for line in lines for w in normalize_transcript(line)})
        vocab = tokenizer.build_word_vocab(words)
    vocab.save(args.out)
    print(f"wrote {len(vocab)} symbols to {args.out}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="dysflux", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--config", help="JSON config file with simulation/detector overrides")
    common.add_argument(
        "--level", choices=[lv.value for lv in AnnotationLevel], default="word"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="simulate a benchmark manifest")
    p.add_argument("--transcripts", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dict", default=None, help="CMU-format dictionary path")
    p.add_argument("--types", default=None, help="comma-separated dysfluency types")
    p.add_argument("--split", type=float, default=None, help="train fraction; writes .train/.test")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("detect", parents=[common], help="run the rule-based detector")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--alignments", default=None, help="directory of <utt>.txt 'unit start end' files")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("evaluate", parents=[common], help="score predictions against a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--report", default=None, help="write the text report here")
    p.add_argument("--report-jsonl", default=None, help="write one JSON row per line here")
    p.add_argument("--vocab", default=None, help="score TER with this saved vocabulary file")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("features", parents=[common], help="extract log-mel features from a WAV")
    p.add_argument("wav")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("vocab", parents=[common], help="write a vocabulary file")
    p.add_argument("--out", required=True)
    p.add_argument("--transcripts", default=None)
    p.set_defaults(func=cmd_vocab)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DysfluxError as exc:
        print(f"dysflux: error: {exc}", file=sys.stderr)
        return DATA_EXIT
    except OSError as exc:
        print(f"dysflux: error: {exc}", file=sys.stderr)
        return DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
