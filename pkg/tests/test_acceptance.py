"""Acceptance suite: every release criterion, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import itertools
import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import make_reference, record_timed_units

from oracles import edit_distance_dp, lcs_length_dp

from dysflux.align import TimedUnit, detect, detect_oracle, lcs, presegment
from dysflux.annotation import (
    AnnotatedSequence,
    AnnotationLevel,
    DysfluencyEvent,
    DysfluencyType,
    TimeBound,
    UNIT_ANCHORED,
    legal_types,
)
from dysflux.cli import main
from dysflux.features import log_mel, mel_filterbank, band_center_hz, HOP_LENGTH, N_FFT, SAMPLE_RATE
from dysflux.manifest import read_manifest, write_predictions, PredictionRecord
from dysflux.metrics import UtteranceEval, bound_loss, ter, token_distance
from dysflux.simulate import SimulationConfig, inject
from dysflux.tokenizer import build_phoneme_vocab, build_word_vocab, decode, encode

WORD = AnnotationLevel.WORD
PHONEME = AnnotationLevel.PHONEME


def _report(name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {status}: {name}" + (f" ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


# ---------------------------------------------------------------------------
# 1. LCS oracle equivalence
# ---------------------------------------------------------------------------

def test_lcs_oracle_equivalence():
    t0 = time.time()
    seqs = []
    for length in range(0, 5):
        seqs.extend(itertools.product(range(4), repeat=length))
    bad = 0
    for a in seqs:  # exhaustive cross product at lengths <= 4
        for b in seqs:
            if len(lcs(a, b)) != lcs_length_dp(a, b):
                bad += 1
    rng = np.random.default_rng(1)
    for _ in range(20_000):  # dense randomized cover of the <= 8 regime
        a = rng.integers(0, 4, rng.integers(0, 9))
        b = rng.integers(0, 4, rng.integers(0, 9))
        if len(lcs(a, b)) != lcs_length_dp(list(a), list(b)):
            bad += 1
    for _ in range(1_000):  # longer pairs
        a = rng.integers(0, 4, rng.integers(0, 41))
        b = rng.integers(0, 4, rng.integers(0, 41))
        if len(lcs(a, b)) != lcs_length_dp(list(a), list(b)):
            bad += 1
    elapsed = time.time() - t0
    _report(
        "LCS oracle equivalence",
        bad == 0 and elapsed < 10.0,
        f"{len(seqs)**2 + 21_000} pairs, {bad} mismatches, {elapsed:.1f}s",
    )


# ---------------------------------------------------------------------------
# 2. pre-segmentation of the stella realization
# ---------------------------------------------------------------------------

def test_presegment_stella_example(dictionary):
    observed = [
        TimedUnit(u)
        for u in ["P", "L", "IY", "Z",
                  "K", "K", "K", "AO", "L",
                  "S", "S", "T", "AE", "L", "AH"]
    ]
    spans = presegment(["please", "call", "stella"], observed, dictionary)
    got = [(s.word_index, s.start, s.end) for s in spans]
    ok = got == [(0, 0, 4), (1, 4, 9), (2, 9, 15)]
    _report("presegment assigns strays to call/stella", ok, str(got))


# ---------------------------------------------------------------------------
# 3. simulator <-> detector closure
# ---------------------------------------------------------------------------

N_PER_COMBO = 5_000


def test_simulator_detector_closure(dictionary, dict_words):
    t0 = time.time()
    rng = np.random.default_rng(99)
    combos = [(WORD, k) for k in SimulationConfig(level=WORD).enabled_types]
    combos += [(PHONEME, k) for k in SimulationConfig(level=PHONEME).enabled_types]
    worst = 1.0
    details = []
    for level, kind in combos:
        config = SimulationConfig(level=level)
        exact = 0
        presence = 0
        for i in range(N_PER_COMBO):
            ref = make_reference(rng, dict_words, level, dictionary, lo=4, hi=11)
            rec = inject(ref, kind, config, np.random.default_rng(i), dictionary)
            _, events = detect(rec.reference_units, record_timed_units(rec), level)
            if events:
                presence += 1
            if [(e.kind, e.anchor) for e in events] == [
                (e.kind, e.anchor) for e in rec.events
            ]:
                exact += 1
        rate = exact / N_PER_COMBO
        worst = min(worst, rate)
        details.append(f"{level.value}/{kind.value}={rate:.4f}")
        assert presence == N_PER_COMBO, f"EAcc<100% for {level.value}/{kind.value}"

    false_alarms = 0
    for _ in range(N_PER_COMBO):  # fluent records must stay marker-free
        level = WORD if rng.integers(2) else PHONEME
        ref = make_reference(rng, dict_words, level, dictionary, lo=4, hi=11)
        nominal = SimulationConfig(level=level).nominal_duration
        observed = []
        t = 0.0
        for u in ref:
            observed.append(TimedUnit(u, TimeBound(t, t + nominal)))
            t += nominal
        if detect_oracle(ref, observed, level).markers:
            false_alarms += 1
    elapsed = time.time() - t0
    _report(
        "simulator/detector closure",
        worst >= 0.99 and false_alarms == 0 and elapsed < 60.0,
        f"worst={worst:.4f}, false_alarms={false_alarms}, {elapsed:.1f}s; " + " ".join(details),
    )


# ---------------------------------------------------------------------------
# 4. tokenizer layout and round trip
# ---------------------------------------------------------------------------

def _random_sequence(rng, level, unit_pool):
    units = tuple(unit_pool[int(i)] for i in rng.integers(0, len(unit_pool), rng.integers(0, 11)))
    kinds = sorted(legal_types(level), key=lambda k: k.value)
    markers = []
    for _ in range(int(rng.integers(0, 4))):
        kind = kinds[int(rng.integers(len(kinds)))]
        lo = 1 if kind in UNIT_ANCHORED else 0
        if lo > len(units):
            continue
        markers.append((kind, int(rng.integers(lo, len(units) + 1))))
    markers.sort(key=lambda m: m[1])
    return AnnotatedSequence(level, units, tuple(markers))


def test_tokenizer_layout_and_round_trip(dict_words):
    vocab_p = build_phoneme_vocab()
    layout_ok = (
        len(vocab_p) == 47
        and [vocab_p.id(m) for m in ("[REP]", "[DEL]", "[SUB]", "[PRO]")] == [43, 44, 45, 46]
    )
    rng = np.random.default_rng(8)
    vocab_w = build_word_vocab(dict_words)
    from dysflux.phonemes import INVENTORY

    failures = 0
    for _ in range(10_000):
        seq = _random_sequence(rng, PHONEME, INVENTORY)
        if decode(encode(seq, vocab_p), vocab_p) != seq:
            failures += 1
    for _ in range(10_000):
        seq = _random_sequence(rng, WORD, dict_words)
        if decode(encode(seq, vocab_w), vocab_w) != seq:
            failures += 1
    _report(
        "tokenizer layout and round trip",
        layout_ok and failures == 0,
        f"layout_ok={layout_ok}, failures={failures}/20000",
    )


# ---------------------------------------------------------------------------
# 5. metric oracles
# ---------------------------------------------------------------------------

def test_metric_oracles():
    rng = np.random.default_rng(3)
    ter_bad = 0
    for _ in range(1_000):
        a = [int(x) for x in rng.integers(0, 10, rng.integers(1, 21))]
        b = [int(x) for x in rng.integers(0, 10, rng.integers(0, 21))]
        if ter(a, b) != edit_distance_dp(a, b) / len(a):
            ter_bad += 1

    same = [TimeBound(0.20, 0.60), TimeBound(1.00, 1.44)]
    bl_zero = bound_loss(same, same)
    shifted = [TimeBound(0.22, 0.62), TimeBound(1.02, 1.46)]
    bl_frame = bound_loss(shifted, same)

    def _ev(anchor):
        return DysfluencyEvent(DysfluencyType.REPETITION, WORD, anchor)

    td_zero = token_distance([UtteranceEval((_ev(4),), (_ev(4),), 100)])
    td_one = token_distance([UtteranceEval((_ev(4),), (_ev(5),), 100)])

    ok = (
        ter_bad == 0
        and bl_zero == 0.0
        and math.isclose(bl_frame, 20.0)
        and td_zero == 0.0
        and math.isclose(td_one * 1000.0, 10.0)
    )
    _report(
        "metric oracles",
        ok,
        f"ter_bad={ter_bad}, bl=({bl_zero},{bl_frame:.3f}), td=({td_zero},{td_one * 1000:.3f}e-3)",
    )


# ---------------------------------------------------------------------------
# 6. report structure
# ---------------------------------------------------------------------------

def test_report_structure(tmp_path, dictionary, dict_words):
    rng = np.random.default_rng(12)
    lines = [
        " ".join(make_reference(rng, dict_words, WORD, dictionary, lo=5, hi=11))
        for _ in range(200)
    ]
    transcripts = tmp_path / "t.txt"
    transcripts.write_text("\n".join(lines), encoding="utf-8")
    manifest_path = tmp_path / "m.jsonl"
    assert main(["generate", "--transcripts", str(transcripts), "--out", str(manifest_path), "--seed", "5"]) == 0
    records = read_manifest(manifest_path)
    pred_path = tmp_path / "perfect.jsonl"
    write_predictions(
        [PredictionRecord(r.utterance_id, r.annotated_text, r.events) for r in records],
        pred_path,
    )
    report_jsonl = tmp_path / "report.jsonl"
    assert main([
        "evaluate", "--manifest", str(manifest_path), "--predictions", str(pred_path),
        "--report-jsonl", str(report_jsonl),
    ]) == 0
    rows = [json.loads(l) for l in report_jsonl.read_text(encoding="utf-8").splitlines()]
    labels = [r["type"] for r in rows]
    want = ["repetition", "deletion", "insertion", "pause", "overall"]
    columns_ok = all(
        set(("ter_pct", "eacc_pct", "cacc_pct", "td_e3")) <= set(r) for r in rows
    )
    perfect_ok = all(
        r["ter_pct"] == 0.0
        and r["eacc_pct"] == 100.0
        and r["cacc_pct"] == 100.0
        and r["td_e3"] == 0.0
        for r in rows
    )
    _report(
        "report structure",
        labels == want and columns_ok and perfect_ok,
        f"rows={labels}",
    )


# ---------------------------------------------------------------------------
# 7. pipeline determinism
# ---------------------------------------------------------------------------

def test_pipeline_determinism(tmp_path, dictionary, dict_words):
    rng = np.random.default_rng(40)
    lines = [
        " ".join(make_reference(rng, dict_words, WORD, dictionary, lo=5, hi=11))
        for _ in range(100)
    ]
    transcripts = tmp_path / "t.txt"
    transcripts.write_text("\n".join(lines), encoding="utf-8")
    blobs = []
    for run in ("a", "b"):
        m = tmp_path / f"m{run}.jsonl"
        p = tmp_path / f"p{run}.jsonl"
        r = tmp_path / f"r{run}.txt"
        j = tmp_path / f"j{run}.jsonl"
        assert main(["generate", "--transcripts", str(transcripts), "--out", str(m), "--seed", "7"]) == 0
        assert main(["detect", "--manifest", str(m), "--out", str(p)]) == 0
        assert main([
            "evaluate", "--manifest", str(m), "--predictions", str(p),
            "--report", str(r), "--report-jsonl", str(j),
        ]) == 0
        blobs.append(tuple(x.read_bytes() for x in (m, p, r, j)))
    _report("pipeline determinism", blobs[0] == blobs[1])


# ---------------------------------------------------------------------------
# 8. audio features
# ---------------------------------------------------------------------------

def test_audio_features():
    frames = log_mel(np.zeros(16_000))
    frames_ok = frames.shape == (101, 80)
    floor_ok = bool(np.all(frames == -10.0))

    t = np.arange(16_000) / SAMPLE_RATE
    tone = np.sin(2 * np.pi * 440.0 * t)
    mel_frames = log_mel(tone)
    window = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(N_FFT) / N_FFT)
    mid = 50 * HOP_LENGTH
    seg = tone[mid - N_FFT // 2 : mid + N_FFT // 2] * window
    k = np.arange(N_FFT // 2 + 1)[:, None]
    n = np.arange(N_FFT)[None, :]
    angles = 2.0 * np.pi * k * n / N_FFT
    power = (seg * np.cos(angles)).sum(axis=1) ** 2 + (seg * np.sin(angles)).sum(axis=1) ** 2
    expected_band = int(np.argmax(mel_filterbank() @ power))
    tone_ok = bool(
        np.all(np.argmax(mel_frames[10:-10], axis=1) == expected_band)
    ) and abs(band_center_hz(expected_band) - 440.0) < 80.0
    _report(
        "audio features",
        frames_ok and floor_ok and tone_ok,
        f"frames={frames.shape}, band={expected_band} ({band_center_hz(expected_band):.0f} Hz)",
    )
