"""Injects dysfluencies into reference transcripts at word or phoneme level.

Each injected event changes the realized unit sequence (what is "spoken"),
leaves a marker in the annotated text, and carries ground-truth time bounds
computed from nominal per-unit durations. Anchors are sampled uniformly over
positions whose ground truth is unambiguous: a repeated or deleted unit must
differ from its neighbors, substituted material must differ from the unit's
neighbors, and fillers never land next to an equal word, so the rule-based
detector can recover every event exactly.
"""

from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass, field, replace

import numpy as np

from .annotation import (
    AnnotatedSequence,
    AnnotationLevel,
    DysfluencyEvent,
    DysfluencyType,
    EventSpec,
    TimeBound,
    annotate,
    events_of,
    legal_types,
    render_annotated,
)
from .errors import (
    AllTranscriptsOOV,
    IllegalKindForLevel,
    OutOfVocabulary,
    ReferenceTooShort,
)
from .manifest import ManifestRecord
from .phonemes import (
    CONFUSABLE,
    IPA_SILENCE,
    LENGTH_MARK,
    SILENCE_UNIT,
    PronunciationDict,
    cmu_to_ipa,
    g2p,
)

log = logging.getLogger(__name__)

# report/row ordering shared with the metrics module
CANONICAL_TYPE_ORDER = (
    DysfluencyType.REPETITION,
    DysfluencyType.DELETION,
    DysfluencyType.INSERTION,
    DysfluencyType.PAUSE,
    DysfluencyType.SUBSTITUTION,
    DysfluencyType.PROLONGATION,
)

_WORD_RE = re.compile(r"[a-z']+")

_NOMINAL_DURATION = {AnnotationLevel.WORD: 0.30, AnnotationLevel.PHONEME: 0.10}


@dataclass(frozen=True)
class SimulationConfig:
    level: AnnotationLevel
    enabled_types: tuple[DysfluencyType, ...] = ()
    events_per_utterance: tuple[int, int] = (1, 1)
    repetition_count_range: tuple[int, int] = (1, 3)
    prolongation_length_marks: tuple[int, int] = (1, 2)
    pause_duration_s: tuple[float, float] = (0.5, 2.0)
    filler_inventory: tuple[str, ...] = ("uh", "um")
    seed: int = 0
    unit_duration_s: float | None = None
    type_weights: dict[DysfluencyType, float] | None = None

    def __post_init__(self):
        if not self.enabled_types:
            kinds = tuple(
                k for k in CANONICAL_TYPE_ORDER if k in legal_types(self.level)
            )
            object.__setattr__(self, "enabled_types", kinds)
        for kind in self.enabled_types:
            if kind not in legal_types(self.level):
                raise IllegalKindForLevel(f"{kind.value} at {self.level.value} level")
        for lo, hi in (
            self.events_per_utterance,
            self.repetition_count_range,
            self.prolongation_length_marks,
            self.pause_duration_s,
        ):
            if lo > hi:
                raise ValueError(f"empty range ({lo}, {hi})")
        if self.events_per_utterance[0] < 1:
            raise ValueError("events_per_utterance minimum must be >= 1")
        if not self.filler_inventory:
            raise ValueError("filler inventory is empty")

    @property
    def nominal_duration(self) -> float:
        return (
            self.unit_duration_s
            if self.unit_duration_s is not None
            else _NOMINAL_DURATION[self.level]
        )


@dataclass(frozen=True)
class RealizedSequence:
    """The units actually spoken, with nominal per-unit durations.

    ``stretches`` records (realized index, length-mark count) for prolonged
    units so the IPA rendering can be rebuilt from the sequence alone.
    """

    units: tuple[str, ...]
    durations: tuple[float, ...] | None = None
    stretches: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class SimulatedRecord:
    reference_units: tuple[str, ...]
    annotated: AnnotatedSequence
    realized: RealizedSequence
    ipa: tuple[str, ...]
    events: tuple[DysfluencyEvent, ...]


@dataclass(frozen=True)
class _Draw:
    """One sampled event: kind, reference position, and kind parameters."""

    kind: DysfluencyType
    position: int
    count: int = 0          # extra repetition copies
    marks: int = 0          # prolongation length marks
    duration: float = 0.0   # pause length
    unit: str = ""          # filler or substitute phoneme

    @property
    def slot(self) -> int:
        if self.kind in (
            DysfluencyType.REPETITION,
            DysfluencyType.SUBSTITUTION,
            DysfluencyType.PROLONGATION,
        ):
            return self.position + 1
        return self.position


def _as_rng(rng_state) -> np.random.Generator:
    if isinstance(rng_state, np.random.Generator):
        return rng_state
    return np.random.default_rng(rng_state)


def record_seed(global_seed: int, utterance_id: str) -> int:
    """Stable per-record seed so corpus generation can fan out."""
    digest = hashlib.blake2b(
        f"{global_seed}:{utterance_id}".encode(), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big")


def _legal_positions(kind, reference, config, blocked_slots, taken_anchors):
    n = len(reference)

    def differs_from_neighbors(a):
        left_ok = a == 0 or reference[a - 1] != reference[a]
        right_ok = a == n - 1 or reference[a + 1] != reference[a]
        return left_ok and right_ok

    if kind in (DysfluencyType.REPETITION, DysfluencyType.DELETION):
        cands = [a for a in range(n) if differs_from_neighbors(a)]
    elif kind is DysfluencyType.SUBSTITUTION:
        cands = [a for a in range(n) if _substitutes(reference, a)]
    elif kind is DysfluencyType.PROLONGATION:
        cands = list(range(n))
    else:  # insertion / pause land in interior slots
        cands = list(range(1, n))
    out = []
    for a in cands:
        slot = a + 1 if kind in (
            DysfluencyType.REPETITION,
            DysfluencyType.SUBSTITUTION,
            DysfluencyType.PROLONGATION,
        ) else a
        if slot in blocked_slots or a in taken_anchors:
            continue
        out.append(a)
    return out


def _substitutes(reference, a) -> list[str]:
    pool = CONFUSABLE.get(reference[a], ())
    n = len(reference)
    return [
        c
        for c in pool
        if (a == 0 or c != reference[a - 1]) and (a == n - 1 or c != reference[a + 1])
    ]


def _fillers(reference, slot, config) -> list[str]:
    return [
        f
        for f in config.filler_inventory
        if f != reference[slot - 1] and (slot >= len(reference) or f != reference[slot])
    ]


def _draw_events(reference, kinds, config, rng) -> list[_Draw]:
    draws: list[_Draw] = []
    blocked: set[int] = set()
    anchors: set[int] = set()
    for kind in kinds:
        positions = _legal_positions(kind, reference, config, blocked, anchors)
        if kind is DysfluencyType.INSERTION:
            positions = [p for p in positions if _fillers(reference, p, config)]
        if not positions:
            continue
        pos = int(positions[rng.integers(len(positions))])
        draw = _Draw(kind, pos)
        if kind is DysfluencyType.REPETITION:
            lo, hi = config.repetition_count_range
            draw = replace(draw, count=int(rng.integers(lo, hi + 1)))
        elif kind is DysfluencyType.PROLONGATION:
            lo, hi = config.prolongation_length_marks
            draw = replace(draw, marks=int(rng.integers(lo, hi + 1)))
        elif kind is DysfluencyType.PAUSE:
            lo, hi = config.pause_duration_s
            draw = replace(draw, duration=float(rng.uniform(lo, hi)))
        elif kind is DysfluencyType.SUBSTITUTION:
            subs = _substitutes(reference, pos)
            draw = replace(draw, unit=subs[rng.integers(len(subs))])
        elif kind is DysfluencyType.INSERTION:
            fillers = _fillers(reference, pos, config)
            draw = replace(draw, unit=fillers[rng.integers(len(fillers))])
        draws.append(draw)
        blocked.update({draw.slot - 1, draw.slot, draw.slot + 1})
        anchors.add(pos)
    draws.sort(key=lambda d: d.position)
    return draws


def _realize(reference, draws, config):
    """Apply draws (ascending position) and return units, durations, spans.

    Spans map each draw to its realized unit range; a deletion records the
    zero-width locus where the unit used to be.
    """
    nominal = config.nominal_duration
    work = [[u, nominal] for u in reference]
    spans = []
    stretches = []
    offset = 0
    for d in draws:
        i = d.position + offset
        if d.kind is DysfluencyType.REPETITION:
            work[i : i + 1] = [[reference[d.position], nominal]] * (d.count + 1)
            spans.append((i, i + d.count + 1))
            offset += d.count
        elif d.kind is DysfluencyType.DELETION:
            del work[i]
            spans.append((i, i))
            offset -= 1
        elif d.kind is DysfluencyType.SUBSTITUTION:
            work[i][0] = d.unit
            spans.append((i, i + 1))
        elif d.kind is DysfluencyType.PROLONGATION:
            work[i][1] = nominal * (2 * d.marks + 1)
            spans.append((i, i + 1))
            stretches.append((i, d.marks))
        elif d.kind is DysfluencyType.INSERTION:
            work.insert(i, [d.unit, nominal])
            spans.append((i, i + 1))
            offset += 1
        elif d.kind is DysfluencyType.PAUSE:
            work.insert(i, [SILENCE_UNIT, d.duration])
            spans.append((i, i + 1))
            offset += 1
    units = tuple(w[0] for w in work)
    durations = tuple(w[1] for w in work)
    return units, durations, spans, tuple(stretches)


def _event_bounds(durations, span) -> TimeBound:
    starts = np.concatenate([[0.0], np.cumsum(durations)])
    lo, hi = span
    if lo == hi:  # deletion locus, widened to one 20 ms frame
        t = float(starts[lo])
        start = max(t - 0.010, 0.0)
        return TimeBound(start, start + 0.020)
    return TimeBound(float(starts[lo]), float(starts[hi]))


def _payload(draw: _Draw, reference) -> tuple[str, ...] | None:
    if draw.kind is DysfluencyType.REPETITION:
        return (reference[draw.position],) * draw.count
    if draw.kind in (DysfluencyType.INSERTION, DysfluencyType.SUBSTITUTION):
        return (draw.unit,)
    return None


def _build_record(reference, draws, config, dictionary) -> SimulatedRecord:
    units, durations, spans, stretches = _realize(reference, draws, config)
    annotated = annotate(
        reference, config.level, [EventSpec(d.kind, d.position) for d in draws]
    )
    events = tuple(
        DysfluencyEvent(
            ev.kind,
            ev.level,
            ev.anchor,
            _payload(d, reference),
            _event_bounds(durations, span),
        )
        for ev, d, span in zip(events_of(annotated), draws, spans)
    )
    realized = RealizedSequence(units, durations, stretches)
    record = SimulatedRecord(tuple(reference), annotated, realized, (), events)
    ipa = derive_ipa(record, dictionary)
    return replace(record, ipa=ipa)


def inject(
    reference_units,
    kind: DysfluencyType,
    config: SimulationConfig,
    rng_state,
    dictionary: PronunciationDict | None = None,
) -> SimulatedRecord:
    """Inject exactly one event of ``kind`` into the reference units."""
    reference = list(reference_units)
    if len(reference) < 2:
        raise ReferenceTooShort(" ".join(reference))
    if kind not in legal_types(config.level) or kind not in config.enabled_types:
        raise IllegalKindForLevel(f"{kind.value} at {config.level.value} level")
    rng = _as_rng(rng_state)
    draws = _draw_events(reference, [kind], config, rng)
    if not draws:
        raise ReferenceTooShort(
            f"no unambiguous {kind.value} site in: {' '.join(reference)}"
        )
    return _build_record(reference, draws, config, dictionary)


def derive_ipa(
    record: SimulatedRecord, dictionary: PronunciationDict | None = None
) -> tuple[str, ...]:
    """IPA segments for the realized sequence.

    Phoneme-level units map through the fixed table, with prolongation length
    marks appended to stretched segments; word-level units are expanded via
    the dictionary first. Silence renders as the dedicated break segment.
    """
    realized = record.realized
    if record.annotated.level is AnnotationLevel.PHONEME:
        segments = list(cmu_to_ipa(realized.units))
        for idx, marks in realized.stretches:
            segments[idx] = segments[idx] + LENGTH_MARK * marks
        return tuple(segments)
    if dictionary is None:
        from .phonemes import load_default_dict

        dictionary = load_default_dict()
    segments: list[str] = []
    for word in realized.units:
        if word == SILENCE_UNIT:
            segments.append(IPA_SILENCE)
        else:
            segments.extend(cmu_to_ipa(g2p(word, dictionary)))
    return tuple(segments)


def normalize_transcript(line: str) -> list[str]:
    """Lowercased word tokens; punctuation except apostrophes dropped."""
    return _WORD_RE.findall(line.lower())


def _reference_units(words, level, dictionary):
    if level is AnnotationLevel.WORD:
        for w in words:
            g2p(w, dictionary)  # word-level records still need IPA later
        return list(words)
    units: list[str] = []
    for w in words:
        units.extend(g2p(w, dictionary))
    return units


def simulate_corpus(
    transcripts,
    config: SimulationConfig,
    dictionary: PronunciationDict | None = None,
) -> list[ManifestRecord]:
    """One manifest record per usable transcript, deterministic in the seed.

    Transcripts with out-of-vocabulary words (or fewer than two units) are
    skipped and counted; every kept record gets ``events_per_utterance``
    events at non-overlapping sites. Records are independent given the seed,
    so generation could fan out per transcript; output keeps input order.
    """
    if dictionary is None:
        from .phonemes import load_default_dict

        dictionary = load_default_dict()
    records = []
    skipped_oov = 0
    skipped_short = 0
    kinds_list = sorted(config.enabled_types, key=CANONICAL_TYPE_ORDER.index)
    weights = None
    if config.type_weights:
        weights = np.array(
            [float(config.type_weights.get(k, 0.0)) for k in kinds_list]
        )
        weights = weights / weights.sum()
    for idx, raw in enumerate(transcripts):
        utt_id = f"utt-{idx:06d}"
        words = normalize_transcript(raw)
        try:
            reference = _reference_units(words, config.level, dictionary)
        except OutOfVocabulary:
            skipped_oov += 1
            continue
        if len(reference) < 2:
            skipped_short += 1
            continue
        rng = np.random.default_rng(record_seed(config.seed, utt_id))
        lo, hi = config.events_per_utterance
        n_events = int(rng.integers(lo, hi + 1))
        picks = rng.choice(len(kinds_list), size=n_events, p=weights)
        kinds = [kinds_list[int(p)] for p in picks]
        draws = _draw_events(reference, kinds, config, rng)
        if not draws:
            skipped_short += 1
            continue
        sim = _build_record(reference, draws, config, dictionary)
        records.append(
            ManifestRecord(
                utterance_id=utt_id,
                level=config.level,
                reference_text=" ".join(sim.reference_units),
                annotated_text=render_annotated(sim.annotated),
                realized_units=sim.realized.units,
                realized_durations_s=sim.realized.durations,
                ipa=sim.ipa,
                events=sim.events,
                metadata={"source_text": raw.strip()},
            )
        )
    if skipped_oov or skipped_short:
        log.info(
            "skipped %d OOV and %d too-short transcripts",
            skipped_oov,
            skipped_short,
        )
    if not records:
        raise AllTranscriptsOOV(
            f"no usable transcripts ({skipped_oov} OOV, {skipped_short} too short)"
        )
    return records
