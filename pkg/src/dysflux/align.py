"""LCS alignment, per-word pre-segmentation, the rule-based detector, and
token-to-time conversion.

The aligner is deliberately local: ties in the DP table are broken so that
every match lands as early (leftmost) as possible in both sequences, which is
what lets stray repeated units cluster around the word they belong to.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .annotation import (
    AnnotatedSequence,
    AnnotationLevel,
    DysfluencyEvent,
    DysfluencyType,
    EventSpec,
    TimeBound,
    UNIT_ANCHORED,
    annotate,
    events_of,
)
from .errors import EmptyObserved, MalformedManifest
from .kernels import lcs_suffix_table
from .phonemes import SILENCE_UNIT, PronunciationDict, g2p

FRAME_S = 0.020  # detector/report time grid
_HALF_FRAME = FRAME_S / 2.0


@dataclass(frozen=True)
class Alignment:
    """Strictly increasing matched index pairs plus the leftover gaps."""

    pairs: tuple[tuple[int, int], ...]
    unmatched_a: tuple[int, ...]
    unmatched_b: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class TimedUnit:
    unit: str
    bound: TimeBound | None = None


@dataclass(frozen=True)
class WordSpan:
    """Observed units [start, end) owned by one reference word."""

    word_index: int
    start: int
    end: int
    bound: TimeBound | None = None


@dataclass(frozen=True)
class DetectorConfig:
    pause_min_s: float = 0.25
    prolongation_factor: float = 2.5


def lcs(a, b, backend: str | None = None) -> Alignment:
    """Longest common subsequence of two unit sequences.

    Ties are resolved by walking the suffix-length table forward and
    preferring match, then skip-a, then skip-b, which anchors every match at
    its leftmost possible position.
    """
    a = list(a)
    b = list(b)
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return Alignment((), tuple(range(n)), tuple(range(m)))
    ids: dict[str, int] = {}
    ea = np.fromiter((ids.setdefault(u, len(ids)) for u in a), np.int64, n)
    eb = np.fromiter((ids.setdefault(u, len(ids)) for u in b), np.int64, m)
    table = lcs_suffix_table(ea, eb, backend=backend)
    pairs = []
    i = j = 0
    while i < n and j < m:
        if a[i] == b[j]:
            pairs.append((i, j))
            i += 1
            j += 1
        elif table[i + 1, j] >= table[i, j + 1]:
            i += 1
        else:
            j += 1
    in_a = {p[0] for p in pairs}
    in_b = {p[1] for p in pairs}
    return Alignment(
        tuple(pairs),
        tuple(k for k in range(n) if k not in in_a),
        tuple(k for k in range(m) if k not in in_b),
    )


def lcs_length_oracle(a, b) -> int:
    """Independent prefix-table recomputation used by the test suite."""
    a, b = list(a), list(b)
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0]
        for j, y in enumerate(b):
            if x == y:
                curr.append(prev[j] + 1)
            else:
                curr.append(max(curr[j], prev[j + 1]))
        prev = curr
    return prev[len(b)]


# ---------------------------------------------------------------------------
# pre-segmentation
# ---------------------------------------------------------------------------

def presegment(
    reference_words,
    observed: list[TimedUnit],
    dictionary: PronunciationDict,
) -> list[WordSpan]:
    """Partition observed units into one span per reference word.

    Reference words are expanded to phonemes, aligned to the observed units
    by LCS, and every unmatched observed unit attaches to the word of the
    next matched unit (trailing strays attach to the last word).
    """
    if not observed:
        raise EmptyObserved("no observed units to segment")
    ref_phones: list[str] = []
    owner: list[int] = []
    for w, word in enumerate(reference_words):
        for p in g2p(word, dictionary):
            ref_phones.append(p)
            owner.append(w)
    obs_units = [t.unit for t in observed]
    alignment = lcs(ref_phones, obs_units)

    n_words = len(list(reference_words))
    obs_owner = [-1] * len(obs_units)
    for i, j in alignment.pairs:
        obs_owner[j] = owner[i]
    nxt = n_words - 1
    for j in range(len(obs_units) - 1, -1, -1):
        if obs_owner[j] < 0:
            obs_owner[j] = nxt
        else:
            nxt = obs_owner[j]

    spans = []
    cursor = 0
    for w in range(n_words):
        end = cursor
        while end < len(obs_units) and obs_owner[end] == w:
            end += 1
        bound = _union_bound(observed[cursor:end])
        spans.append(WordSpan(w, cursor, end, bound))
        cursor = end
    return spans


def _union_bound(units: list[TimedUnit]) -> TimeBound | None:
    bounds = [t.bound for t in units]
    if not bounds or any(b is None for b in bounds):
        return None
    return TimeBound(min(b.start for b in bounds), max(b.end for b in bounds))


# ---------------------------------------------------------------------------
# oracle detection
# ---------------------------------------------------------------------------

_KIND_ORDER = {k: i for i, k in enumerate(DysfluencyType)}


@dataclass
class _Entry:
    kind: DysfluencyType
    position: int  # reference coordinates
    payload: tuple[str, ...] | None = None
    bound: TimeBound | None = None


def detect(
    reference_units,
    observed: list[TimedUnit],
    level: AnnotationLevel,
    config: DetectorConfig | None = None,
) -> tuple[AnnotatedSequence, list[DysfluencyEvent]]:
    """Detect dysfluencies by aligning observed units against the reference.

    Returns the predicted annotated sequence together with its events,
    enriched with payloads and (when the observed units carry bounds) time
    bounds. Silence units are excluded from matching; pauses and
    prolongations are only detectable when timing is present.
    """
    config = config or DetectorConfig()
    reference = list(reference_units)
    n = len(reference)
    obs_units = [t.unit for t in observed]
    nonsil = [k for k, u in enumerate(obs_units) if u != SILENCE_UNIT]
    b_units = [obs_units[k] for k in nonsil]
    have_time = bool(observed) and all(t.bound is not None for t in observed)

    alignment = lcs(reference, b_units)
    matched_b_of_ref = {i: j for i, j in alignment.pairs}

    def obs_bound(b_indices) -> TimeBound | None:
        if not have_time:
            return None
        return _union_bound([observed[nonsil[j]] for j in b_indices])

    def gap_bound(prev_b: int, next_b: int) -> TimeBound | None:
        # zero-width locus between two observed units, widened to one frame
        if not have_time:
            return None
        t1 = observed[nonsil[prev_b]].bound.end if prev_b >= 0 else 0.0
        if next_b < len(b_units):
            t2 = observed[nonsil[next_b]].bound.start
        else:
            t2 = observed[-1].bound.end if observed else t1
        mid = max((t1 + t2) / 2.0 - _HALF_FRAME, 0.0)
        return TimeBound(mid, mid + FRAME_S)

    entries: list[_Entry] = []
    walk = [(-1, -1)] + list(alignment.pairs) + [(n, len(b_units))]
    for (pi, pj), (ni, nj) in zip(walk, walk[1:]):
        ref_gap = list(range(pi + 1, ni))
        obs_gap = list(range(pj + 1, nj))
        if not ref_gap and not obs_gap:
            continue
        if (
            level is AnnotationLevel.PHONEME
            and len(ref_gap) == 1
            and len(obs_gap) == 1
        ):
            entries.append(
                _Entry(
                    DysfluencyType.SUBSTITUTION,
                    ref_gap[0],
                    payload=(b_units[obs_gap[0]],),
                    bound=obs_bound(obs_gap),
                )
            )
            continue
        for r in ref_gap:
            entries.append(
                _Entry(DysfluencyType.DELETION, r, bound=gap_bound(pj, nj))
            )
        rep_runs: dict[int, list[int]] = {}
        for o in obs_gap:
            u = b_units[o]
            if pi >= 0 and u == reference[pi]:
                rep_runs.setdefault(pi, []).append(o)
            elif ni < n and u == reference[ni]:
                rep_runs.setdefault(ni, []).append(o)
            elif level is AnnotationLevel.WORD:
                entries.append(
                    _Entry(
                        DysfluencyType.INSERTION,
                        ni,
                        payload=(u,),
                        bound=obs_bound([o]),
                    )
                )
            # extra phoneme-level units that are neither repeats nor a 1:1
            # substitution have no legal marker and are dropped
        for anchor, copies in rep_runs.items():
            realized = sorted(copies)
            if anchor in matched_b_of_ref:
                realized.append(matched_b_of_ref[anchor])
            entries.append(
                _Entry(
                    DysfluencyType.REPETITION,
                    anchor,
                    payload=tuple(b_units[o] for o in sorted(copies)),
                    bound=obs_bound(sorted(realized)),
                )
            )

    if have_time and level is AnnotationLevel.WORD:
        entries.extend(_detect_pauses(reference, observed, alignment, nonsil, config))
    if have_time and level is AnnotationLevel.PHONEME:
        entries.extend(
            _detect_prolongations(observed, alignment, nonsil, config)
        )

    entries.sort(key=_entry_sort_key)
    annotated = annotate(
        reference, level, [EventSpec(e.kind, e.position) for e in entries]
    )
    events = [
        DysfluencyEvent(ev.kind, ev.level, ev.anchor, e.payload, e.bound)
        for ev, e in zip(events_of(annotated), entries)
    ]
    return annotated, events


def _entry_sort_key(e: _Entry):
    slot = e.position + 1 if e.kind in UNIT_ANCHORED else e.position
    return (slot, _KIND_ORDER[e.kind], e.position)


def _detect_pauses(reference, observed, alignment, nonsil, config):
    ref_of_b = {j: i for i, j in alignment.pairs}
    entries = []
    for k, t in enumerate(observed):
        if t.unit != SILENCE_UNIT:
            continue
        if t.bound is None or t.bound.duration < config.pause_min_s:
            continue
        before = [x for x in nonsil if x < k]
        after = [x for x in nonsil if x > k]
        if not before or not after:
            continue  # leading/trailing silence is not a block between words
        slot = None
        for x in after:
            j = nonsil.index(x)
            if j in ref_of_b:
                slot = ref_of_b[j]
                break
        if slot is None:
            for x in reversed(before):
                j = nonsil.index(x)
                if j in ref_of_b:
                    slot = ref_of_b[j] + 1
                    break
        if slot is None:
            continue
        entries.append(_Entry(DysfluencyType.PAUSE, slot, bound=t.bound))
    return entries


def _detect_prolongations(observed, alignment, nonsil, config):
    durations = [observed[k].bound.duration for k in nonsil]
    if not durations:
        return []
    threshold = config.prolongation_factor * float(np.median(durations))
    entries = []
    for i, j in alignment.pairs:
        bound = observed[nonsil[j]].bound
        if bound.duration >= threshold:
            entries.append(
                _Entry(DysfluencyType.PROLONGATION, i, bound=bound)
            )
    return entries


def detect_oracle(
    reference_units,
    observed: list[TimedUnit],
    level: AnnotationLevel,
    config: DetectorConfig | None = None,
) -> AnnotatedSequence:
    """Annotated-sequence view of :func:`detect`."""
    annotated, _ = detect(reference_units, observed, level, config)
    return annotated


# ---------------------------------------------------------------------------
# token -> time
# ---------------------------------------------------------------------------

def token_to_time(
    annotated: AnnotatedSequence,
    timing: list[TimedUnit] | list[WordSpan],
) -> list[DysfluencyEvent]:
    """Attach time bounds to an annotated sequence's events.

    ``timing`` is either the observed units themselves or per-word spans.
    Bounds cover the realized units of each event; deletions get a zero-width
    locus widened to one 20 ms frame.
    """
    events = events_of(annotated)
    if not events:
        return []
    if timing and isinstance(timing[0], WordSpan):
        return _events_from_spans(annotated, events, timing)
    return _events_from_units(annotated, events, timing)


def _events_from_units(annotated, events, observed: list[TimedUnit]):
    units = list(annotated.units)
    obs_units = [t.unit for t in observed]
    nonsil = [k for k, u in enumerate(obs_units) if u != SILENCE_UNIT]
    b_units = [obs_units[k] for k in nonsil]
    alignment = lcs(units, b_units)
    matched = {i: j for i, j in alignment.pairs}
    unmatched_b = set(alignment.unmatched_b)

    def b_bound(j) -> TimeBound | None:
        return observed[nonsil[j]].bound

    def locus(slot: int) -> tuple[float, float]:
        # observed-time interval between the units flanking an annotated slot
        t1 = 0.0
        for i in range(slot - 1, -1, -1):
            if i in matched and b_bound(matched[i]) is not None:
                t1 = b_bound(matched[i]).end
                break
        t2 = observed[-1].bound.end if observed and observed[-1].bound else t1
        for i in range(slot, len(units)):
            if i in matched and b_bound(matched[i]) is not None:
                t2 = b_bound(matched[i]).start
                break
        return t1, t2

    def frame_at(t: float) -> TimeBound:
        lo = max(t - _HALF_FRAME, 0.0)
        return TimeBound(lo, lo + FRAME_S)

    out = []
    for ev in events:
        kind, a = ev.kind, ev.anchor
        bound = None
        if kind is DysfluencyType.REPETITION and a in matched:
            jm = matched[a]
            lo = jm
            while lo - 1 >= 0 and lo - 1 in unmatched_b and b_units[lo - 1] == units[a]:
                lo -= 1
            hi = jm
            while hi + 1 < len(b_units) and hi + 1 in unmatched_b and b_units[hi + 1] == units[a]:
                hi += 1
            bound = _union_bound([observed[nonsil[j]] for j in range(lo, hi + 1)])
        elif kind is DysfluencyType.PROLONGATION and a in matched:
            bound = b_bound(matched[a])
        elif kind is DysfluencyType.SUBSTITUTION:
            t1, t2 = locus(a)  # anchor unit itself is unmatched in observed
            subs = [
                j
                for j in unmatched_b
                if (b_bound(j) is None or (b_bound(j).start >= t1 - 1e-9 and b_bound(j).end <= t2 + 1e-9))
            ]
            bound = _union_bound([observed[nonsil[j]] for j in subs]) if subs else None
            if bound is None:
                bound = frame_at((t1 + t2) / 2.0)
        elif kind is DysfluencyType.DELETION:
            t1, t2 = locus(a)
            bound = frame_at((t1 + t2) / 2.0)
        elif kind is DysfluencyType.PAUSE:
            t1, t2 = locus(a)
            sils = [
                k
                for k, t in enumerate(observed)
                if t.unit == SILENCE_UNIT
                and t.bound is not None
                and t.bound.start >= t1 - 1e-9
                and t.bound.end <= t2 + 1e-9
            ]
            bound = _union_bound([observed[k] for k in sils])
            if bound is None:
                bound = frame_at((t1 + t2) / 2.0)
        elif kind is DysfluencyType.INSERTION:
            t1, t2 = locus(a)
            ins = [
                j
                for j in unmatched_b
                if b_bound(j) is not None
                and b_bound(j).start >= t1 - 1e-9
                and b_bound(j).end <= t2 + 1e-9
            ]
            bound = _union_bound([observed[nonsil[j]] for j in ins])
            if bound is None:
                bound = frame_at((t1 + t2) / 2.0)
        if bound is None and a in matched:
            bound = b_bound(matched[a])
        out.append(DysfluencyEvent(kind, ev.level, a, ev.payload, bound))
    return out


def _events_from_spans(annotated, events, spans: list[WordSpan]):
    by_word = {s.word_index: s for s in spans}
    out = []
    for ev in events:
        kind, a = ev.kind, ev.anchor
        if kind in UNIT_ANCHORED:
            span = by_word.get(a)
            bound = span.bound if span else None
        else:
            left = by_word.get(a - 1)
            right = by_word.get(a)
            t1 = left.bound.end if left and left.bound else 0.0
            t2 = right.bound.start if right and right.bound else t1
            if kind is DysfluencyType.DELETION or t2 <= t1:
                mid = max((t1 + t2) / 2.0 - _HALF_FRAME, 0.0)
                bound = TimeBound(mid, mid + FRAME_S)
            else:
                bound = TimeBound(t1, t2)
        out.append(DysfluencyEvent(kind, ev.level, a, ev.payload, bound))
    return out


def read_alignment_file(path) -> list[TimedUnit]:
    """Read 'unit start end' triples, one per line, seconds."""
    units = []
    last_end = 0.0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise MalformedManifest(f"{path}: line {lineno}: expected 'unit start end'")
            unit, start_s, end_s = parts
            try:
                start, end = float(start_s), float(end_s)
                bound = TimeBound(start, end)
            except ValueError as exc:
                raise MalformedManifest(f"{path}: line {lineno}: {exc}") from exc
            if start < last_end - 1e-6:
                raise MalformedManifest(
                    f"{path}: line {lineno}: units must be time-ordered"
                )
            last_end = end
            units.append(TimedUnit(unit, bound))
    return units
