"""Dysfluency event model and the marker-annotated transcript grammar.

An annotated transcript is a whitespace-delimited string of canonical units
(words or phonemes) interleaved with bracketed marker tokens. A marker is
written immediately after the unit it affects; [DEL], [PAU] and [INS] sit in
the inter-unit slot where material was removed, paused, or added. Deleted
units do not appear in the annotated text (the [DEL] marker holds their slot);
inserted material does not appear either.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import (
    EmptyInput,
    IllegalMarkerForLevel,
    MarkerAtStart,
    UnknownMarker,
)


class AnnotationLevel(Enum):
    WORD = "word"
    PHONEME = "phoneme"


class DysfluencyType(Enum):
    REPETITION = "repetition"
    DELETION = "deletion"
    INSERTION = "insertion"
    PAUSE = "pause"
    SUBSTITUTION = "substitution"
    PROLONGATION = "prolongation"


MARKER_TEXT = {
    DysfluencyType.REPETITION: "[REP]",
    DysfluencyType.DELETION: "[DEL]",
    DysfluencyType.INSERTION: "[INS]",
    DysfluencyType.PAUSE: "[PAU]",
    DysfluencyType.SUBSTITUTION: "[SUB]",
    DysfluencyType.PROLONGATION: "[PRO]",
}
MARKER_TYPE = {text: kind for kind, text in MARKER_TEXT.items()}

WORD_TYPES = frozenset(
    {
        DysfluencyType.REPETITION,
        DysfluencyType.DELETION,
        DysfluencyType.INSERTION,
        DysfluencyType.PAUSE,
    }
)
PHONEME_TYPES = frozenset(
    {
        DysfluencyType.REPETITION,
        DysfluencyType.DELETION,
        DysfluencyType.SUBSTITUTION,
        DysfluencyType.PROLONGATION,
    }
)

# Markers that follow the unit they affect; all others mark an inter-unit slot.
UNIT_ANCHORED = frozenset(
    {
        DysfluencyType.REPETITION,
        DysfluencyType.SUBSTITUTION,
        DysfluencyType.PROLONGATION,
    }
)


def legal_types(level: AnnotationLevel) -> frozenset[DysfluencyType]:
    return WORD_TYPES if level is AnnotationLevel.WORD else PHONEME_TYPES


@dataclass(frozen=True)
class TimeBound:
    """A (start, end) interval in seconds, end strictly after start."""

    start: float
    end: float

    def __post_init__(self):
        if not (self.start >= 0.0 and self.end > self.start):
            raise ValueError(f"invalid time bound ({self.start}, {self.end})")
        if not (self.start < float("inf") and self.end < float("inf")):
            raise ValueError("time bound must be finite")

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass(frozen=True)
class DysfluencyEvent:
    """One dysfluency: its type, level, anchor position, and optional detail.

    ``anchor`` indexes the affected unit for repetition / substitution /
    prolongation, and the inter-unit slot for deletion / insertion / pause.
    ``payload`` carries repeated, inserted, or substituted material when known.
    """

    kind: DysfluencyType
    level: AnnotationLevel
    anchor: int
    payload: tuple[str, ...] | None = None
    bounds: TimeBound | None = None


@dataclass(frozen=True)
class AnnotatedSequence:
    """Canonical units plus (kind, slot) marker pairs, slot in [0, len(units)]."""

    level: AnnotationLevel
    units: tuple[str, ...]
    markers: tuple[tuple[DysfluencyType, int], ...] = ()

    def __post_init__(self):
        for kind, slot in self.markers:
            if not 0 <= slot <= len(self.units):
                raise ValueError(f"marker slot {slot} out of range")
            if kind in UNIT_ANCHORED and slot == 0:
                raise MarkerAtStart(MARKER_TEXT[kind])


def parse_annotated(text: str, level: AnnotationLevel) -> AnnotatedSequence:
    """Parse a whitespace-delimited annotated transcript.

    Bracketed tokens must be one of the six marker forms and legal at
    ``level``; everything else is a canonical unit.
    """
    tokens = text.split()
    if not tokens:
        raise EmptyInput("annotated text is empty")
    units: list[str] = []
    markers: list[tuple[DysfluencyType, int]] = []
    allowed = legal_types(level)
    for tok in tokens:
        if tok.startswith("[") and tok.endswith("]"):
            kind = MARKER_TYPE.get(tok)
            if kind is None:
                raise UnknownMarker(tok)
            if kind not in allowed:
                raise IllegalMarkerForLevel(f"{tok} at {level.value} level")
            markers.append((kind, len(units)))
        else:
            units.append(tok)
    return AnnotatedSequence(level, tuple(units), tuple(markers))


def render_annotated(seq: AnnotatedSequence) -> str:
    """Inverse of :func:`parse_annotated`."""
    by_slot: dict[int, list[DysfluencyType]] = {}
    for kind, slot in seq.markers:
        by_slot.setdefault(slot, []).append(kind)
    out: list[str] = []
    for i in range(len(seq.units) + 1):
        out.extend(MARKER_TEXT[k] for k in by_slot.get(i, ()))
        if i < len(seq.units):
            out.append(seq.units[i])
    return " ".join(out)


def events_of(seq: AnnotatedSequence) -> list[DysfluencyEvent]:
    """One event per marker, ordered by slot.

    Unit-anchored markers yield anchor = slot - 1; slot-anchored markers
    ([DEL]/[PAU]/[INS]) yield anchor = slot.
    """
    ordered = sorted(enumerate(seq.markers), key=lambda im: (im[1][1], im[0]))
    events = []
    for _, (kind, slot) in ordered:
        anchor = slot - 1 if kind in UNIT_ANCHORED else slot
        events.append(DysfluencyEvent(kind, seq.level, anchor))
    return events


@dataclass(frozen=True)
class EventSpec:
    """An event located in reference coordinates, before deletion shifts.

    ``position`` is the affected unit index for unit-anchored kinds and for
    deletion, and the inter-unit slot for insertion / pause.
    """

    kind: DysfluencyType
    position: int


def annotate(
    reference_units: list[str] | tuple[str, ...],
    level: AnnotationLevel,
    specs: list[EventSpec],
) -> AnnotatedSequence:
    """Build the annotated sequence for events given in reference coordinates.

    Deleted units are dropped from the output and every marker slot is shifted
    left past earlier deletions, so round-tripping through ``events_of`` gives
    anchors in the annotated sequence's own coordinate system.
    """
    deleted = sorted(
        s.position for s in specs if s.kind is DysfluencyType.DELETION
    )
    units = tuple(
        u for i, u in enumerate(reference_units) if i not in set(deleted)
    )

    def shifted(ref_slot: int) -> int:
        return ref_slot - sum(1 for d in deleted if d < ref_slot)

    markers = []
    for spec in specs:
        ref_slot = (
            spec.position + 1 if spec.kind in UNIT_ANCHORED else spec.position
        )
        markers.append((spec.kind, shifted(ref_slot), len(markers)))
    markers.sort(key=lambda m: (m[1], m[2]))
    return AnnotatedSequence(level, units, tuple((k, s) for k, s, _ in markers))
