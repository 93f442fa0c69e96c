"""Line-delimited manifest and prediction records shared by all CLI stages.

One UTF-8 JSON object per line. The annotated-text string is the canonical
representation of events; anchors stored alongside must agree with it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .annotation import (
    AnnotatedSequence,
    AnnotationLevel,
    DysfluencyEvent,
    DysfluencyType,
    TimeBound,
    events_of,
    parse_annotated,
)
from .align import TimedUnit
from .errors import AnnotationError, MalformedManifest


@dataclass
class ManifestRecord:
    utterance_id: str
    level: AnnotationLevel
    reference_text: str
    annotated_text: str
    realized_units: tuple[str, ...] | None = None
    realized_durations_s: tuple[float, ...] | None = None
    ipa: tuple[str, ...] | None = None
    events: tuple[DysfluencyEvent, ...] = ()
    audio_path: str | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def reference_units(self) -> tuple[str, ...]:
        return tuple(self.reference_text.split())

    def timed_units(self) -> list[TimedUnit]:
        """Observed units with bounds laid out back-to-back from t=0."""
        if self.realized_units is None:
            return []
        if self.realized_durations_s is None:
            return [TimedUnit(u) for u in self.realized_units]
        t = 0.0
        out = []
        for u, d in zip(self.realized_units, self.realized_durations_s):
            out.append(TimedUnit(u, TimeBound(t, t + d)))
            t += d
        return out


@dataclass
class PredictionRecord:
    utterance_id: str
    annotated_text: str | None = None
    events: tuple[DysfluencyEvent, ...] = ()
    error: str | None = None


def event_to_json(ev: DysfluencyEvent) -> dict:
    return {
        "kind": ev.kind.value,
        "anchor": ev.anchor,
        "payload": list(ev.payload) if ev.payload is not None else None,
        "start_s": ev.bounds.start if ev.bounds else None,
        "end_s": ev.bounds.end if ev.bounds else None,
    }


def event_from_json(obj: dict, level: AnnotationLevel) -> DysfluencyEvent:
    bounds = None
    if obj.get("start_s") is not None and obj.get("end_s") is not None:
        bounds = TimeBound(obj["start_s"], obj["end_s"])
    payload = obj.get("payload")
    return DysfluencyEvent(
        DysfluencyType(obj["kind"]),
        level,
        int(obj["anchor"]),
        tuple(payload) if payload is not None else None,
        bounds,
    )


def record_to_json(rec: ManifestRecord) -> str:
    obj = {
        "utterance_id": rec.utterance_id,
        "level": rec.level.value,
        "reference_text": rec.reference_text,
        "annotated_text": rec.annotated_text,
        "realized_units": list(rec.realized_units) if rec.realized_units is not None else None,
        "realized_durations_s": list(rec.realized_durations_s)
        if rec.realized_durations_s is not None
        else None,
        "ipa": " ".join(rec.ipa) if rec.ipa is not None else None,
        "events": [event_to_json(e) for e in rec.events],
        "audio_path": rec.audio_path,
        "metadata": rec.metadata,
    }
    return json.dumps(obj, ensure_ascii=False)


def _record_from_obj(obj: dict) -> ManifestRecord:
    level = AnnotationLevel(obj["level"])
    events = tuple(event_from_json(e, level) for e in obj.get("events", []))
    annotated = parse_annotated(obj["annotated_text"], level)
    derived = events_of(annotated)
    if [(e.kind, e.anchor) for e in derived] != [(e.kind, e.anchor) for e in events]:
        raise MalformedManifest("events do not match annotated_text")
    realized = obj.get("realized_units")
    durations = obj.get("realized_durations_s")
    ipa = obj.get("ipa")
    return ManifestRecord(
        utterance_id=obj["utterance_id"],
        level=level,
        reference_text=obj["reference_text"],
        annotated_text=obj["annotated_text"],
        realized_units=tuple(realized) if realized is not None else None,
        realized_durations_s=tuple(durations) if durations is not None else None,
        ipa=tuple(ipa.split()) if ipa is not None else None,
        events=events,
        audio_path=obj.get("audio_path"),
        metadata=obj.get("metadata") or {},
    )


def write_manifest(records, path) -> None:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(record_to_json(rec))
            fh.write("\n")


def read_manifest(path) -> list[ManifestRecord]:
    records = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = _record_from_obj(json.loads(line))
            except (
                json.JSONDecodeError,
                KeyError,
                ValueError,
                AnnotationError,
                MalformedManifest,
            ) as exc:
                raise MalformedManifest(f"{path}: line {lineno}: {exc}") from exc
            if rec.utterance_id in seen:
                raise MalformedManifest(
                    f"{path}: line {lineno}: duplicate utterance_id {rec.utterance_id}"
                )
            seen.add(rec.utterance_id)
            records.append(rec)
    return records


def prediction_to_json(pred: PredictionRecord) -> str:
    return json.dumps(
        {
            "utterance_id": pred.utterance_id,
            "annotated_text": pred.annotated_text,
            "events": [event_to_json(e) for e in pred.events],
            "error": pred.error,
        },
        ensure_ascii=False,
    )


def write_predictions(preds, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in preds:
            fh.write(prediction_to_json(p))
            fh.write("\n")


def read_predictions(path, level: AnnotationLevel) -> list[PredictionRecord]:
    preds = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                events = tuple(
                    event_from_json(e, level) for e in obj.get("events", [])
                )
                preds.append(
                    PredictionRecord(
                        utterance_id=obj["utterance_id"],
                        annotated_text=obj.get("annotated_text"),
                        events=events,
                        error=obj.get("error"),
                    )
                )
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise MalformedManifest(f"{path}: line {lineno}: {exc}") from exc
    return preds
