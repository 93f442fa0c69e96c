"""Evaluation metrics: token error rate, presence/class accuracy, token
distance, and time-bound loss, plus the per-type report builder."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .annotation import DysfluencyEvent, DysfluencyType, TimeBound
from .errors import (
    EmptyEvalSet,
    EmptyGroup,
    EmptyReference,
    LengthMismatch,
    NoDysfluentInstances,
    NoMatchedPairs,
)
from .kernels import levenshtein

FRAME_MS = 20.0

# Table row order: word-level types first, then the phoneme-only types.
REPORT_TYPE_ORDER = (
    DysfluencyType.REPETITION,
    DysfluencyType.DELETION,
    DysfluencyType.INSERTION,
    DysfluencyType.PAUSE,
    DysfluencyType.SUBSTITUTION,
    DysfluencyType.PROLONGATION,
)


@dataclass(frozen=True)
class UtteranceEval:
    """Ground truth and prediction for one utterance.

    Token sequences are optional; when present they feed the TER column.
    Time bounds ride on the events themselves.
    """

    true_events: tuple[DysfluencyEvent, ...]
    predicted_events: tuple[DysfluencyEvent, ...]
    reference_length: int
    reference_tokens: tuple[int, ...] | None = None
    hypothesis_tokens: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.reference_length < 1:
            raise EmptyReference("reference token length must be >= 1")


def ter(reference, hypothesis) -> float:
    """(substitutions + deletions + insertions) / reference length."""
    reference = list(reference)
    hypothesis = list(hypothesis)
    if not reference:
        raise EmptyReference("empty reference")
    ids: dict = {}
    a = [ids.setdefault(u, len(ids)) for u in reference]
    b = [ids.setdefault(u, len(ids)) for u in hypothesis]
    return levenshtein(a, b) / len(reference)


def eacc(evals) -> float:
    """Fraction of utterances whose dysfluency presence was called correctly."""
    evals = list(evals)
    if not evals:
        raise EmptyEvalSet("no utterances to evaluate")
    hits = sum(
        (len(e.true_events) > 0) == (len(e.predicted_events) > 0) for e in evals
    )
    return hits / len(evals)


def match_events(true_events, predicted_events) -> list[tuple[int, int]]:
    """Greedy nearest-anchor matching; ties go to the earlier true event."""
    cands = sorted(
        (abs(p.anchor - t.anchor), ti, pi)
        for ti, t in enumerate(true_events)
        for pi, p in enumerate(predicted_events)
    )
    used_t: set[int] = set()
    used_p: set[int] = set()
    pairs = []
    for _, ti, pi in cands:
        if ti in used_t or pi in used_p:
            continue
        pairs.append((ti, pi))
        used_t.add(ti)
        used_p.add(pi)
    return pairs


def _instance_outcomes(evals, kind: DysfluencyType | None):
    """Yield (true_event, matched_predicted_event_or_None, eval) per instance."""
    for ev in evals:
        matched = dict(match_events(ev.true_events, ev.predicted_events))
        for ti, t in enumerate(ev.true_events):
            if kind is not None and t.kind is not kind:
                continue
            pi = matched.get(ti)
            yield t, (ev.predicted_events[pi] if pi is not None else None), ev


def cacc(evals, kind: DysfluencyType | None = None) -> float:
    """Fraction of true instances whose matched prediction has the same type.

    Instances with no matched prediction count as incorrect.
    """
    outcomes = list(_instance_outcomes(evals, kind))
    if not outcomes:
        raise NoDysfluentInstances("no true dysfluent instances")
    hits = sum(p is not None and p.kind is t.kind for t, p, _ in outcomes)
    return hits / len(outcomes)


def token_distance(evals, kind: DysfluencyType | None = None) -> float:
    """Mean anchor displacement of matched pairs, normalized by reference length."""
    disps = [
        abs(p.anchor - t.anchor) / ev.reference_length
        for t, p, ev in _instance_outcomes(evals, kind)
        if p is not None
    ]
    if not disps:
        raise NoMatchedPairs("no matched true/predicted event pairs")
    return sum(disps) / len(disps)


def _frame(t: float) -> int:
    return math.floor(t / (FRAME_MS / 1000.0) + 0.5)


def bound_loss(pred: list[TimeBound], truth: list[TimeBound]) -> float:
    """RMS boundary error in milliseconds on the 20 ms frame grid."""
    if len(pred) != len(truth) or not pred:
        raise LengthMismatch(f"{len(pred)} predicted vs {len(truth)} true bounds")
    sq = 0
    for p, t in zip(pred, truth):
        sq += (_frame(p.start) - _frame(t.start)) ** 2
        sq += (_frame(p.end) - _frame(t.end)) ** 2
    return math.sqrt(sq / (2 * len(pred))) * FRAME_MS


@dataclass(frozen=True)
class ReportRow:
    label: str
    n_utterances: int
    n_instances: int
    ter_pct: float | None
    eacc_pct: float
    cacc_pct: float | None
    td_e3: float | None
    bl_ms: float | None


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[ReportRow, ...]

    @property
    def has_bl(self) -> bool:
        return any(r.bl_ms is not None for r in self.rows)

    def to_text(self) -> str:
        headers = ["type", "n", "TER %", "EAcc %", "CAcc %", "TD (e-3)"]
        if self.has_bl:
            headers.append("BL (ms)")
        table = [headers]
        for r in self.rows:
            cells = [
                r.label,
                str(r.n_utterances),
                _fmt(r.ter_pct, 3),
                _fmt(r.eacc_pct, 2),
                _fmt(r.cacc_pct, 2),
                _fmt(r.td_e3, 2),
            ]
            if self.has_bl:
                cells.append(_fmt(r.bl_ms, 1))
            table.append(cells)
        widths = [max(len(row[c]) for row in table) for c in range(len(headers))]
        lines = []
        for row in table:
            lines.append(
                "  ".join(
                    cell.ljust(widths[c]) if c == 0 else cell.rjust(widths[c])
                    for c, cell in enumerate(row)
                )
            )
        return "\n".join(lines)

    def to_jsonl(self) -> str:
        lines = []
        for r in self.rows:
            lines.append(
                json.dumps(
                    {
                        "type": r.label,
                        "n_utterances": r.n_utterances,
                        "n_instances": r.n_instances,
                        "ter_pct": r.ter_pct,
                        "eacc_pct": r.eacc_pct,
                        "cacc_pct": r.cacc_pct,
                        "td_e3": r.td_e3,
                        "bl_ms": r.bl_ms,
                    },
                    ensure_ascii=False,
                )
            )
        return "\n".join(lines) + "\n"


def _fmt(value: float | None, digits: int) -> str:
    return "--" if value is None else f"{value:.{digits}f}"


def _pooled_ter(evals) -> float | None:
    edits = 0
    length = 0
    for e in evals:
        if e.reference_tokens is None or e.hypothesis_tokens is None:
            continue
        edits += levenshtein(e.reference_tokens, e.hypothesis_tokens)
        length += len(e.reference_tokens)
    if length == 0:
        return None
    return 100.0 * edits / length


def _make_row(label: str, evals, kind: DysfluencyType | None) -> ReportRow:
    if not evals:
        raise EmptyGroup(label)
    outcomes = list(_instance_outcomes(evals, kind))
    n_instances = len(outcomes)
    cacc_pct = None
    if n_instances:
        hits = sum(p is not None and p.kind is t.kind for t, p, _ in outcomes)
        cacc_pct = 100.0 * hits / n_instances
    td_e3 = None
    disps = [
        abs(p.anchor - t.anchor) / ev.reference_length
        for t, p, ev in outcomes
        if p is not None
    ]
    if disps:
        td_e3 = 1000.0 * sum(disps) / len(disps)
    bl_ms = None
    bound_pairs = [
        (p.bounds, t.bounds)
        for t, p, _ in outcomes
        if p is not None and p.bounds is not None and t.bounds is not None
    ]
    if bound_pairs:
        bl_ms = bound_loss([p for p, _ in bound_pairs], [t for _, t in bound_pairs])
    return ReportRow(
        label=label,
        n_utterances=len(evals),
        n_instances=n_instances,
        ter_pct=_pooled_ter(evals),
        eacc_pct=100.0 * eacc(evals),
        cacc_pct=cacc_pct,
        td_e3=td_e3,
        bl_ms=bl_ms,
    )


def build_report(groups, overall=None) -> EvalReport:
    """Per-type rows (fixed order) plus an aggregate row.

    ``groups`` maps DysfluencyType to the evals containing that type;
    ``overall`` is the full utterance set for the aggregate row and defaults
    to the concatenation of the groups.
    """
    if not groups and not overall:
        raise EmptyGroup("no evaluation groups")
    rows = []
    for kind in REPORT_TYPE_ORDER:
        evals = groups.get(kind)
        if evals:
            rows.append(_make_row(kind.value, evals, kind))
    if overall is None:
        overall = [e for kind in REPORT_TYPE_ORDER for e in groups.get(kind, [])]
    if overall:
        rows.append(_make_row("overall", overall, None))
    return EvalReport(tuple(rows))
