import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import edit_distance_dp

from dysflux.annotation import AnnotationLevel, DysfluencyEvent, DysfluencyType, TimeBound
from dysflux.errors import (
    EmptyEvalSet,
    EmptyGroup,
    EmptyReference,
    LengthMismatch,
    NoDysfluentInstances,
    NoMatchedPairs,
)
from dysflux.metrics import (
    EvalReport,
    UtteranceEval,
    bound_loss,
    build_report,
    cacc,
    eacc,
    match_events,
    ter,
    token_distance,
)

WORD = AnnotationLevel.WORD


def ev(kind, anchor, bounds=None):
    return DysfluencyEvent(kind, WORD, anchor, None, bounds)


REP = DysfluencyType.REPETITION
DEL = DysfluencyType.DELETION


def test_ter_examples():
    assert ter("abc", "abc") == 0
    assert ter(["a", "b", "c"], ["a", "x", "c"]) == pytest.approx(1 / 3)
    assert ter(["a", "b", "c", "d"], ["a", "b", "c", "d", "e"]) == 0.25
    with pytest.raises(EmptyReference):
        ter([], ["a"])


def test_ter_against_oracle():
    rng = np.random.default_rng(2)
    for _ in range(300):
        a = [int(x) for x in rng.integers(0, 10, rng.integers(1, 21))]
        b = [int(x) for x in rng.integers(0, 10, rng.integers(0, 21))]
        assert ter(a, b) == edit_distance_dp(a, b) / len(a)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=1, max_size=12), st.lists(st.integers(0, 5), max_size=12))
def test_ter_zero_iff_equal(a, b):
    assert (ter(a, b) == 0) == (a == b)


def _presence_eval(n_true, n_pred):
    return UtteranceEval(
        tuple(ev(REP, i) for i in range(n_true)),
        tuple(ev(REP, i) for i in range(n_pred)),
        reference_length=10,
    )


def test_eacc_examples():
    assert eacc([_presence_eval(0, 0)] * 4) == 1.0
    evals = [_presence_eval(1, 1)] * 3 + [_presence_eval(1, 0)]
    assert eacc(evals) == 0.75
    assert eacc([_presence_eval(1, 0)] * 5) == 0.0
    with pytest.raises(EmptyEvalSet):
        eacc([])


def test_eacc_invariant_under_reordering():
    evals = [_presence_eval(1, 1), _presence_eval(0, 1), _presence_eval(1, 0)]
    assert eacc(evals) == eacc(list(reversed(evals)))


def test_match_events_greedy_nearest():
    true = (ev(REP, 2), ev(DEL, 8))
    pred = (ev(DEL, 7), ev(REP, 3))
    assert match_events(true, pred) == [(0, 1), (1, 0)]


def test_match_events_tie_prefers_earlier_true():
    true = (ev(REP, 2), ev(REP, 4))
    pred = (ev(REP, 3),)
    assert match_events(true, pred) == [(0, 0)]


def test_cacc_examples():
    perfect = [UtteranceEval((ev(REP, 1),), (ev(REP, 1),), 10)] * 5
    assert cacc(perfect) == 1.0
    mixed = [UtteranceEval((ev(REP, 1),), (ev(REP, 1),), 10)] * 7
    mixed += [UtteranceEval((ev(REP, 1),), (ev(DEL, 1),), 10)] * 3
    assert cacc(mixed) == 0.7
    missing = [UtteranceEval((ev(REP, 1),), (), 10)]
    assert cacc(missing) == 0.0
    with pytest.raises(NoDysfluentInstances):
        cacc([UtteranceEval((), (), 10)])


def test_token_distance_examples():
    exact = [UtteranceEval((ev(REP, 4),), (ev(REP, 4),), 100)]
    assert token_distance(exact) == 0.0
    off_by_one = [UtteranceEval((ev(REP, 4),), (ev(REP, 5),), 100)]
    assert token_distance(off_by_one) == pytest.approx(0.01)  # 10 x 1e-3
    two = [
        UtteranceEval((ev(REP, 10),), (ev(REP, 10),), 50),
        UtteranceEval((ev(REP, 10),), (ev(REP, 12),), 50),
    ]
    assert token_distance(two) == pytest.approx(0.02)
    with pytest.raises(NoMatchedPairs):
        token_distance([UtteranceEval((ev(REP, 1),), (), 10)])


def test_token_distance_never_increases_with_exact_pairs():
    base = [UtteranceEval((ev(REP, 4),), (ev(REP, 6),), 100)]
    more = base + [UtteranceEval((ev(REP, 3),), (ev(REP, 3),), 100)]
    assert token_distance(more) <= token_distance(base)


def test_bound_loss_identical_is_zero():
    bounds = [TimeBound(0.2, 0.48), TimeBound(1.0, 1.8)]
    assert bound_loss(bounds, bounds) == 0.0


def test_bound_loss_uniform_one_frame_shift():
    truth = [TimeBound(0.20, 0.60), TimeBound(1.00, 1.40)]
    pred = [TimeBound(0.22, 0.62), TimeBound(1.02, 1.42)]
    assert bound_loss(pred, truth) == pytest.approx(20.0)


def test_bound_loss_mixed_frame_errors():
    truth = [TimeBound(1.00, 2.00)]
    pred = [TimeBound(1.02, 2.04)]  # 1 frame and 2 frames off
    assert bound_loss(pred, truth) == pytest.approx(math.sqrt(2.5) * 20.0)


def test_bound_loss_errors():
    with pytest.raises(LengthMismatch):
        bound_loss([TimeBound(0, 1)], [])
    with pytest.raises(LengthMismatch):
        bound_loss([], [])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 10), st.floats(0.05, 5)), min_size=1, max_size=6))
def test_bound_loss_symmetric_and_zero_iff_quantized_equal(raw):
    pred = [TimeBound(s, s + d) for s, d in raw]
    truth = [TimeBound(s + 0.004, s + d + 0.004) for s, d in raw]  # sub-frame jitter
    assert bound_loss(pred, truth) == bound_loss(truth, pred)
    frames = lambda t: math.floor(t / 0.02 + 0.5)
    same = all(
        frames(p.start) == frames(t.start) and frames(p.end) == frames(t.end)
        for p, t in zip(pred, truth)
    )
    assert (bound_loss(pred, truth) == 0.0) == same


def test_build_report_perfect_single_group():
    evals = [
        UtteranceEval((ev(REP, 1),), (ev(REP, 1),), 10, (1, 2, 3), (1, 2, 3))
        for _ in range(4)
    ]
    report = build_report({REP: evals})
    row = report.rows[0]
    assert (row.ter_pct, row.eacc_pct, row.cacc_pct, row.td_e3) == (0.0, 100.0, 100.0, 0.0)


def test_build_report_row_order():
    kinds = (
        DysfluencyType.REPETITION,
        DysfluencyType.DELETION,
        DysfluencyType.INSERTION,
        DysfluencyType.PAUSE,
    )
    groups = {
        k: [UtteranceEval((ev(k, 1),), (ev(k, 1),), 10)] for k in reversed(kinds)
    }
    report = build_report(groups)
    assert [r.label for r in report.rows[:-1]] == [k.value for k in kinds]
    assert report.rows[-1].label == "overall"


def test_build_report_bl_column_only_with_bounds():
    no_bounds = build_report({REP: [UtteranceEval((ev(REP, 1),), (ev(REP, 1),), 10)]})
    assert not no_bounds.has_bl
    assert "BL" not in no_bounds.to_text()
    b = TimeBound(0.1, 0.5)
    with_bounds = build_report(
        {REP: [UtteranceEval((ev(REP, 1, b),), (ev(REP, 1, b),), 10)]}
    )
    assert with_bounds.has_bl
    assert with_bounds.rows[0].bl_ms == 0.0


def test_build_report_empty_group_raises():
    with pytest.raises(EmptyGroup):
        build_report({})


def test_report_jsonl_one_row_per_line():
    report = build_report({REP: [UtteranceEval((ev(REP, 1),), (ev(REP, 1),), 10)]})
    lines = report.to_jsonl().strip().splitlines()
    assert len(lines) == len(report.rows)
