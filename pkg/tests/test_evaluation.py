import json
import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quickcue.domain import ALL_PAIRS, Aspect, AspectSentimentPair, Sentiment
from quickcue.evaluation import (
    AnnotationScore,
    DuplicateScore,
    EmptyDataset,
    GoldAnnotation,
    ReviewMetrics,
    aggregate_annotations,
    evaluate_classifier,
    macro_average,
    pair_frequencies,
    per_review_prf,
)

DATA_DIR = Path(__file__).parent / "data"


def _pair(aspect, sentiment):
    return AspectSentimentPair(aspect, sentiment)


FOOD_POS = _pair(Aspect.FOOD, Sentiment.POSITIVE)
CS_NEG = _pair(Aspect.CUSTOMER_SERVICE, Sentiment.NEGATIVE)
PRICING_NEG = _pair(Aspect.PRICING, Sentiment.NEGATIVE)


def oracle_prf(predicted, gold):
    """Brute-force counting oracle in exact rational arithmetic."""
    tp = sum(1 for pair in ALL_PAIRS if pair in predicted and pair in gold)
    if predicted:
        precision = Fraction(tp, len(predicted))
    else:
        precision = Fraction(1) if not gold else Fraction(0)
    if gold:
        recall = Fraction(tp, len(gold))
    else:
        recall = Fraction(1) if not predicted else Fraction(0)
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1 = Fraction(0)
    return precision, recall, f1


# ---------------------------------------------------------------------------
# per_review_prf
# ---------------------------------------------------------------------------


def test_prf_identity():
    m = per_review_prf(frozenset({FOOD_POS}), frozenset({FOOD_POS}))
    assert (m.precision, m.recall, m.f1) == (1, 1, 1)


def test_prf_half_overlap():
    m = per_review_prf(frozenset({FOOD_POS, CS_NEG}), frozenset({FOOD_POS, PRICING_NEG}))
    assert (m.precision, m.recall, m.f1) == (0.5, 0.5, 0.5)


def test_prf_empty_prediction_nonempty_gold():
    m = per_review_prf(frozenset(), frozenset({FOOD_POS}))
    assert (m.precision, m.recall, m.f1) == (0, 0, 0)


def test_prf_both_empty_is_perfect():
    m = per_review_prf(frozenset(), frozenset())
    assert (m.precision, m.recall, m.f1) == (1, 1, 1)


def test_prf_nonempty_prediction_empty_gold():
    m = per_review_prf(frozenset({FOOD_POS}), frozenset())
    assert (m.precision, m.recall, m.f1) == (0, 0, 0)


def test_prf_matches_oracle_on_random_instances():
    rng = random.Random(20268)
    for _ in range(200):
        predicted = frozenset(rng.sample(ALL_PAIRS, rng.randint(0, 10)))
        gold = frozenset(rng.sample(ALL_PAIRS, rng.randint(0, 10)))
        m = per_review_prf(predicted, gold)
        p, r, f = oracle_prf(predicted, gold)
        assert abs(m.precision - p) <= 1e-12
        assert abs(m.recall - r) <= 1e-12
        assert abs(m.f1 - f) <= 1e-12


@given(
    st.frozensets(st.sampled_from(list(ALL_PAIRS)), max_size=10),
    st.frozensets(st.sampled_from(list(ALL_PAIRS)), max_size=10),
)
def test_prf_swap_symmetry(predicted, gold):
    assert per_review_prf(predicted, gold).precision == per_review_prf(gold, predicted).recall


@given(
    st.frozensets(st.sampled_from(list(ALL_PAIRS)), max_size=10),
    st.frozensets(st.sampled_from(list(ALL_PAIRS)), max_size=10),
)
def test_prf_outputs_in_unit_interval(predicted, gold):
    m = per_review_prf(predicted, gold)
    assert 0 <= m.precision <= 1
    assert 0 <= m.recall <= 1
    assert 0 <= m.f1 <= 1


# ---------------------------------------------------------------------------
# macro_average
# ---------------------------------------------------------------------------


def test_macro_average_two_points():
    out = macro_average([ReviewMetrics(1, 1, 1), ReviewMetrics(0.5, 0.5, 0.5)])
    assert (out.precision, out.recall, out.f1) == (0.75, 0.75, 0.75)


def test_macro_average_single_element():
    m = ReviewMetrics(0.3, 0.6, 0.4)
    assert macro_average([m]) == m


def test_macro_average_empty_raises():
    with pytest.raises(EmptyDataset):
        macro_average([])


def test_macro_average_matches_second_pass_accumulation():
    rng = random.Random(99)
    metrics = [
        ReviewMetrics(rng.random(), rng.random(), rng.random()) for _ in range(50)
    ]
    out = macro_average(metrics)
    # Independent accumulation in reverse order.
    totals = [0.0, 0.0, 0.0]
    for m in reversed(metrics):
        totals[0] += m.precision
        totals[1] += m.recall
        totals[2] += m.f1
    assert abs(out.precision - totals[0] / 50) <= 1e-12
    assert abs(out.recall - totals[1] / 50) <= 1e-12
    assert abs(out.f1 - totals[2] / 50) <= 1e-12


def test_macro_average_permutation_invariant():
    rng = random.Random(5)
    metrics = [ReviewMetrics(rng.random(), rng.random(), rng.random()) for _ in range(10)]
    shuffled = metrics.copy()
    rng.shuffle(shuffled)
    a, b = macro_average(metrics), macro_average(shuffled)
    assert abs(a.precision - b.precision) <= 1e-12
    assert abs(a.f1 - b.f1) <= 1e-12


def test_macro_average_of_identical_inputs_reproduces_them():
    m = ReviewMetrics(0.25, 0.75, 0.375)
    assert macro_average([m] * 7) == m


# ---------------------------------------------------------------------------
# evaluate_classifier
# ---------------------------------------------------------------------------


def test_evaluate_identical_predictions():
    gold = [
        GoldAnnotation("r1", frozenset({FOOD_POS})),
        GoldAnnotation("r2", frozenset({CS_NEG, PRICING_NEG})),
    ]
    report = evaluate_classifier(gold, {"r1": gold[0].gold_pairs, "r2": gold[1].gold_pairs})
    assert (report.macro.precision, report.macro.recall, report.macro.f1) == (1, 1, 1)
    assert report.review_count == 2


def test_evaluate_missing_prediction_treated_as_empty():
    gold = [GoldAnnotation("r1", frozenset({FOOD_POS}))]
    report = evaluate_classifier(gold, {})
    assert report.missing_predictions == ("r1",)
    assert report.macro.precision == 0


def test_evaluate_empty_gold_raises():
    with pytest.raises(EmptyDataset):
        evaluate_classifier([], {})


REFERENCE_FREQUENCIES = {
    ("Food", "Negative"): 24,
    ("Food", "Positive"): 27,
    ("Customer Service", "Negative"): 10,
    ("Customer Service", "Positive"): 15,
    ("Pricing", "Negative"): 9,
    ("Pricing", "Positive"): 8,
    ("Ambiance", "Negative"): 5,
    ("Ambiance", "Positive"): 12,
    ("Hygiene", "Negative"): 6,
    ("Hygiene", "Positive"): 5,
}


def synthetic_gold_with_reference_frequencies():
    """50 reviews whose pair frequencies equal the reference table: each pair
    is spread over distinct reviews round-robin."""
    pair_sets = [set() for _ in range(50)]
    offset = 0
    for (aspect, sentiment), count in REFERENCE_FREQUENCIES.items():
        pair = _pair(
            next(a for a in Aspect if a.value == aspect),
            next(s for s in Sentiment if s.value == sentiment),
        )
        for i in range(count):
            pair_sets[(offset + i) % 50].add(pair)
        offset += count
    return [GoldAnnotation(f"r{i}", frozenset(ps)) for i, ps in enumerate(pair_sets)]


def test_frequency_table_reproduces_reference_breakdown():
    gold = synthetic_gold_with_reference_frequencies()
    table = pair_frequencies(gold)
    for pair, count in table.items():
        assert count == REFERENCE_FREQUENCIES[(pair.aspect.value, pair.sentiment.value)]
    assert sum(table.values()) == 121


def test_evaluate_fixture_corpus_against_hand_computed_values(engine, mock_gateway, fixture_corpus):
    """Mock classifier vs hand-annotated fixture gold; expected macro values
    worked out by hand (fractions 5/6, 11/12, 5/6)."""
    from quickcue.pipeline import classify_all
    from quickcue.wire import gold_from_records

    gold = gold_from_records(
        json.loads((DATA_DIR / "fixture_gold.json").read_text(encoding="utf-8"))
    )
    run = classify_all(fixture_corpus, mock_gateway, engine)
    predictions = {c.review.id: c.pairs for c in run.classified}
    report = evaluate_classifier(gold, predictions)
    assert abs(report.macro.precision - 5 / 6) <= 1e-12
    assert abs(report.macro.recall - 11 / 12) <= 1e-12
    assert abs(report.macro.f1 - 5 / 6) <= 1e-12


# ---------------------------------------------------------------------------
# aggregate_annotations
# ---------------------------------------------------------------------------


def _score(example, annotator, factuality, noisiness=5):
    return AnnotationScore(example, annotator, factuality, noisiness)


def test_aggregate_balanced_example():
    scores = [
        _score("A", "a1", 8),
        _score("A", "a2", 10),
        _score("B", "a1", 6),
        _score("B", "a2", 8),
    ]
    factuality, _ = aggregate_annotations(scores)
    assert factuality == 8


def test_aggregate_single_score_identity():
    factuality, noisiness = aggregate_annotations([_score("A", "a1", 7, 3)])
    assert (factuality, noisiness) == (7, 3)


def test_aggregate_unbalanced_average_of_averages():
    scores = [
        _score("A", "a1", 10),
        _score("B", "a1", 2),
        _score("B", "a2", 2),
        _score("B", "a3", 2),
    ]
    factuality, _ = aggregate_annotations(scores)
    # Average of averages: (10 + 2) / 2 = 6.0.
    assert factuality == 6.0
    # The pooled mean would be (10 + 2 + 2 + 2) / 4 = 4.0; prove we did not
    # compute that.
    pooled = sum(s.factuality for s in scores) / len(scores)
    assert pooled == 4.0
    assert factuality != pooled


def test_aggregate_duplicate_raises():
    with pytest.raises(DuplicateScore):
        aggregate_annotations([_score("A", "a1", 5), _score("A", "a1", 6)])


def test_aggregate_empty_raises():
    with pytest.raises(EmptyDataset):
        aggregate_annotations([])


def test_annotation_score_bounds():
    with pytest.raises(ValueError):
        AnnotationScore("A", "a1", 0, 5)
    with pytest.raises(ValueError):
        AnnotationScore("A", "a1", 5, 11)


@given(
    st.dictionaries(
        st.text(min_size=1, max_size=3),
        st.lists(st.integers(min_value=1, max_value=10), min_size=1, max_size=5),
        min_size=1,
        max_size=8,
    )
)
def test_aggregate_stays_in_range(by_example):
    scores = [
        _score(example, f"a{i}", value, value)
        for example, values in by_example.items()
        for i, value in enumerate(values)
    ]
    factuality, noisiness = aggregate_annotations(scores)
    assert 1 <= factuality <= 10
    assert 1 <= noisiness <= 10
