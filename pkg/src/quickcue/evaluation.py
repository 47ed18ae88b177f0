"""Classifier and summary-quality metrics.

Classification scores are macro-averaged per review: precision/recall/F1 are
computed for each review's predicted pair set against gold, then each field
is averaged arithmetically (the aggregate F1 is the mean of per-review F1s,
not recomputed from aggregate P and R). Human annotation scores aggregate as
the average of per-example averages, which intentionally differs from the
pooled mean when annotator counts vary per example.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from typing import FrozenSet, List, Mapping, Sequence, Tuple

from .domain import ALL_PAIRS, AspectSentimentPair


class EmptyDataset(ValueError):
    pass


class DuplicateScore(ValueError):
    pass


@dataclass(frozen=True)
class GoldAnnotation:
    review_id: str
    gold_pairs: FrozenSet[AspectSentimentPair]

    def __post_init__(self) -> None:
        object.__setattr__(self, "gold_pairs", frozenset(self.gold_pairs))


@dataclass(frozen=True)
class ReviewMetrics:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class AnnotationScore:
    example_id: str
    annotator_id: str
    factuality: int
    noisiness: int

    def __post_init__(self) -> None:
        for name in ("factuality", "noisiness"):
            value = getattr(self, name)
            if not 1 <= value <= 10:
                raise ValueError(f"{name} must be in 1..10, got {value}")


def per_review_prf(
    predicted: FrozenSet[AspectSentimentPair], gold: FrozenSet[AspectSentimentPair]
) -> ReviewMetrics:
    """Precision, recall, F1 of one review's predicted pair set.

    Empty-set conventions: both empty scores perfect (a correctly predicted
    no-pair review is not penalized); one side empty scores zero.
    """
    predicted = frozenset(predicted)
    gold = frozenset(gold)
    tp = len(predicted & gold)
    if not predicted:
        precision = 1.0 if not gold else 0.0
    else:
        precision = tp / len(predicted)
    if not gold:
        recall = 1.0 if not predicted else 0.0
    else:
        recall = tp / len(gold)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return ReviewMetrics(precision, recall, f1)


def macro_average(per_review: Sequence[ReviewMetrics]) -> ReviewMetrics:
    """Field-wise arithmetic mean across reviews."""
    if not per_review:
        raise EmptyDataset("cannot average an empty metrics list")
    n = len(per_review)
    return ReviewMetrics(
        precision=sum(m.precision for m in per_review) / n,
        recall=sum(m.recall for m in per_review) / n,
        f1=sum(m.f1 for m in per_review) / n,
    )


def pair_frequencies(gold: Sequence[GoldAnnotation]) -> "OrderedDict[AspectSentimentPair, int]":
    """How many gold reviews carry each of the 10 pairs, canonical order."""
    table: "OrderedDict[AspectSentimentPair, int]" = OrderedDict(
        (pair, 0) for pair in ALL_PAIRS
    )
    for annotation in gold:
        for pair in annotation.gold_pairs:
            table[pair] += 1
    return table


@dataclass(frozen=True)
class EvalReport:
    macro: ReviewMetrics
    per_review: Tuple[Tuple[str, ReviewMetrics], ...]
    frequencies: Mapping[AspectSentimentPair, int]
    missing_predictions: Tuple[str, ...]

    @property
    def review_count(self) -> int:
        return len(self.per_review)


def evaluate_classifier(
    gold: Sequence[GoldAnnotation],
    predictions: Mapping[str, FrozenSet[AspectSentimentPair]],
) -> EvalReport:
    """Score predictions against a gold set. A gold review without a
    prediction entry is treated as predicted-empty and reported."""
    if not gold:
        raise EmptyDataset("gold set is empty")
    per_review: List[Tuple[str, ReviewMetrics]] = []
    missing: List[str] = []
    for annotation in gold:
        if annotation.review_id in predictions:
            predicted = frozenset(predictions[annotation.review_id])
        else:
            predicted = frozenset()
            missing.append(annotation.review_id)
        per_review.append(
            (annotation.review_id, per_review_prf(predicted, annotation.gold_pairs))
        )
    return EvalReport(
        macro=macro_average([m for _, m in per_review]),
        per_review=tuple(per_review),
        frequencies=pair_frequencies(gold),
        missing_predictions=tuple(missing),
    )


def aggregate_annotations(scores: Sequence[AnnotationScore]) -> Tuple[float, float]:
    """(factuality, noisiness) overall scores: mean across annotators per
    example first, then the unweighted mean of those example means."""
    if not scores:
        raise EmptyDataset("no annotation scores")
    by_example: "OrderedDict[str, List[AnnotationScore]]" = OrderedDict()
    seen = set()
    for score in scores:
        key = (score.example_id, score.annotator_id)
        if key in seen:
            raise DuplicateScore(f"duplicate score for example={key[0]} annotator={key[1]}")
        seen.add(key)
        by_example.setdefault(score.example_id, []).append(score)

    def overall(attr: str) -> float:
        example_means = [
            sum(getattr(s, attr) for s in group) / len(group)
            for group in by_example.values()
        ]
        return sum(example_means) / len(example_means)

    return overall("factuality"), overall("noisiness")
