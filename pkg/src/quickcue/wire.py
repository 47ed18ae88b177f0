"""Wire documents: JSON encoding/decoding of domain objects with stable key
order, and validation against the schemas shipped in quickcue/schemas/.

REST responses and CLI output files are rendered by the same functions here,
which is what makes them byte-comparable.
"""

from __future__ import annotations

import datetime
import json
from functools import lru_cache
from importlib import resources
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence

import jsonschema

from .domain import (
    AspectSentimentPair,
    ClassifiedReview,
    RestaurantReviewSet,
    Review,
    parse_aspect,
    parse_sentiment,
    sort_pairs,
)
from .evaluation import EvalReport, GoldAnnotation, ReviewMetrics
from .pipeline import DigestHierarchy


class SchemaError(ValueError):
    def __init__(self, message: str, field_path: str = "$"):
        super().__init__(message)
        self.field_path = field_path


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    path = resources.files("quickcue").joinpath("schemas", f"{name}.schema.json")
    with path.open(encoding="utf-8") as handle:
        return json.load(handle)


def validate_document(data, schema_name: str) -> None:
    """Validate against a shipped schema; SchemaError carries the JSON path
    of the most relevant violation."""
    validator = jsonschema.Draft202012Validator(load_schema(schema_name))
    error = jsonschema.exceptions.best_match(validator.iter_errors(data))
    if error is not None:
        raise SchemaError(error.message, field_path=error.json_path)


def render_document(doc: Mapping) -> str:
    """The one JSON rendering used everywhere: UTF-8, two-space indent,
    insertion key order, trailing newline."""
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Pairs
# ---------------------------------------------------------------------------


def pairs_to_lists(pairs: FrozenSet[AspectSentimentPair]) -> List[List[str]]:
    return [[p.aspect.value, p.sentiment.value] for p in sort_pairs(pairs)]


def pairs_from_lists(records: Sequence[Sequence[str]]) -> FrozenSet[AspectSentimentPair]:
    return frozenset(
        AspectSentimentPair(parse_aspect(a), parse_sentiment(s)) for a, s in records
    )


# ---------------------------------------------------------------------------
# Review sets
# ---------------------------------------------------------------------------


def review_set_from_dict(data: Mapping) -> RestaurantReviewSet:
    """Parse a validated review-set document. Call validate_document first
    when the data is untrusted."""
    reviews = []
    for record in data["reviews"]:
        date = record.get("date")
        reviews.append(
            Review(
                id=record["id"],
                text=record["text"],
                rating=record.get("rating"),
                date=datetime.date.fromisoformat(date) if date else None,
                author=record.get("author"),
            )
        )
    try:
        return RestaurantReviewSet(data["restaurant_id"], tuple(reviews))
    except ValueError as exc:
        raise SchemaError(str(exc), field_path="$.reviews") from exc


def parse_review_set(data) -> RestaurantReviewSet:
    validate_document(data, "review_set")
    return review_set_from_dict(data)


def review_set_to_dict(review_set: RestaurantReviewSet) -> Dict:
    reviews = []
    for r in review_set.reviews:
        record: Dict = {"id": r.id, "text": r.text}
        if r.rating is not None:
            record["rating"] = r.rating
        if r.date is not None:
            record["date"] = r.date.isoformat()
        if r.author is not None:
            record["author"] = r.author
        reviews.append(record)
    return {"restaurant_id": review_set.restaurant_id, "reviews": reviews}


# ---------------------------------------------------------------------------
# Classification / digest documents
# ---------------------------------------------------------------------------


def classify_document(
    restaurant_id: str,
    classified: Sequence[ClassifiedReview],
    mode: str,
    prompt_version: str,
) -> Dict:
    return {
        "restaurant_id": restaurant_id,
        "mode": mode,
        "prompt_version": prompt_version,
        "classifications": [
            {"review_id": item.review.id, "pairs": pairs_to_lists(item.pairs)}
            for item in classified
        ],
    }


def _timestamp(value: datetime.datetime) -> str:
    return value.astimezone(datetime.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def digest_document(digest: DigestHierarchy) -> Dict:
    return {
        "restaurant_id": digest.restaurant_id,
        "generated_at": _timestamp(digest.generated_at),
        "prompt_version": digest.prompt_version,
        "aspects": [
            {
                "aspect": section.aspect.value,
                "positive": {
                    "bullets": list(section.positive.bullets),
                    "source_review_ids": list(section.positive.source_review_ids),
                },
                "negative": {
                    "bullets": list(section.negative.bullets),
                    "source_review_ids": list(section.negative.source_review_ids),
                },
            }
            for section in digest.aspects
        ],
    }


# ---------------------------------------------------------------------------
# Evaluation files and reports
# ---------------------------------------------------------------------------


def gold_from_records(records: Sequence[Mapping]) -> List[GoldAnnotation]:
    return [GoldAnnotation(rec["review_id"], pairs_from_lists(rec["pairs"])) for rec in records]


def load_gold_file(path) -> List[GoldAnnotation]:
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    validate_document(data, "gold_annotations")
    return gold_from_records(data)


def load_predictions_file(path) -> Dict[str, FrozenSet[AspectSentimentPair]]:
    """Predictions are either the documented array of {review_id, pairs}
    records or a classify response document (its classifications are used)."""
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    if isinstance(data, dict) and "classifications" in data:
        records = data["classifications"]
    else:
        validate_document(data, "gold_annotations")
        records = data
    return {rec["review_id"]: pairs_from_lists(rec["pairs"]) for rec in records}


def _metrics_dict(metrics: ReviewMetrics) -> Dict:
    return {"precision": metrics.precision, "recall": metrics.recall, "f1": metrics.f1}


def report_document(report: EvalReport, reference: Optional[Mapping] = None) -> Dict:
    doc: Dict = {
        "review_count": report.review_count,
        "macro": _metrics_dict(report.macro),
        "per_review": [
            {"review_id": rid, **_metrics_dict(m)} for rid, m in report.per_review
        ],
        "pair_frequencies": [
            {"aspect": pair.aspect.value, "sentiment": pair.sentiment.value, "count": count}
            for pair, count in report.frequencies.items()
        ],
        "missing_predictions": list(report.missing_predictions),
    }
    if reference is not None:
        doc["reference_targets"] = dict(reference)
    return doc


def format_report(report: EvalReport, reference: Optional[Mapping] = None) -> str:
    """Human-readable table for the eval subcommand."""
    lines = [
        f"reviews evaluated: {report.review_count}",
        "",
        f"macro precision: {report.macro.precision:.4f}",
        f"macro recall:    {report.macro.recall:.4f}",
        f"macro f1:        {report.macro.f1:.4f}",
        "",
        "pair frequencies (gold):",
    ]
    for pair, count in report.frequencies.items():
        lines.append(f"  [{pair.aspect.value}, {pair.sentiment.value}]: {count}")
    if report.missing_predictions:
        lines.append("")
        lines.append(
            "missing predictions (scored as empty): "
            + ", ".join(report.missing_predictions)
        )
    if reference is not None:
        lines.append("")
        lines.append("reference targets:")
        for name, values in reference.get("classification", {}).items():
            lines.append(
                f"  {name}: precision {values['precision']}, "
                f"recall {values['recall']}, f1 {values['f1']}"
            )
    return "\n".join(lines) + "\n"
