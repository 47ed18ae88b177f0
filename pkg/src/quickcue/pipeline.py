"""End-to-end digest assembly: classify every review, group into the ten
aspect-sentiment buckets, summarize each non-empty bucket, and emit the
fixed five-aspect hierarchy."""

from __future__ import annotations

import datetime
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .domain import (
    ALL_PAIRS,
    Aspect,
    AspectSentimentPair,
    ClassifiedReview,
    DIGEST_ASPECT_ORDER,
    RestaurantReviewSet,
    Review,
    Sentiment,
    sort_pairs,
)
from .gateway import GatewayError, LLMGateway
from .preprocess import PreprocessConfig, filter_reviews
from .prompts import (
    EmptyReview,
    MalformedPair,
    NoBulletsFound,
    NoPairListFound,
    PromptEngine,
    parse_bullets,
    parse_pair_list,
)
from .domain import UnknownAspect, UnknownSentiment

logger = logging.getLogger(__name__)

#: Map from each of the 10 pairs to the ids of matching reviews, input order.
BucketMap = Dict[AspectSentimentPair, List[str]]

_PARSE_FAILURES = (NoPairListFound, MalformedPair, UnknownAspect, UnknownSentiment)


class GatewayUnavailable(Exception):
    """Every request to the model failed; no partial result is possible."""


@dataclass(frozen=True)
class SummarizeConfig:
    max_reviews_per_bucket: int = 30
    max_bullets: int = 5

    def __post_init__(self) -> None:
        if self.max_reviews_per_bucket < 1:
            raise ValueError("max_reviews_per_bucket must be >= 1")
        if self.max_bullets < 1:
            raise ValueError("max_bullets must be >= 1")


@dataclass(frozen=True)
class Diagnostic:
    subject: str  # review id or aspect/sentiment pair display
    stage: str  # "classify" or "summarize"
    message: str


@dataclass(frozen=True)
class ClassificationRun:
    classified: Tuple[ClassifiedReview, ...]
    diagnostics: Tuple[Diagnostic, ...] = ()


@dataclass(frozen=True)
class FocusedSummary:
    pair: AspectSentimentPair
    bullets: Tuple[str, ...]
    source_review_ids: Tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "bullets", tuple(self.bullets))
        object.__setattr__(self, "source_review_ids", tuple(self.source_review_ids))
        if bool(self.bullets) != bool(self.source_review_ids):
            raise ValueError("bullets and source_review_ids must be empty together")


@dataclass(frozen=True)
class SummarizationRun:
    summaries: Mapping[AspectSentimentPair, FocusedSummary]
    diagnostics: Tuple[Diagnostic, ...] = ()


@dataclass(frozen=True)
class AspectSection:
    aspect: Aspect
    positive: FocusedSummary
    negative: FocusedSummary


@dataclass(frozen=True)
class DigestHierarchy:
    restaurant_id: str
    aspects: Tuple[AspectSection, ...]
    generated_at: datetime.datetime
    prompt_version: str

    def __post_init__(self) -> None:
        order = tuple(section.aspect for section in self.aspects)
        if order != DIGEST_ASPECT_ORDER:
            raise ValueError(f"sections must follow the fixed aspect order, got {order}")


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


def _classify_one(review: Review, gateway: LLMGateway, engine: PromptEngine):
    """Classify one review with a single re-ask on failure.
    Returns (pairs, kind, message): kind is ok / parse / gateway."""
    try:
        prompt = engine.build_carp_prompt(review.text)
    except EmptyReview as exc:
        return frozenset(), "parse", str(exc)

    last_kind = "parse"
    last_message = ""
    for attempt, fresh in enumerate((False, True)):
        try:
            raw = gateway.complete(prompt, fresh=fresh)
            return parse_pair_list(raw), "ok", ""
        except _PARSE_FAILURES as exc:
            last_kind, last_message = "parse", f"{type(exc).__name__}: {exc}"
        except GatewayError as exc:
            last_kind, last_message = "gateway", f"{type(exc).__name__}: {exc}"
    return frozenset(), last_kind, last_message


def classify_all(
    reviews: RestaurantReviewSet, gateway: LLMGateway, engine: PromptEngine
) -> ClassificationRun:
    """One ClassifiedReview per input review, in input order. A review whose
    response cannot be parsed after one re-ask degrades to empty pairs with a
    diagnostic; the run aborts only when every review hit a gateway failure."""
    if not reviews.reviews:
        return ClassificationRun(())

    workers = min(len(reviews.reviews), gateway.config.max_parallel)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(
            pool.map(lambda r: _classify_one(r, gateway, engine), reviews.reviews)
        )

    if all(kind == "gateway" for _, kind, _ in outcomes):
        raise GatewayUnavailable(
            f"all {len(outcomes)} classification requests failed: {outcomes[0][2]}"
        )

    classified = []
    diagnostics = []
    for review, (pairs, kind, message) in zip(reviews.reviews, outcomes):
        classified.append(ClassifiedReview(review, pairs))
        if kind != "ok":
            diagnostics.append(Diagnostic(review.id, "classify", message))
            logger.warning("review %s degraded to empty pairs: %s", review.id, message)
    return ClassificationRun(tuple(classified), tuple(diagnostics))


# ---------------------------------------------------------------------------
# Grouping
# ---------------------------------------------------------------------------


def group_by_pair(classified: Sequence[ClassifiedReview]) -> BucketMap:
    """bucket(a, s) holds review r's id iff (a, s) is among r's pairs; a
    review with k pairs lands in exactly k buckets. All 10 keys are always
    present."""
    buckets: BucketMap = {pair: [] for pair in ALL_PAIRS}
    for item in classified:
        for pair in sort_pairs(item.pairs):
            bucket = buckets[pair]
            if item.review.id not in bucket:
                bucket.append(item.review.id)
    return buckets


# ---------------------------------------------------------------------------
# Summarization
# ---------------------------------------------------------------------------


def _select_bucket_reviews(
    ids: Sequence[str], reviews_by_id: Mapping[str, Review], limit: int
) -> List[Review]:
    """Up to ``limit`` reviews: dated ones most-recent-first, then undated
    ones in input order."""
    indexed = [(i, reviews_by_id[rid]) for i, rid in enumerate(ids)]
    dated = sorted(
        (t for t in indexed if t[1].date is not None),
        key=lambda t: (-t[1].date.toordinal(), t[0]),
    )
    undated = [t for t in indexed if t[1].date is None]
    return [review for _, review in (dated + undated)[:limit]]


def _summarize_one(
    pair: AspectSentimentPair,
    ids: Sequence[str],
    reviews_by_id: Mapping[str, Review],
    gateway: LLMGateway,
    engine: PromptEngine,
    cfg: SummarizeConfig,
):
    chosen = _select_bucket_reviews(ids, reviews_by_id, cfg.max_reviews_per_bucket)
    prompt = engine.build_dsp_prompt([r.text for r in chosen], pair.aspect, pair.sentiment)
    try:
        raw = gateway.complete(prompt)
        bullets = parse_bullets(raw)[: cfg.max_bullets]
    except GatewayError as exc:
        return None, "gateway", f"{type(exc).__name__}: {exc}"
    except NoBulletsFound as exc:
        return None, "parse", f"{type(exc).__name__}: {exc}"
    sources = tuple(r.id for r in chosen) if bullets else ()
    return FocusedSummary(pair, tuple(bullets), sources), "ok", ""


def summarize_buckets(
    buckets: BucketMap,
    reviews_by_id: Mapping[str, Review],
    gateway: LLMGateway,
    engine: PromptEngine,
    cfg: Optional[SummarizeConfig] = None,
) -> SummarizationRun:
    """A FocusedSummary for each of the 10 pairs. Empty buckets yield empty
    summaries without a model call; a failing bucket degrades to an empty
    summary with a diagnostic unless every non-empty bucket failed at the
    gateway."""
    cfg = cfg or SummarizeConfig()
    non_empty = [(pair, ids) for pair, ids in buckets.items() if ids]

    results: Dict[AspectSentimentPair, FocusedSummary] = {
        pair: FocusedSummary(pair, (), ()) for pair in ALL_PAIRS
    }
    diagnostics: List[Diagnostic] = []
    outcomes = {}
    if non_empty:
        workers = min(len(non_empty), gateway.config.max_parallel)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            settled = list(
                pool.map(
                    lambda item: _summarize_one(
                        item[0], item[1], reviews_by_id, gateway, engine, cfg
                    ),
                    non_empty,
                )
            )
        for (pair, _), (summary, kind, message) in zip(non_empty, settled):
            outcomes[pair] = kind
            if summary is not None:
                results[pair] = summary
            if kind != "ok":
                diagnostics.append(Diagnostic(pair.display, "summarize", message))
                logger.warning("bucket %s degraded to empty summary: %s", pair.display, message)
        if outcomes and all(kind == "gateway" for kind in outcomes.values()):
            raise GatewayUnavailable(
                f"all {len(outcomes)} summarization requests failed"
            )
    return SummarizationRun(results, tuple(diagnostics))


# ---------------------------------------------------------------------------
# Digest assembly
# ---------------------------------------------------------------------------


def build_digest(
    reviews: RestaurantReviewSet,
    engine: PromptEngine,
    gateway: LLMGateway,
    preprocess_cfg: Optional[PreprocessConfig] = None,
    summarize_cfg: Optional[SummarizeConfig] = None,
    today: Optional[datetime.date] = None,
    generated_at: Optional[datetime.datetime] = None,
) -> DigestHierarchy:
    """filter -> classify -> group -> summarize -> assemble the five sections
    in fixed order. Deterministic in mock mode apart from generated_at."""
    preprocess_cfg = preprocess_cfg or PreprocessConfig()
    today = today or datetime.date.today()
    filtered = filter_reviews(reviews, preprocess_cfg, today)

    run = classify_all(filtered, gateway, engine)
    buckets = group_by_pair(run.classified)
    reviews_by_id = {r.id: r for r in filtered.reviews}
    summary_run = summarize_buckets(buckets, reviews_by_id, gateway, engine, summarize_cfg)

    sections = tuple(
        AspectSection(
            aspect,
            positive=summary_run.summaries[AspectSentimentPair(aspect, Sentiment.POSITIVE)],
            negative=summary_run.summaries[AspectSentimentPair(aspect, Sentiment.NEGATIVE)],
        )
        for aspect in DIGEST_ASPECT_ORDER
    )
    if generated_at is None:
        generated_at = datetime.datetime.now(datetime.timezone.utc)
    return DigestHierarchy(
        restaurant_id=reviews.restaurant_id,
        aspects=sections,
        generated_at=generated_at,
        prompt_version=engine.prompt_version,
    )
