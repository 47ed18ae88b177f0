"""Closed vocabularies and core value types shared by the whole pipeline."""

from __future__ import annotations

import datetime
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Iterable, Optional, Tuple


class UnknownAspect(ValueError):
    """A label that does not name one of the five aspects."""


class UnknownSentiment(ValueError):
    """A label that does not name one of the two sentiments."""


class Aspect(Enum):
    FOOD = "Food"
    AMBIANCE = "Ambiance"
    HYGIENE = "Hygiene"
    CUSTOMER_SERVICE = "Customer Service"
    PRICING = "Pricing"

    @property
    def display(self) -> str:
        return self.value


class Sentiment(Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"

    @property
    def display(self) -> str:
        return self.value


_WS_RUN = re.compile(r"\s+")


def _normalize_label(label: str) -> str:
    return _WS_RUN.sub(" ", label.strip()).lower()


_ASPECT_BY_LABEL = {a.value.lower(): a for a in Aspect}
_SENTIMENT_BY_LABEL = {s.value.lower(): s for s in Sentiment}


def parse_aspect(label: str) -> Aspect:
    """Map a display label to an Aspect; case-insensitive, whitespace-normalized."""
    try:
        return _ASPECT_BY_LABEL[_normalize_label(label)]
    except KeyError:
        raise UnknownAspect(f"unknown aspect label: {label!r}") from None


def parse_sentiment(label: str) -> Sentiment:
    """Map a display label to a Sentiment; same normalization as parse_aspect."""
    try:
        return _SENTIMENT_BY_LABEL[_normalize_label(label)]
    except KeyError:
        raise UnknownSentiment(f"unknown sentiment label: {label!r}") from None


@dataclass(frozen=True)
class AspectSentimentPair:
    """The atomic classification label: one aspect crossed with one sentiment."""

    aspect: Aspect
    sentiment: Sentiment

    @property
    def display(self) -> str:
        return f"{self.aspect.value}/{self.sentiment.value}"


_ASPECT_INDEX = {a: i for i, a in enumerate(Aspect)}
_SENTIMENT_INDEX = {s: i for i, s in enumerate(Sentiment)}


def pair_sort_key(pair: AspectSentimentPair) -> Tuple[int, int]:
    return (_SENTIMENT_INDEX[pair.sentiment], _ASPECT_INDEX[pair.aspect])


def sort_pairs(pairs: Iterable[AspectSentimentPair]) -> Tuple[AspectSentimentPair, ...]:
    """Canonical rendering order: positives before negatives, aspects in
    vocabulary order within each polarity."""
    return tuple(sorted(pairs, key=pair_sort_key))


#: All 10 possible pairs in canonical order.
ALL_PAIRS: Tuple[AspectSentimentPair, ...] = tuple(
    AspectSentimentPair(a, s) for a in Aspect for s in Sentiment
)

#: Fixed presentation order of aspects in a digest.
DIGEST_ASPECT_ORDER: Tuple[Aspect, ...] = (
    Aspect.FOOD,
    Aspect.PRICING,
    Aspect.CUSTOMER_SERVICE,
    Aspect.HYGIENE,
    Aspect.AMBIANCE,
)


@dataclass(frozen=True)
class Review:
    """One raw customer review. Only id and text are guaranteed; extraction
    cannot promise ratings or dates, so downstream code never requires them."""

    id: str
    text: str
    rating: Optional[int] = None
    date: Optional[datetime.date] = None
    author: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("review id must be non-empty")
        if self.rating is not None and not (1 <= self.rating <= 5):
            raise ValueError(f"rating must be 1..5, got {self.rating}")


@dataclass(frozen=True)
class ClassifiedReview:
    review: Review
    pairs: FrozenSet[AspectSentimentPair] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", frozenset(self.pairs))


@dataclass(frozen=True)
class RestaurantReviewSet:
    restaurant_id: str
    reviews: Tuple[Review, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "reviews", tuple(self.reviews))
        ids = [r.id for r in self.reviews]
        if len(ids) != len(set(ids)):
            dup = next(i for i in ids if ids.count(i) > 1)
            raise ValueError(f"duplicate review id: {dup!r}")
