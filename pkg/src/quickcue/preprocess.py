"""Text cleanup and the recency filter applied to reviews before classification."""

from __future__ import annotations

import datetime
import re
import unicodedata
from dataclasses import dataclass, replace
from typing import Optional

from .domain import RestaurantReviewSet

# Emoji and pictograph blocks stripped from review text. Letters, digits and
# punctuation are never in these ranges.
_EMOJI_RANGES = (
    (0x1F000, 0x1FAFF),  # mahjong/cards through symbols-extended (incl. emoticons, transport)
    (0x2600, 0x27BF),    # miscellaneous symbols + dingbats
    (0x2B00, 0x2BFF),    # miscellaneous symbols and arrows (stars etc.)
    (0x25A0, 0x25FF),    # geometric shapes
    (0x231A, 0x231B),    # watch, hourglass
    (0x23E9, 0x23F3),    # audiovisual controls
    (0x23F8, 0x23FA),
    (0xFE00, 0xFE0F),    # variation selectors
    (0x20E3, 0x20E3),    # combining enclosing keycap
)

_WS_RUN = re.compile(r"\s+")


def _keep_char(ch: str) -> bool:
    if ch == "\n":
        return True
    cp = ord(ch)
    for lo, hi in _EMOJI_RANGES:
        if lo <= cp <= hi:
            return False
    # Cc: control chars; Cf: invisible format chars (ZWJ etc., emoji plumbing);
    # Cs/Co: surrogates and private use.
    return unicodedata.category(ch) not in ("Cc", "Cf", "Cs", "Co")


def clean_text(raw: str) -> str:
    """Normalize one review text.

    Removes emoji/pictograph code points and control characters (newline is
    kept long enough to collapse as whitespace), then collapses every
    whitespace run to a single space and trims the ends. Total and idempotent.
    """
    kept = "".join(ch for ch in raw if _keep_char(ch))
    return _WS_RUN.sub(" ", kept).strip()


@dataclass(frozen=True)
class PreprocessConfig:
    """max_age_days=None disables the recency filter entirely."""

    max_age_days: Optional[int] = 365
    min_text_length: int = 1

    def __post_init__(self) -> None:
        if self.max_age_days is not None and self.max_age_days < 1:
            raise ValueError("max_age_days must be >= 1 when set")
        if self.min_text_length < 0:
            raise ValueError("min_text_length must be >= 0")


def _non_whitespace_length(cleaned: str) -> int:
    # After clean_text the only whitespace left is single spaces.
    return len(cleaned) - cleaned.count(" ")


def filter_reviews(
    review_set: RestaurantReviewSet,
    cfg: PreprocessConfig,
    today: datetime.date,
) -> RestaurantReviewSet:
    """Drop too-short and too-old reviews; replace each survivor's text with
    its cleaned form. Undated reviews are never dropped by the age rule."""
    kept = []
    for review in review_set.reviews:
        cleaned = clean_text(review.text)
        if _non_whitespace_length(cleaned) < cfg.min_text_length:
            continue
        if (
            cfg.max_age_days is not None
            and review.date is not None
            and (today - review.date).days > cfg.max_age_days
        ):
            continue
        kept.append(replace(review, text=cleaned))
    return RestaurantReviewSet(review_set.restaurant_id, tuple(kept))
