"""quickcue: screen-reader-friendly review digests.

Joint aspect-sentiment classification groups restaurant reviews into ten
aspect/sentiment buckets; focused summarization turns each bucket into a
short bullet list; the result is served as a three-level hierarchy a screen
reader can traverse predictably. A deterministic mock mode (lexicon
classifier plus extractive summarizer) stands in for the live model.
"""

from .domain import (
    ALL_PAIRS,
    Aspect,
    AspectSentimentPair,
    ClassifiedReview,
    DIGEST_ASPECT_ORDER,
    RestaurantReviewSet,
    Review,
    Sentiment,
    UnknownAspect,
    UnknownSentiment,
    parse_aspect,
    parse_sentiment,
)
from .gateway import GatewayConfig, GatewayMode, LLMGateway, MockLexicon
from .pipeline import (
    DigestHierarchy,
    FocusedSummary,
    GatewayUnavailable,
    SummarizeConfig,
    build_digest,
    classify_all,
    group_by_pair,
    summarize_buckets,
)
from .preprocess import PreprocessConfig, clean_text, filter_reviews
from .prompts import (
    FewShotExample,
    PromptEngine,
    PromptText,
    SummaryFewShotExample,
    build_carp_prompt,
    build_dsp_prompt,
    parse_bullets,
    parse_pair_list,
    render_pairs,
)

__version__ = "0.1.0"
