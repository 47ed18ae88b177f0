"""The one pipeline shared by the REST service and the CLI.

Builds the prompt engine and gateway from a ServiceConfig and turns raw
review-set documents into classify/digest documents. Keeping this in one
place is what guarantees REST and CLI outputs are identical.
"""

from __future__ import annotations

import dataclasses
import datetime
import logging
from typing import Dict, Optional

from .config import ServiceConfig
from .gateway import GatewayMode, LLMGateway, load_lexicon
from .pipeline import build_digest, classify_all
from .preprocess import filter_reviews
from .prompts import (
    PromptEngine,
    load_classification_examples,
    load_summary_examples,
)
from .wire import classify_document, digest_document, parse_review_set

logger = logging.getLogger(__name__)


class PipelineRunner:
    def __init__(self, config: ServiceConfig, mode: Optional[str] = None):
        gateway_config = config.gateway
        if mode is not None and GatewayMode(mode) is not gateway_config.mode:
            gateway_config = dataclasses.replace(gateway_config, mode=GatewayMode(mode))
        self.config = config
        self.engine = PromptEngine(
            classification_examples=(
                load_classification_examples(config.classification_examples_path)
                if config.classification_examples_path
                else None
            ),
            summary_examples=(
                load_summary_examples(config.summary_examples_path)
                if config.summary_examples_path
                else None
            ),
        )
        lexicon = load_lexicon(config.lexicon_path) if config.lexicon_path else None
        self.gateway = LLMGateway(gateway_config, lexicon=lexicon)

    def classify_document_for(self, data: Dict) -> Dict:
        review_set = parse_review_set(data)
        logger.info(
            "classify request: restaurant=%s reviews=%d",
            review_set.restaurant_id,
            len(review_set.reviews),
        )
        filtered = filter_reviews(review_set, self.config.preprocess, datetime.date.today())
        run = classify_all(filtered, self.gateway, self.engine)
        if run.diagnostics:
            logger.warning(
                "classification degraded for %d review(s): %s",
                len(run.diagnostics),
                ", ".join(d.subject for d in run.diagnostics),
            )
        return classify_document(
            review_set.restaurant_id,
            run.classified,
            mode=self.gateway.mode.value,
            prompt_version=self.engine.prompt_version,
        )

    def digest_document_for(self, data: Dict) -> Dict:
        review_set = parse_review_set(data)
        logger.info(
            "digest request: restaurant=%s reviews=%d",
            review_set.restaurant_id,
            len(review_set.reviews),
        )
        digest = build_digest(
            review_set,
            self.engine,
            self.gateway,
            preprocess_cfg=self.config.preprocess,
            summarize_cfg=self.config.summarize,
        )
        return digest_document(digest)
