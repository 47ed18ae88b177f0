"""Uniform access to the chat-completion model.

Two backends behind one ``complete()`` call: a live HTTP provider following
the common chat-completion convention, and a fully deterministic offline mock
(lexicon classifier plus extractive summarizer) used by tests and demos. The
gateway also owns response caching, bounded parallelism, and retry policy.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import threading
import time
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence

import requests

from .domain import (
    Aspect,
    AspectSentimentPair,
    Sentiment,
    parse_aspect,
    parse_sentiment,
)
from .prompts import (
    CARP_TASK_LINE,
    DSP_TASK_LINE,
    PromptText,
    extract_final_input,
    extract_final_reviews,
    extract_stimuli,
    render_pairs,
)

logger = logging.getLogger(__name__)


class GatewayError(Exception):
    """Base for everything the gateway can raise."""


class CredentialMissing(GatewayError):
    """Live mode requested but the credential environment variable is unset."""


class ProviderError(GatewayError):
    def __init__(self, message: str, status: Optional[int] = None, attempts: int = 0):
        super().__init__(message)
        self.status = status
        self.attempts = attempts


class GatewayTimeout(GatewayError):
    def __init__(self, message: str, attempts: int = 0):
        super().__init__(message)
        self.attempts = attempts


class UnrecognizedPrompt(GatewayError):
    """Mock backend received a prompt without a known task marker."""


class GatewayMode(Enum):
    LIVE = "live"
    MOCK = "mock"


@dataclass(frozen=True)
class GatewayConfig:
    mode: GatewayMode = GatewayMode.MOCK
    base_url: str = ""
    model_name: str = ""
    api_key_env: str = "QUICKCUE_LLM_API_KEY"
    max_parallel: int = 4
    max_retries: int = 3
    timeout_seconds: float = 60.0
    cache_dir: Optional[str] = None

    def __post_init__(self) -> None:
        if self.mode is GatewayMode.LIVE and (not self.base_url or not self.model_name):
            raise ValueError("live mode requires base_url and model_name")
        if self.max_parallel < 1:
            raise ValueError("max_parallel must be >= 1")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.timeout_seconds <= 0:
            raise ValueError("timeout_seconds must be > 0")


# ---------------------------------------------------------------------------
# Mock backend: lexicon classifier + extractive summarizer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MockLexicon:
    aspect_keywords: Mapping[Aspect, FrozenSet[str]]
    positive_words: FrozenSet[str]
    negative_words: FrozenSet[str]

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "aspect_keywords",
            {a: frozenset(w.lower() for w in kws) for a, kws in self.aspect_keywords.items()},
        )
        object.__setattr__(self, "positive_words", frozenset(w.lower() for w in self.positive_words))
        object.__setattr__(self, "negative_words", frozenset(w.lower() for w in self.negative_words))
        seen: Dict[str, Aspect] = {}
        for aspect, keywords in self.aspect_keywords.items():
            for word in keywords:
                if word in seen:
                    raise ValueError(
                        f"keyword {word!r} assigned to both {seen[word].value} and {aspect.value}"
                    )
                seen[word] = aspect
        overlap = self.positive_words & self.negative_words
        if overlap:
            raise ValueError(f"words in both polarities: {sorted(overlap)}")

    @classmethod
    def from_dict(cls, data: Mapping) -> "MockLexicon":
        return cls(
            aspect_keywords={
                parse_aspect(label): frozenset(words)
                for label, words in data["aspect_keywords"].items()
            },
            positive_words=frozenset(data["positive_words"]),
            negative_words=frozenset(data["negative_words"]),
        )


def load_lexicon(path) -> MockLexicon:
    with open(path, encoding="utf-8") as handle:
        return MockLexicon.from_dict(json.load(handle))


def default_lexicon() -> MockLexicon:
    with resources.as_file(
        resources.files("quickcue").joinpath("data", "demo_lexicon.json")
    ) as path:
        return load_lexicon(path)


# Sentence-ending punctuation plus clause separators: a clause like
# "..., but the service was slow" must form its own segment so that its
# sentiment attaches only to the aspects mentioned in it.
_SEGMENT_SPLIT = re.compile(r"[.!?;,]+")
_TOKEN = re.compile(r"[^\W\d_]+", re.UNICODE)


def split_segments(text: str) -> List[str]:
    return [seg.strip() for seg in _SEGMENT_SPLIT.split(text) if seg.strip()]


def _segment_tokens(segment: str) -> FrozenSet[str]:
    return frozenset(m.group(0).lower() for m in _TOKEN.finditer(segment))


def _segment_pairs(
    tokens: FrozenSet[str], lexicon: MockLexicon
) -> FrozenSet[AspectSentimentPair]:
    aspects = [a for a, kws in lexicon.aspect_keywords.items() if tokens & kws]
    if not aspects:
        return frozenset()
    sentiments = []
    if tokens & lexicon.positive_words:
        sentiments.append(Sentiment.POSITIVE)
    if tokens & lexicon.negative_words:
        sentiments.append(Sentiment.NEGATIVE)
    return frozenset(
        AspectSentimentPair(a, s) for a in aspects for s in sentiments
    )


def mock_classify(review_text: str, lexicon: MockLexicon) -> FrozenSet[AspectSentimentPair]:
    """Deterministic per-segment lexicon classification: a segment emits
    (aspect, sentiment) when it contains at least one keyword of that aspect
    and one word of that polarity; segments without both emit nothing."""
    pairs: set = set()
    for segment in split_segments(review_text):
        pairs |= _segment_pairs(_segment_tokens(segment), lexicon)
    return frozenset(pairs)


def mock_summarize(
    review_texts: Sequence[str],
    aspect: Aspect,
    sentiment: Sentiment,
    lexicon: MockLexicon,
    max_bullets: int,
) -> List[str]:
    """Extractive stand-in for focused summarization: matching segments,
    deduplicated case-insensitively, ordered by frequency then first seen."""
    target = AspectSentimentPair(aspect, sentiment)
    counts: Dict[str, List] = {}
    for text in review_texts:
        for segment in split_segments(text):
            if target in _segment_pairs(_segment_tokens(segment), lexicon):
                key = segment.casefold()
                entry = counts.setdefault(key, [0, len(counts), segment])
                entry[0] += 1
    ordered = sorted(counts.values(), key=lambda e: (-e[0], e[1]))
    return [segment for _, _, segment in ordered[:max_bullets]]


_MOCK_MAX_BULLETS = 10


def _render_mock_classification(
    pairs: FrozenSet[AspectSentimentPair], evidence: Sequence[str]
) -> str:
    clue_text = ", ".join(f"[{word}]" for word in evidence) or "(none)"
    return (
        f"CLUES: {clue_text}\n"
        "REASONING: Lexicon keyword matches within each sentence segment determine "
        "the aspect-sentiment pairs.\n"
        f"ASPECT-SENTIMENT Pairs: {render_pairs(pairs)}\n"
    )


# ---------------------------------------------------------------------------
# Response cache
# ---------------------------------------------------------------------------


class ResponseCache:
    """In-memory response cache, layered over a directory when one is
    configured so completions persist across runs. I/O trouble degrades to
    uncached operation with a warning; it never fails the request."""

    def __init__(self, directory: Optional[Path] = None):
        self._memory: Dict[str, str] = {}
        self._lock = threading.Lock()
        self._dir = directory
        if self._dir is not None:
            try:
                self._dir.mkdir(parents=True, exist_ok=True)
            except OSError as exc:
                logger.warning("response cache disabled, cannot create %s: %s", self._dir, exc)
                self._dir = None

    def get(self, key: str) -> Optional[str]:
        with self._lock:
            if key in self._memory:
                return self._memory[key]
        if self._dir is None:
            return None
        path = self._dir / f"{key}.txt"
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            return None
        except OSError as exc:
            logger.warning("cache read failed for %s: %s", path, exc)
            return None
        with self._lock:
            self._memory[key] = text
        return text

    def put(self, key: str, text: str) -> None:
        with self._lock:
            self._memory[key] = text
        if self._dir is None:
            return
        path = self._dir / f"{key}.txt"
        tmp = self._dir / f"{key}.txt.tmp"
        try:
            tmp.write_text(text, encoding="utf-8")
            tmp.replace(path)
        except OSError as exc:
            logger.warning("cache write failed for %s: %s", path, exc)


# ---------------------------------------------------------------------------
# Live transport
# ---------------------------------------------------------------------------


class TransportNetworkError(Exception):
    """Connection-level failure; retried as transient."""


class TransportTimeout(TransportNetworkError):
    pass


class TransportHTTPStatus(Exception):
    def __init__(self, status: int, detail: str = ""):
        super().__init__(f"HTTP {status}: {detail}")
        self.status = status


Transport = Callable[[str, str, dict, float], str]


def _http_transport(url: str, api_key: str, payload: dict, timeout: float) -> str:
    try:
        response = requests.post(
            url,
            json=payload,
            headers={"Authorization": f"Bearer {api_key}"},
            timeout=timeout,
        )
    except requests.Timeout as exc:
        raise TransportTimeout(str(exc)) from exc
    except requests.RequestException as exc:
        raise TransportNetworkError(str(exc)) from exc
    if response.status_code != 200:
        raise TransportHTTPStatus(response.status_code, response.text[:200])
    try:
        return response.json()["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise TransportHTTPStatus(200, f"malformed provider response: {exc}") from exc


_BACKOFF_BASE_SECONDS = 0.5


# ---------------------------------------------------------------------------
# Gateway
# ---------------------------------------------------------------------------


class LLMGateway:
    """Thread-safe completion access with caching and bounded parallelism.

    ``complete`` may be called concurrently from many workers; the internal
    semaphore guarantees at most max_parallel in-flight backend requests.
    """

    def __init__(
        self,
        config: GatewayConfig,
        lexicon: Optional[MockLexicon] = None,
        transport: Optional[Transport] = None,
        sleeper: Callable[[float], None] = time.sleep,
    ):
        self.config = config
        self.lexicon = lexicon if lexicon is not None else default_lexicon()
        self._transport = transport or _http_transport
        self._sleeper = sleeper
        self._semaphore = threading.BoundedSemaphore(config.max_parallel)
        cache_dir = Path(config.cache_dir) if config.cache_dir else None
        self._cache = ResponseCache(cache_dir)

    @property
    def mode(self) -> GatewayMode:
        return self.config.mode

    def credential_available(self) -> bool:
        if self.config.mode is GatewayMode.MOCK:
            return True
        return bool(os.environ.get(self.config.api_key_env))

    def _cache_key(self, prompt: PromptText) -> str:
        material = "\x00".join(
            (self.config.mode.value, self.config.model_name, prompt.prompt_version, prompt.text)
        )
        return hashlib.sha256(material.encode("utf-8")).hexdigest()

    def complete(self, prompt: PromptText, fresh: bool = False) -> str:
        """Return the model's text response for the prompt. ``fresh=True``
        skips the cache read (the response is still stored)."""
        key = self._cache_key(prompt)
        if not fresh:
            hit = self._cache.get(key)
            if hit is not None:
                return hit
        with self._semaphore:
            if self.config.mode is GatewayMode.MOCK:
                text = self._mock_complete(prompt.text)
            else:
                text = self._live_complete(prompt.text)
        self._cache.put(key, text)
        return text

    # -- mock ---------------------------------------------------------------

    def _mock_complete(self, prompt_text: str) -> str:
        if prompt_text.startswith(CARP_TASK_LINE):
            review = extract_final_input(prompt_text)
            pairs = mock_classify(review, self.lexicon)
            evidence = self._evidence_tokens(review)
            return _render_mock_classification(pairs, evidence)
        if prompt_text.startswith(DSP_TASK_LINE):
            reviews = extract_final_reviews(prompt_text)
            aspect_label, sentiment_label = extract_stimuli(prompt_text)
            bullets = mock_summarize(
                reviews,
                parse_aspect(aspect_label),
                parse_sentiment(sentiment_label),
                self.lexicon,
                _MOCK_MAX_BULLETS,
            )
            return "".join(f"- {bullet}\n" for bullet in bullets)
        raise UnrecognizedPrompt("prompt carries no known task marker")

    def _evidence_tokens(self, review_text: str) -> List[str]:
        tokens = _segment_tokens(review_text)
        matched = set()
        for keywords in self.lexicon.aspect_keywords.values():
            matched |= tokens & keywords
        matched |= tokens & self.lexicon.positive_words
        matched |= tokens & self.lexicon.negative_words
        return sorted(matched)

    # -- live ---------------------------------------------------------------

    def _live_complete(self, prompt_text: str) -> str:
        api_key = os.environ.get(self.config.api_key_env)
        if not api_key:
            raise CredentialMissing(
                f"environment variable {self.config.api_key_env} is not set"
            )
        url = self.config.base_url.rstrip("/") + "/chat/completions"
        payload = {
            "model": self.config.model_name,
            "messages": [{"role": "user", "content": prompt_text}],
        }
        attempts = 0
        delay = _BACKOFF_BASE_SECONDS
        while True:
            attempts += 1
            try:
                return self._transport(url, api_key, payload, self.config.timeout_seconds)
            except TransportTimeout as exc:
                if attempts > self.config.max_retries:
                    raise GatewayTimeout(
                        f"timed out after {attempts} attempts: {exc}", attempts=attempts
                    ) from exc
                logger.warning("request timed out (attempt %d), retrying", attempts)
            except TransportHTTPStatus as exc:
                transient = exc.status == 429 or exc.status >= 500
                if not transient or attempts > self.config.max_retries:
                    raise ProviderError(
                        f"provider returned HTTP {exc.status} after {attempts} attempts",
                        status=exc.status,
                        attempts=attempts,
                    ) from exc
                logger.warning("HTTP %d (attempt %d), retrying", exc.status, attempts)
            except TransportNetworkError as exc:
                if attempts > self.config.max_retries:
                    raise ProviderError(
                        f"network failure after {attempts} attempts: {exc}",
                        attempts=attempts,
                    ) from exc
                logger.warning("network error (attempt %d), retrying: %s", attempts, exc)
            self._sleeper(delay)
            delay *= 2
