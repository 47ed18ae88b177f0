"""Prompt construction for joint classification and focused summarization,
and parsers for the structured parts of model responses.

Review text is untrusted: every input section embeds it between fence lines
(runs of ``<`` / ``>``), lengthened until no body line collides, so section
keywords inside a review can never be mistaken for template structure. The
same fences let the offline mock recover the exact input from a prompt.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from importlib import resources
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .domain import (
    Aspect,
    AspectSentimentPair,
    Sentiment,
    parse_aspect,
    parse_sentiment,
    sort_pairs,
)


class EmptyReview(ValueError):
    """Classification prompt requested for an empty review text."""


class EmptyBucket(ValueError):
    """Summarization prompt requested for an empty review list."""


class NoPairListFound(ValueError):
    """Model output contains no parseable aspect-sentiment pair list."""


class MalformedPair(ValueError):
    """A pair in the output list does not have exactly two label strings."""


class NoBulletsFound(ValueError):
    """Non-empty model output contains no bullet lines."""


# ---------------------------------------------------------------------------
# Template text
# ---------------------------------------------------------------------------

CARP_TASK_LINE = (
    "Task Description: This is a joint aspect-sentiment classifier for restaurant reviews."
)

_CARP_STEP_ONE = (
    "First, present CLUES (i.e., keywords, phrases, contextual information, semantic "
    "meaning, semantic relations, tones, references) that support the joint "
    "aspect-sentiment determination of the input (look for clues related to Food, "
    "Ambiance, Customer Service, Pricing, Hygiene for aspect, and clues related to "
    "positive, negative for sentiment)."
)

_CARP_STEP_TWO = (
    "Second, deduce a diagnostic REASONING process from premises (i.e., clues, input) "
    "that supports the sentiment determination for each identified aspect. Note that "
    "an aspect can be identified multiple times in different locations of the input."
)

_CARP_STEP_THREE = (
    "Third, determine the list of aspect-sentiment pairs present in the INPUT, "
    "considering the CLUES and the REASONING process."
)

_CARP_OUTPUT_RULE = "Output all possible aspect-sentiment pairs after removing empty pairs if any."

ASPECT_VOCABULARY_LINE = (
    "For ASPECT, choose from the following predefined set of words: ["
    + ", ".join(a.value for a in Aspect)
    + "]."
)

SENTIMENT_VOCABULARY_LINE = (
    "For SENTIMENT, choose from the following two words: ["
    + ", ".join(s.value for s in Sentiment)
    + "]."
)

DSP_TASK_LINE = (
    "Task Instructions: Summarize the given reviews by focusing only on the specified "
    "main aspect and desired sentiment. Use the Directional Stimuli (keywords) for "
    "guidance. Ensure the generated summary excludes unrelated aspects, redundant "
    "phrases, and undesired sentiments, while keeping it concise and clear."
)

OUTPUT_INSTRUCTION_LINE = (
    "Output Instruction: Generate the summary as a sequence of bullet points, with "
    "each point highlighting one salient feature uncovered about the specified aspect "
    "and desired sentiment."
)

_TEMPLATE_PARTS = (
    CARP_TASK_LINE,
    _CARP_STEP_ONE,
    _CARP_STEP_TWO,
    _CARP_STEP_THREE,
    _CARP_OUTPUT_RULE,
    ASPECT_VOCABULARY_LINE,
    SENTIMENT_VOCABULARY_LINE,
    DSP_TASK_LINE,
    OUTPUT_INSTRUCTION_LINE,
)


# ---------------------------------------------------------------------------
# Value types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FewShotExample:
    """One classification demonstration (input review and its expected pairs)."""

    input_text: str
    expected_pairs: FrozenSet[AspectSentimentPair]
    clues: Optional[str] = None
    reasoning: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.input_text:
            raise ValueError("example input_text must be non-empty")
        object.__setattr__(self, "expected_pairs", frozenset(self.expected_pairs))
        if not self.expected_pairs:
            raise ValueError("example expected_pairs must be non-empty")


@dataclass(frozen=True)
class SummaryFewShotExample:
    """One summarization demonstration for a single aspect-sentiment pair."""

    input_reviews: Tuple[str, ...]
    aspect: Aspect
    sentiment: Sentiment
    bullets: Tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "input_reviews", tuple(self.input_reviews))
        object.__setattr__(self, "bullets", tuple(self.bullets))
        if not self.bullets:
            raise ValueError("example bullets must be non-empty")


@dataclass(frozen=True)
class PromptText:
    text: str
    prompt_version: str


# ---------------------------------------------------------------------------
# Fenced input sections
# ---------------------------------------------------------------------------

_MIN_FENCE = 3


def fence_block(text: str) -> str:
    """Wrap text between ``<<<`` / ``>>>`` lines, lengthening the fence until
    no body line can be confused with it."""
    lines = text.split("\n")
    n = _MIN_FENCE
    while ("<" * n) in lines or (">" * n) in lines:
        n += 1
    return "<" * n + "\n" + text + "\n" + ">" * n


_OPEN_FENCE = re.compile(r"^<{3,}$")


def _read_fenced(lines: Sequence[str], start: int) -> Tuple[str, int]:
    """Read one fenced block whose opening fence is at lines[start].
    Returns (body, index after the closing fence)."""
    close = ">" * len(lines[start])
    body: List[str] = []
    i = start + 1
    while i < len(lines):
        if lines[i] == close:
            return "\n".join(body), i + 1
        body.append(lines[i])
        i += 1
    raise ValueError("unterminated fenced block in prompt")


def _input_sections(prompt_text: str) -> List[List[str]]:
    """All INPUT sections in order; each is the list of fenced bodies that
    follow its marker. Fenced content is skipped while scanning, so review
    text can never introduce a phantom section."""
    lines = prompt_text.split("\n")
    sections: List[List[str]] = []
    i = 0
    while i < len(lines):
        line = lines[i]
        if _OPEN_FENCE.match(line):
            _, i = _read_fenced(lines, i)
            continue
        if line == "INPUT:":
            i += 1
            bodies: List[str] = []
            while i < len(lines):
                if _OPEN_FENCE.match(lines[i]):
                    body, i = _read_fenced(lines, i)
                    bodies.append(body)
                elif lines[i] in ("", "Reviews:"):
                    i += 1
                else:
                    break
            sections.append(bodies)
            continue
        i += 1
    return sections


def count_input_sections(prompt_text: str) -> int:
    return len(_input_sections(prompt_text))


def extract_final_input(prompt_text: str) -> str:
    """The review text of the last INPUT section (the one under classification)."""
    sections = _input_sections(prompt_text)
    if not sections or not sections[-1]:
        raise ValueError("prompt has no final INPUT section")
    return sections[-1][0]


def extract_final_reviews(prompt_text: str) -> List[str]:
    """All fenced review texts of the last INPUT section (summarization prompts)."""
    sections = _input_sections(prompt_text)
    if not sections or not sections[-1]:
        raise ValueError("prompt has no final INPUT section")
    return sections[-1]


_STIMULUS_ASPECT = re.compile(r"^Main Aspect: (.+)$", re.MULTILINE)
_STIMULUS_SENTIMENT = re.compile(r"^Desired Sentiment: (.+)$", re.MULTILINE)


def extract_stimuli(prompt_text: str) -> Tuple[str, str]:
    """The (aspect, sentiment) labels of the first Directional Stimuli block,
    which is the request-level one (example blocks come later)."""
    aspect = _STIMULUS_ASPECT.search(prompt_text)
    sentiment = _STIMULUS_SENTIMENT.search(prompt_text)
    if not aspect or not sentiment:
        raise ValueError("prompt has no Directional Stimuli block")
    return aspect.group(1), sentiment.group(1)


# ---------------------------------------------------------------------------
# Pair rendering / parsing
# ---------------------------------------------------------------------------


def render_pairs(pairs: Iterable[AspectSentimentPair]) -> str:
    """Canonical list-of-lists notation, e.g. [["Food", "Positive"]]."""
    inner = ", ".join(
        f'["{p.aspect.value}", "{p.sentiment.value}"]' for p in sort_pairs(pairs)
    )
    return f"[{inner}]"


_QUOTE_CLOSERS = {
    '"': '"',
    "'": "'",
    "“": "”",  # curly double
    "‘": "’",  # curly single
}


def _balanced_spans(text: str) -> List[str]:
    """Top-level balanced [...] spans, left to right. Unbalanced brackets are
    simply never closed and drop out."""
    spans: List[str] = []
    depth = 0
    start = -1
    for i, ch in enumerate(text):
        if ch == "[":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "]":
            if depth > 0:
                depth -= 1
                if depth == 0:
                    spans.append(text[start : i + 1])
    return spans


def _scan_string_groups(span: str) -> Optional[List[List[str]]]:
    """Parse one span as a list of bracketed quoted-string groups, tolerating
    loose commas and whitespace. None if the span is not of that shape."""
    inner = span[1:-1]
    i = 0
    groups: List[List[str]] = []
    n = len(inner)

    def _skip_separators(j: int) -> int:
        while j < n and (inner[j].isspace() or inner[j] == ","):
            j += 1
        return j

    i = _skip_separators(i)
    while i < n:
        if inner[i] != "[":
            return None
        i += 1
        strings: List[str] = []
        while True:
            i = _skip_separators(i)
            if i >= n:
                return None
            if inner[i] == "]":
                i += 1
                break
            closer = _QUOTE_CLOSERS.get(inner[i])
            if closer is None:
                return None
            end = inner.find(closer, i + 1)
            if end == -1:
                return None
            strings.append(inner[i + 1 : end])
            i = end + 1
        groups.append(strings)
        i = _skip_separators(i)
    return groups


def _strip_stray_commas(label: str) -> str:
    # Tolerate output that puts the separating comma inside the quotes.
    return label.strip().strip(",").strip()


def parse_pair_list(raw_llm_output: str) -> FrozenSet[AspectSentimentPair]:
    """Extract the final aspect-sentiment pair list from a model response.

    Scans balanced bracket structures from the end (responses carry CLUES and
    REASONING prose first; the final structure is the answer). An empty list
    parses to the empty set.
    """
    for span in reversed(_balanced_spans(raw_llm_output)):
        groups = _scan_string_groups(span)
        if groups is None:
            continue
        pairs = set()
        for strings in groups:
            if len(strings) != 2:
                raise MalformedPair(
                    f"expected two labels per pair, got {len(strings)}: {strings!r}"
                )
            aspect = parse_aspect(_strip_stray_commas(strings[0]))
            sentiment = parse_sentiment(_strip_stray_commas(strings[1]))
            pairs.add(AspectSentimentPair(aspect, sentiment))
        return frozenset(pairs)
    raise NoPairListFound("no aspect-sentiment pair list in model output")


# ---------------------------------------------------------------------------
# Bullet parsing
# ---------------------------------------------------------------------------

_BULLET_LINE = re.compile(
    r"^\s*(?:[-*•‣·▪●]|\d{1,3}[.)])\s+(.*\S)\s*$"
)


def parse_bullets(raw_llm_output: str) -> List[str]:
    """Bullet lines (hyphen, asterisk, bullet glyph, or numbered), in order,
    markers stripped, empty bullets dropped."""
    bullets = []
    for line in raw_llm_output.split("\n"):
        m = _BULLET_LINE.match(line)
        if m:
            bullets.append(m.group(1))
    if not bullets and raw_llm_output.strip():
        raise NoBulletsFound("model output has no bullet lines")
    return bullets


# ---------------------------------------------------------------------------
# Prompt builders
# ---------------------------------------------------------------------------


def _render_classification_example(example: FewShotExample) -> List[str]:
    return [
        "INPUT:",
        fence_block(example.input_text),
        "",
        f"CLUES: {example.clues or '(omitted)'}",
        "",
        f"REASONING: {example.reasoning or '(omitted)'}",
        "",
        f"ASPECT-SENTIMENT Pairs: {render_pairs(example.expected_pairs)}",
        "",
    ]


def _render_carp(review_text: str, examples: Sequence[FewShotExample]) -> str:
    if not review_text.strip():
        raise EmptyReview("cannot build a classification prompt for an empty review")
    parts = [
        CARP_TASK_LINE,
        "",
        _CARP_STEP_ONE,
        "",
        _CARP_STEP_TWO,
        "",
        _CARP_STEP_THREE,
        "",
        _CARP_OUTPUT_RULE,
        ASPECT_VOCABULARY_LINE,
        SENTIMENT_VOCABULARY_LINE,
        "",
    ]
    if examples:
        parts.append("EXAMPLES:")
        parts.append("")
        for example in examples:
            parts.extend(_render_classification_example(example))
    parts.append("INPUT:")
    parts.append(fence_block(review_text))
    return "\n".join(parts) + "\n"


def _render_reviews_block(review_texts: Sequence[str]) -> str:
    return "\n".join(fence_block(text) for text in review_texts)


def _render_summary_example(example: SummaryFewShotExample) -> List[str]:
    parts = [
        "Reviews:",
        _render_reviews_block(example.input_reviews),
        "",
        "Directional Stimuli:",
        f"Main Aspect: {example.aspect.value}",
        f"Desired Sentiment: {example.sentiment.value}",
        "",
        "Output Summary:",
    ]
    parts.extend(f"- {bullet}" for bullet in example.bullets)
    parts.append("")
    return parts


def _render_dsp(
    review_texts: Sequence[str],
    aspect: Aspect,
    sentiment: Sentiment,
    examples: Sequence[SummaryFewShotExample],
) -> str:
    if not review_texts:
        raise EmptyBucket("cannot build a summarization prompt for an empty bucket")
    reviews_block = _render_reviews_block(review_texts)
    parts = [
        DSP_TASK_LINE,
        "",
        "Reviews:",
        reviews_block,
        "",
        "Directional Stimuli:",
        f"Main Aspect: {aspect.value}",
        f"Desired Sentiment: {sentiment.value}",
        "",
        OUTPUT_INSTRUCTION_LINE,
        "",
    ]
    if examples:
        parts.append("Examples:")
        parts.append("")
        for example in examples:
            parts.extend(_render_summary_example(example))
    parts.append("INPUT:")
    parts.append("")
    parts.append("Reviews:")
    parts.append(reviews_block)
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# Versioning
# ---------------------------------------------------------------------------


def _example_fingerprint(example: FewShotExample) -> list:
    return [
        example.input_text,
        [[p.aspect.value, p.sentiment.value] for p in sort_pairs(example.expected_pairs)],
        example.clues,
        example.reasoning,
    ]


def _summary_fingerprint(example: SummaryFewShotExample) -> list:
    return [
        list(example.input_reviews),
        example.aspect.value,
        example.sentiment.value,
        list(example.bullets),
    ]


def compute_prompt_version(
    classification_examples: Sequence[FewShotExample],
    summary_examples: Sequence[SummaryFewShotExample],
) -> str:
    """Content hash over template text and both example stores. Any single
    character change anywhere yields a different version."""
    payload = json.dumps(
        {
            "templates": list(_TEMPLATE_PARTS),
            "classification": [_example_fingerprint(e) for e in classification_examples],
            "summary": [_summary_fingerprint(e) for e in summary_examples],
        },
        ensure_ascii=False,
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def build_carp_prompt(
    review_text: str,
    examples: Sequence[FewShotExample],
    prompt_version: Optional[str] = None,
) -> PromptText:
    version = prompt_version or compute_prompt_version(examples, ())
    return PromptText(_render_carp(review_text, examples), version)


def build_dsp_prompt(
    review_texts: Sequence[str],
    aspect: Aspect,
    sentiment: Sentiment,
    examples: Sequence[SummaryFewShotExample],
    prompt_version: Optional[str] = None,
) -> PromptText:
    version = prompt_version or compute_prompt_version((), examples)
    return PromptText(_render_dsp(review_texts, aspect, sentiment, examples), version)


# ---------------------------------------------------------------------------
# Example stores
# ---------------------------------------------------------------------------


def _pairs_from_records(records: Iterable[Sequence[str]]) -> FrozenSet[AspectSentimentPair]:
    return frozenset(
        AspectSentimentPair(parse_aspect(a), parse_sentiment(s)) for a, s in records
    )


def load_classification_examples(path) -> Tuple[FewShotExample, ...]:
    """Load a classification example store: a JSON array of
    {input, pairs, clues?, reasoning?} records."""
    with open(path, encoding="utf-8") as handle:
        records = json.load(handle)
    return tuple(
        FewShotExample(
            input_text=rec["input"],
            expected_pairs=_pairs_from_records(rec["pairs"]),
            clues=rec.get("clues"),
            reasoning=rec.get("reasoning"),
        )
        for rec in records
    )


def load_summary_examples(path) -> Tuple[SummaryFewShotExample, ...]:
    """Load a summarization example store: a JSON array of
    {reviews, aspect, sentiment, bullets} records."""
    with open(path, encoding="utf-8") as handle:
        records = json.load(handle)
    return tuple(
        SummaryFewShotExample(
            input_reviews=tuple(rec["reviews"]),
            aspect=parse_aspect(rec["aspect"]),
            sentiment=parse_sentiment(rec["sentiment"]),
            bullets=tuple(rec["bullets"]),
        )
        for rec in records
    )


def _data_path(name: str):
    return resources.files("quickcue").joinpath("data", name)


def default_classification_examples() -> Tuple[FewShotExample, ...]:
    with resources.as_file(_data_path("classification_examples.json")) as path:
        return load_classification_examples(path)


def default_summary_examples() -> Tuple[SummaryFewShotExample, ...]:
    with resources.as_file(_data_path("summary_examples.json")) as path:
        return load_summary_examples(path)


class PromptEngine:
    """Owns the example stores and stamps every prompt with one version that
    covers the template text plus both stores."""

    def __init__(
        self,
        classification_examples: Optional[Sequence[FewShotExample]] = None,
        summary_examples: Optional[Sequence[SummaryFewShotExample]] = None,
    ):
        self.classification_examples = (
            tuple(classification_examples)
            if classification_examples is not None
            else default_classification_examples()
        )
        self.summary_examples = (
            tuple(summary_examples)
            if summary_examples is not None
            else default_summary_examples()
        )
        self.prompt_version = compute_prompt_version(
            self.classification_examples, self.summary_examples
        )

    def build_carp_prompt(self, review_text: str) -> PromptText:
        return build_carp_prompt(
            review_text, self.classification_examples, self.prompt_version
        )

    def build_dsp_prompt(
        self, review_texts: Sequence[str], aspect: Aspect, sentiment: Sentiment
    ) -> PromptText:
        return build_dsp_prompt(
            review_texts, aspect, sentiment, self.summary_examples, self.prompt_version
        )
