"""Service configuration: defaults, JSON config file loading, validation."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

from .gateway import GatewayConfig, GatewayMode
from .pipeline import SummarizeConfig
from .preprocess import PreprocessConfig

CONFIG_PATH_ENV = "QUICKCUE_CONFIG"

DEFAULT_PORT = 8787
DEFAULT_MAX_REVIEWS_PER_REQUEST = 500
# Scheme-restricted wildcard: any browser extension, no web origins.
DEFAULT_CORS_ORIGINS = ("chrome-extension://*",)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ServiceConfig:
    port: int = DEFAULT_PORT
    gateway: GatewayConfig = field(default_factory=GatewayConfig)
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    summarize: SummarizeConfig = field(default_factory=SummarizeConfig)
    cors_allowed_origins: Tuple[str, ...] = DEFAULT_CORS_ORIGINS
    max_reviews_per_request: int = DEFAULT_MAX_REVIEWS_PER_REQUEST
    classification_examples_path: Optional[str] = None
    summary_examples_path: Optional[str] = None
    lexicon_path: Optional[str] = None

    def __post_init__(self) -> None:
        if not 1 <= self.port <= 65535:
            raise ConfigError(f"port must be in 1..65535, got {self.port}")
        if self.max_reviews_per_request < 1:
            raise ConfigError("max_reviews_per_request must be >= 1")
        for label, path in (
            ("classification_examples_path", self.classification_examples_path),
            ("summary_examples_path", self.summary_examples_path),
            ("lexicon_path", self.lexicon_path),
        ):
            if path is not None and not Path(path).is_file():
                raise ConfigError(f"{label} does not exist: {path}")


def _gateway_from_dict(data: dict) -> GatewayConfig:
    kwargs = dict(data)
    if "mode" in kwargs:
        try:
            kwargs["mode"] = GatewayMode(kwargs["mode"])
        except ValueError:
            raise ConfigError(f"gateway.mode must be 'mock' or 'live', got {kwargs['mode']!r}")
    try:
        return GatewayConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad gateway config: {exc}") from exc


def _section(cls, data: dict, name: str):
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {name} config: {exc}") from exc


def load_service_config(path: Optional[str] = None) -> ServiceConfig:
    """Defaults overridden by the JSON file at ``path`` (or $QUICKCUE_CONFIG).
    No file anywhere means pure defaults (mock mode)."""
    path = path or os.environ.get(CONFIG_PATH_ENV)
    if path is None:
        return ServiceConfig()
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")

    known = {
        "port",
        "gateway",
        "preprocess",
        "summarize",
        "cors_allowed_origins",
        "max_reviews_per_request",
        "classification_examples_path",
        "summary_examples_path",
        "lexicon_path",
    }
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    kwargs: dict = {}
    if "port" in data:
        kwargs["port"] = data["port"]
    if "gateway" in data:
        kwargs["gateway"] = _gateway_from_dict(data["gateway"])
    if "preprocess" in data:
        kwargs["preprocess"] = _section(PreprocessConfig, data["preprocess"], "preprocess")
    if "summarize" in data:
        kwargs["summarize"] = _section(SummarizeConfig, data["summarize"], "summarize")
    if "cors_allowed_origins" in data:
        kwargs["cors_allowed_origins"] = tuple(data["cors_allowed_origins"])
    for key in (
        "max_reviews_per_request",
        "classification_examples_path",
        "summary_examples_path",
        "lexicon_path",
    ):
        if key in data:
            kwargs[key] = data[key]
    return ServiceConfig(**kwargs)
