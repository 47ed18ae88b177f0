"""REST surface: /v1/classify, /v1/digest, /health.

The endpoints share one pipeline with the CLI (see runner.py), so both
produce identical documents for identical inputs and configuration. Review
text never reaches the log at default verbosity.
"""

from __future__ import annotations

import json
import logging
import re
import time

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from starlette.concurrency import run_in_threadpool

from .config import ServiceConfig
from .pipeline import GatewayUnavailable
from .runner import PipelineRunner
from .wire import SchemaError, render_document

logger = logging.getLogger(__name__)


class TooManyReviews(ValueError):
    def __init__(self, count: int, limit: int):
        super().__init__(f"request carries {count} reviews, limit is {limit}")


def _error_response(status: int, code: str, message: str, field_path: str = None) -> Response:
    body = {"error": {"code": code, "message": message}}
    if field_path is not None:
        body["error"]["field_path"] = field_path
    return Response(
        content=render_document(body), status_code=status, media_type="application/json"
    )


def _json_response(doc: dict, status: int = 200) -> Response:
    return Response(
        content=render_document(doc), status_code=status, media_type="application/json"
    )


def _origin_patterns(origins) -> tuple:
    """Split configured origins into exact matches and a regex for entries
    containing ``*`` (e.g. chrome-extension://*)."""
    exact = [o for o in origins if "*" not in o]
    wild = [o for o in origins if "*" in o]
    regex = None
    if wild:
        parts = [".*".join(re.escape(p) for p in o.split("*")) for o in wild]
        regex = "^(" + "|".join(parts) + ")$"
    return exact, regex


def create_app(config: ServiceConfig = None) -> FastAPI:
    config = config or ServiceConfig()
    runner = PipelineRunner(config)
    app = FastAPI(title="quickcue", docs_url=None, redoc_url=None)
    app.state.runner = runner
    started = time.monotonic()

    exact_origins, origin_regex = _origin_patterns(config.cors_allowed_origins)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=exact_origins,
        allow_origin_regex=origin_regex,
        allow_methods=["GET", "POST", "OPTIONS"],
        allow_headers=["*"],
    )

    async def _read_review_set(request: Request) -> dict:
        raw = await request.body()
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"body is not valid JSON: {exc}")
        count = len(data.get("reviews", [])) if isinstance(data, dict) else 0
        if count > config.max_reviews_per_request:
            raise TooManyReviews(count, config.max_reviews_per_request)
        return data

    @app.exception_handler(SchemaError)
    async def _schema_error(request, exc: SchemaError):
        return _error_response(400, "SchemaError", str(exc), exc.field_path)

    @app.exception_handler(TooManyReviews)
    async def _too_many(request, exc: TooManyReviews):
        return _error_response(413, "TooManyReviews", str(exc))

    @app.exception_handler(GatewayUnavailable)
    async def _gateway_down(request, exc: GatewayUnavailable):
        return _error_response(502, "GatewayUnavailable", str(exc))

    @app.post("/v1/classify")
    async def classify(request: Request):
        data = await _read_review_set(request)
        doc = await run_in_threadpool(runner.classify_document_for, data)
        return _json_response(doc)

    @app.post("/v1/digest")
    async def digest(request: Request):
        data = await _read_review_set(request)
        doc = await run_in_threadpool(runner.digest_document_for, data)
        return _json_response(doc)

    @app.get("/health")
    async def health():
        degraded = not runner.gateway.credential_available()
        return _json_response(
            {
                "status": "degraded" if degraded else "ok",
                "mode": runner.gateway.mode.value,
                "prompt_version": runner.engine.prompt_version,
                "uptime_seconds": time.monotonic() - started,
            }
        )

    return app
