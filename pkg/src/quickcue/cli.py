"""Command line interface: classify, digest, eval, serve."""

from __future__ import annotations

import json
import logging
import sys
from importlib import resources

import click

from .config import ConfigError, load_service_config
from .evaluation import EmptyDataset, evaluate_classifier
from .pipeline import GatewayUnavailable
from .runner import PipelineRunner
from .wire import (
    SchemaError,
    format_report,
    load_gold_file,
    load_predictions_file,
    render_document,
    report_document,
)

logger = logging.getLogger(__name__)

_RUNTIME_ERRORS = (ConfigError, SchemaError, GatewayUnavailable, EmptyDataset, OSError, ValueError)


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _run_document(kind: str, input_path: str, output_path: str, mode: str, config_path):
    try:
        config = load_service_config(config_path)
        runner = PipelineRunner(config, mode=mode)
        with open(input_path, encoding="utf-8") as handle:
            data = json.load(handle)
        if kind == "classify":
            doc = runner.classify_document_for(data)
        else:
            doc = runner.digest_document_for(data)
        with open(output_path, "w", encoding="utf-8") as handle:
            handle.write(render_document(doc))
    except json.JSONDecodeError as exc:
        _fail(f"{input_path} is not valid JSON: {exc}")
    except _RUNTIME_ERRORS as exc:
        _fail(str(exc))
    click.echo(f"wrote {output_path}")


@click.group()
def main():
    """Review digests for screen reader users: classification,
    summarization, evaluation, and the REST service."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "output_path", required=True, type=click.Path(dir_okay=False))
@click.option("--mode", type=click.Choice(["mock", "live"]), default="mock", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
def classify(input_path, output_path, mode, config_path):
    """Classify a review-set file; write the classification document."""
    _run_document("classify", input_path, output_path, mode, config_path)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "output_path", required=True, type=click.Path(dir_okay=False))
@click.option("--mode", type=click.Choice(["mock", "live"]), default="mock", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
def digest(input_path, output_path, mode, config_path):
    """Build the full five-aspect digest for a review-set file."""
    _run_document("digest", input_path, output_path, mode, config_path)


@main.command("eval")
@click.option("--gold", "gold_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--pred", "pred_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "output_path", type=click.Path(dir_okay=False),
              help="Also write the report as JSON.")
@click.option("--reference/--no-reference", default=False,
              help="Print published reference targets alongside the measured metrics.")
def eval_command(gold_path, pred_path, output_path, reference):
    """Score predictions against gold annotations."""
    try:
        gold = load_gold_file(gold_path)
        predictions = load_predictions_file(pred_path)
        report = evaluate_classifier(gold, predictions)
    except json.JSONDecodeError as exc:
        _fail(f"input is not valid JSON: {exc}")
    except _RUNTIME_ERRORS as exc:
        _fail(str(exc))
    targets = None
    if reference:
        path = resources.files("quickcue").joinpath("data", "reference_targets.json")
        targets = json.loads(path.read_text(encoding="utf-8"))
    click.echo(format_report(report, targets), nl=False)
    if output_path:
        with open(output_path, "w", encoding="utf-8") as handle:
            handle.write(render_document(report_document(report, targets)))


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--port", type=int, help="Override the configured port.")
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(config_path, port, host):
    """Run the REST service until interrupted."""
    import uvicorn

    from .service import create_app

    try:
        config = load_service_config(config_path)
    except _RUNTIME_ERRORS as exc:
        _fail(str(exc))
    app = create_app(config)
    uvicorn.run(app, host=host, port=port or config.port, log_level="info")


if __name__ == "__main__":
    main()
