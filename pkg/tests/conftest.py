import json
from pathlib import Path

import pytest

from quickcue.gateway import GatewayConfig, LLMGateway
from quickcue.prompts import PromptEngine
from quickcue.wire import review_set_from_dict

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def engine():
    return PromptEngine()


@pytest.fixture()
def mock_gateway():
    return LLMGateway(GatewayConfig())


@pytest.fixture(scope="session")
def fixture_corpus_dict():
    return json.loads((DATA_DIR / "fixture_reviews.json").read_text(encoding="utf-8"))


@pytest.fixture()
def fixture_corpus(fixture_corpus_dict):
    return review_set_from_dict(fixture_corpus_dict)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for status, label in (("passed", "PASS"), ("failed", "FAIL")):
        for report in terminalreporter.stats.get(status, []):
            if "test_acceptance" in report.nodeid:
                name = report.nodeid.split("::")[-1]
                lines.append((name, label))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, label in sorted(lines):
            terminalreporter.write_line(f"{label}  {name}")
