import json
from pathlib import Path

import pytest

from email_profiler.config import load_config

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def config():
    return load_config()


@pytest.fixture(scope="session")
def stopwords(config):
    return config.stopwords


@pytest.fixture(scope="session")
def oracle_records():
    lines = (FIXTURES / "oracle_corpus.jsonl").read_text().splitlines()
    return [json.loads(line) for line in lines]


@pytest.fixture(scope="session")
def oracle_expected():
    return json.loads((FIXTURES / "oracle_expected.json").read_text())


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the test body sets ``.detail``."""

    class Line:
        detail = ""

    line = Line()
    yield line
    rep = getattr(request.node, "rep_call", None)
    status = "PASS" if rep is not None and rep.passed else "FAIL"
    ACCEPTANCE_LINES.append(f"[{status}] {request.node.name}: {line.detail}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
