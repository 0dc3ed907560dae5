import os
import sys
from pathlib import Path

import pytest
from hypothesis import settings

from meaningspace.synthetic import planted_records

settings.register_profile("default", deadline=None, max_examples=100)
settings.register_profile("ci", deadline=None, max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data" / "synthetic_corpus.jsonl"
GOLDEN = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def planted():
    return planted_records()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    RESULTS = mod.RESULTS
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        status, detail = RESULTS[key]
        terminalreporter.write_line(f"[{status}] criterion {key}: {detail}")
