from pathlib import Path

import pytest

from cmapstruct.corpus import read_corpus
from cmapstruct.extraction import read_triples
from cmapstruct.framework import read_registry

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
REGISTRY = ROOT / "registry" / "dc-circuit.rel"


@pytest.fixture(scope="session")
def fixture_corpus():
    return read_corpus(FIXTURES / "dc-corpus.txt")


@pytest.fixture(scope="session")
def seed_registry():
    return read_registry(REGISTRY)


@pytest.fixture(scope="session")
def worked_triples():
    return read_triples(FIXTURES / "worked-example.triples")


def tagged(text, sid="t-1"):
    """Build corpus text for one sentence from 'word/POS[/stem]' items."""
    lines = [f"#S {sid}"]
    for item in text.split():
        parts = item.split("/")
        word, pos = parts[0], parts[1]
        stem = parts[2] if len(parts) > 2 else word.lower()
        lines.append(f"{word}\t{pos}\t\t{stem}")
    return "\n".join(lines) + "\n"


# -- acceptance summary ---------------------------------------------------------

ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(line)
