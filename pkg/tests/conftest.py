from pathlib import Path

import pytest

from contrait.metaeval import eval_program
from contrait.parser import parse_program, parse_trait
from contrait.typecheck import check_program

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "src" / "contrait" / "corpus"
FIXTURES = Path(__file__).resolve().parent / "fixtures"
POW = CORPUS / "30-pow.trait"


def program(*paths, extra: str = ""):
    text = "\n".join(Path(p).read_text() for p in paths) + extra
    p = parse_program(text, "<test>")
    errors = check_program(p)
    assert not errors, errors
    return p


@pytest.fixture(scope="session")
def pow_program():
    return program(POW)


@pytest.fixture(scope="session")
def pow_env(pow_program):
    return eval_program(pow_program)


@pytest.fixture
def trait():
    return parse_trait


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
