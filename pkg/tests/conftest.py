import numpy as np
import pytest

ACCEPTANCE = []


def record(criterion: str, passed, detail: str = ""):
    """Log one acceptance criterion; ``passed`` None means skipped."""
    ACCEPTANCE.append((criterion, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in ACCEPTANCE:
        status = "SKIP" if passed is None else "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status}  {criterion}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def corpus():
    from ope_sr.corpus import load_corpus

    return load_corpus()
