import pytest

from tidykit import catalog


@pytest.fixture(scope="session")
def corpus():
    """The pinned default corpus, built once per test session."""
    return catalog.build_corpus(catalog.default_corpus_spec())


@pytest.fixture(scope="session")
def corpus_entries():
    return catalog.build_corpus_entries(catalog.default_corpus_spec())


ACCEPTANCE: dict[int, tuple[str, str]] = {}


def record_acceptance(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = ("PASS" if ok else "FAIL", line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number][1])
