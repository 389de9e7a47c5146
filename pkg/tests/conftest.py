from pathlib import Path

import pytest

from nbpipe.evaluator import parse_matrix_text

DATA = Path(__file__).parent / "data"

_acceptance: list[tuple[str, str]] = []


@pytest.fixture
def run1_matrix():
    return parse_matrix_text((DATA / "run1_matrix.txt").read_text(encoding="utf-8"))


@pytest.fixture
def run2_matrix():
    return parse_matrix_text((DATA / "run2_matrix.txt").read_text(encoding="utf-8"))


def make_tree(root: Path, files: dict[str, bytes | str]) -> Path:
    """Create files under root from a {relative/path: content} mapping."""
    for rel, content in files.items():
        p = root / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(content, str):
            content = content.encode("utf-8")
        p.write_bytes(content)
    return root


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))
    elif "test_acceptance.py" in report.nodeid and report.when == "setup" and report.failed:
        _acceptance.append((report.nodeid.split("::")[-1], "error"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
