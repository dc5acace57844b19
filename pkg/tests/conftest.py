import json

import pytest

from quizforge.model import Course, course_from_record
from quizforge.prompts import DesignResources, load_design_resources
from quizforge.resources import resource_path


@pytest.fixture(scope="session")
def corpus_course() -> Course:
    record = json.loads(resource_path("fixtures", "course_corpus.json").read_text(encoding="utf-8"))
    return course_from_record(record)


@pytest.fixture(scope="session")
def small_course() -> Course:
    record = json.loads(
        resource_path("fixtures", "course_practical_python.json").read_text(encoding="utf-8")
    )
    return course_from_record(record)


@pytest.fixture(scope="session")
def design_resources() -> DesignResources:
    return load_design_resources()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            if "test_acceptance.py" in getattr(report, "nodeid", ""):
                name = report.nodeid.split("::")[-1]
                lines.append((name, status.upper()))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, status in sorted(lines):
            terminalreporter.write_line(f"{status:<6} {name}")
