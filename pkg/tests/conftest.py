from fractions import Fraction

import pytest

from fairmat.domain import ConstraintFamily, Instance

F = Fraction
HALF = Fraction(1, 2)


def frac_rows(rows):
    return tuple(tuple(Fraction(v) for v in row) for row in rows)


def free_instance(n, labels, prefs=None):
    prefs = prefs or [labels] * n
    return Instance.build(labels, prefs, [ConstraintFamily.free(len(labels))] * n)


@pytest.fixture
def ex1():
    from fairmat.instances import gallery

    return gallery("ex1").instance


@pytest.fixture
def ex2():
    from fairmat.instances import gallery

    return gallery("ex2").instance


# one summary line per acceptance criterion, printed after the run

_CRITERIA: dict[str, str] = {}
_OUTCOMES: dict[str, str] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        if item.nodeid.startswith("tests/test_acceptance.py::test_c"):
            doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
            _CRITERIA[item.nodeid] = doc


def pytest_runtest_logreport(report):
    if report.nodeid in _CRITERIA and (report.when == "call" or report.failed or report.skipped):
        if report.nodeid not in _OUTCOMES or report.failed:
            _OUTCOMES[report.nodeid] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for nodeid, doc in _CRITERIA.items():
        terminalreporter.write_line(f"{_OUTCOMES.get(nodeid, 'NOT RUN')}  {doc}")
