import pytest

from fsrlab import compile_rule, load_fixture

FIXTURES = ("pillow2", "columns2", "barycentric", "triangles3")

_CRITERIA: dict[int, str] = {}


@pytest.fixture(params=FIXTURES)
def fixture_name(request):
    return request.param


@pytest.fixture
def spec(fixture_name):
    return load_fixture(fixture_name)


@pytest.fixture
def rule(spec):
    return compile_rule(spec)


@pytest.fixture
def record_criterion():
    """Record one pass/fail line per acceptance criterion for the terminal summary."""

    def record(number: int, passed: bool, text: str) -> None:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {text}"
        _CRITERIA[number] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[k])

