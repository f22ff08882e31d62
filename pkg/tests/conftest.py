import pytest

# criterion number -> (passed, detail); filled by the acceptance tests
ACCEPTANCE: dict = {}


def record(number, passed, detail):
    ACCEPTANCE[number] = (bool(passed), detail)
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    print(line)
    return passed


@pytest.fixture
def criterion():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
