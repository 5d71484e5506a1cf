import pytest

# lines "PASS criterion n: ..." collected by the acceptance suite
ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    def report(number, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}"
        ACCEPTANCE_LINES.append((number, line))
        print(line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES, key=lambda item: (len(str(item[0])), str(item[0]))):
            terminalreporter.write_line(line)
