"""Shared pytest hooks for the test suite.

The acceptance tests record a one-line PASS/FAIL verdict per criterion;
pytest captures stdout, so the lines are replayed here in a dedicated
terminal-summary section where they are always visible.
"""

ACCEPTANCE_VERDICTS = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)
