"""Shared pytest configuration.

Keeping a conftest in this directory puts it on sys.path, so test
modules can import the brute-force reference implementations in
oracles.py directly.
"""

import acceptance_report


def pytest_terminal_summary(terminalreporter):
    if acceptance_report.LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in acceptance_report.LINES:
            terminalreporter.write_line(line)
