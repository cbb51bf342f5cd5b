"""Shared pytest hooks.

The acceptance tests append one verdict line each; echoing them from the
terminal-summary hook keeps them visible in a plain ``pytest -v`` run,
where per-test capture would otherwise swallow prints from passing tests.
"""

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance checklist")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
