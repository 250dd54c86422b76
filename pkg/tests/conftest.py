"""Replays the acceptance verdict lines after the run.

pytest captures stdout of passing tests, which would bury the
``criterion NN PASS`` lines. The hooks below collect them from the
captured output and print the whole block in the terminal summary.
"""

import re

_CRITERION = re.compile(r"^criterion \d{2} (?:PASS|FAIL): .*$", re.MULTILINE)
_verdicts = []


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    for title, text in report.sections:
        if "stdout" in title:
            _verdicts.extend(_CRITERION.findall(text))


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(set(_verdicts)):
        terminalreporter.write_line(line)
