import _acceptance_log


def pytest_terminal_summary(terminalreporter):
    if not any(_acceptance_log.RESULTS.values()):
        return
    terminalreporter.section("acceptance criteria")
    for line in _acceptance_log.lines():
        terminalreporter.write_line(line)
