def pytest_terminal_summary(terminalreporter):
    """Echo the one-line acceptance verdicts after the test run."""
    try:
        from test_acceptance import RESULT_LINES
    except ImportError:
        return
    if RESULT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in RESULT_LINES:
            terminalreporter.write_line(line)
