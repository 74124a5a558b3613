def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one [PASS]/[FAIL] line per recorded acceptance criterion."""
    try:
        from tests.acceptance_report import RESULTS
    except ImportError:
        from acceptance_report import RESULTS
    if not RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, ok, detail in RESULTS:
        line = f"[{'PASS' if ok else 'FAIL'}] {name}"
        if detail:
            line += f" — {detail}"
        terminalreporter.write_line(line)
