"""Shared registry for acceptance-criterion outcomes.

test_acceptance.py records one entry per criterion; conftest.py prints them
as [PASS]/[FAIL] lines in the terminal summary so the gate is readable at a
glance even when every test passes.
"""

RESULTS: list[tuple[str, bool, str]] = []


def record(name: str, ok: bool, detail: str = "") -> bool:
    """Log a criterion outcome and return it (so callers can assert on it)."""
    RESULTS.append((name, bool(ok), detail))
    return bool(ok)
