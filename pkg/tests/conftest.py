import pytest


@pytest.fixture
def criterion(record_property):
    """Tag an acceptance test with its criterion number and a short title."""

    def tag(number: int, title: str) -> None:
        record_property("criterion", number)
        record_property("title", title)

    return tag


def pytest_terminal_summary(terminalreporter):
    rows = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if getattr(report, "when", "call") != "call":
                continue
            props = dict(getattr(report, "user_properties", ()))
            if "criterion" in props:
                rows.append((props["criterion"], outcome, props["title"], report.duration))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for number, outcome, title, duration in sorted(rows):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}  ({duration:.2f}s)")
