"""Collects the outcome of each acceptance criterion for a one-line summary."""

_outcomes: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = report.keywords.get("acceptance")
    if not marker:
        return
    name = report.nodeid.split("::")[-1]
    label = name.removeprefix("test_").split("_", 1)[0].upper()
    _outcomes[label] = ("PASS" if report.passed else "FAIL", name)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_outcomes, key=lambda k: int(k[1:])):
        status, name = _outcomes[label]
        terminalreporter.write_line(f"{label:>4} {status}  {name}")
