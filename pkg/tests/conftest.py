"""Collects the acceptance tests by criterion number and prints one line each."""
import pytest

_outcomes: dict[int, list] = {}
_titles: dict[int, str] = {}
_notes: dict[int, list[str]] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            n = m.args[0]
            _outcomes.setdefault(n, [])
            if len(m.args) > 1:
                _titles.setdefault(n, m.args[1])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None:
        return
    n = m.args[0]
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        reason = ""
        if rep.skipped and isinstance(rep.longrepr, tuple):
            reason = rep.longrepr[2]
        _outcomes[n].append((item.name, rep.outcome, reason))
        for key, value in item.user_properties:
            if key == "observed":
                _notes.setdefault(n, []).append(f"{item.name}: {value}")


@pytest.fixture
def observe(request):
    """Record an observed value so the criterion summary can show it."""
    def note(text):
        request.node.user_properties.append(("observed", text))
    return note


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_outcomes):
        results = _outcomes[n]
        if not results:
            continue
        kinds = {r[1] for r in results}
        if "failed" in kinds:
            verdict = "FAIL"
        elif kinds == {"skipped"}:
            verdict = "SKIP"
        else:
            verdict = "PASS"
        failed = [name for name, o, _ in results if o == "failed"]
        skipped = [f"{name} ({why})" for name, o, why in results if o == "skipped"]
        line = f"criterion {n:2d} {verdict:4s} {_titles.get(n, '')}"
        if failed:
            line += f"  failed: {', '.join(failed)}"
        if skipped:
            line += f"  skipped: {'; '.join(skipped)}"
        tr.write_line(line)
        for note in _notes.get(n, []):
            tr.write_line(f"              {note}")
