import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "acceptance(criterion, description): marks a test as (part of) an "
        "acceptance criterion; the terminal summary prints one PASS/FAIL "
        "line per criterion",
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when != "call":
        return
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    cid = marker.kwargs["criterion"]
    desc = marker.kwargs["description"]
    prev_desc, prev_ok = _RESULTS.get(cid, (desc, True))
    _RESULTS[cid] = (prev_desc, prev_ok and rep.passed)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_RESULTS):
        desc, ok = _RESULTS[cid]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {cid}: {status} - {desc}")
