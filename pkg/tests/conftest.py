import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    cid, title = mark.args
    if rep.when == "setup" and rep.passed:
        return
    if hasattr(rep, "wasxfail"):
        status = "FAIL (known, see decisions ledger)" if rep.skipped else "PASS (unexpectedly)"
    elif rep.passed:
        status = "PASS"
    elif rep.skipped:
        status = "SKIPPED"
    else:
        status = "FAIL"
    prev = _RESULTS.get(cid)
    if prev is None or prev[1] == "PASS":
        _RESULTS[cid] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")

    def key(c):
        num = "".join(ch for ch in c if ch.isdigit())
        return (int(num), c)

    for cid in sorted(_RESULTS, key=key):
        title, status = _RESULTS[cid]
        terminalreporter.write_line(f"criterion {cid:<3} {status:<36} {title}")
