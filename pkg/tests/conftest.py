import pytest

_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    failed = rep.failed or (rep.when == "setup" and rep.skipped)
    if rep.when == "call" or failed:
        detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
        # several tests may share a criterion; it passes only if all of them do
        _, prev_ok, prev_detail = _results.get(number, (title, True, ""))
        detail = "; ".join(d for d in (prev_detail, detail) if d)
        _results[number] = (title, prev_ok and not failed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        title, ok, detail = _results[number]
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
