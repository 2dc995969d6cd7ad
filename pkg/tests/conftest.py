import pytest

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion number")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            n, text = m.args
            _criteria.setdefault(n, {"text": text, "outcomes": []})
            item.user_properties.append(("criterion", n))


def pytest_runtest_logreport(report):
    n = dict(report.user_properties).get("criterion")
    if n is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _criteria[n]["outcomes"].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    ran = {n: c for n, c in _criteria.items() if c["outcomes"]}
    if not ran:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ran):
        c = ran[n]
        ok = all(o == "passed" for o in c["outcomes"])
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {c['text']}")


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20261015)
