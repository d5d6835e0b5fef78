import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    # expose the call-phase report to fixtures for PASS/FAIL lines
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep
