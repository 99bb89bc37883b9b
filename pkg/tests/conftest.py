import os
import sys

from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


# one PASS/FAIL line per acceptance criterion, printed after the run
_ACCEPTANCE = []


def pytest_runtest_makereport(item, call):
    if call.when != "call" or not item.nodeid.startswith("tests/test_acceptance.py"):
        return
    detail = dict(item.user_properties).get("detail", "")
    status = "PASS" if call.excinfo is None else "FAIL"
    _ACCEPTANCE.append(f"{status}  {item.name}  {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
