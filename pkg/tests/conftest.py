import pytest

ACCEPTANCE_LINES = {}


@pytest.fixture
def record_criterion():
    def record(cid, title, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        ACCEPTANCE_LINES[cid] = f"[{status}] criterion {cid:2d}: {title}" + (f"  {detail}" if detail else "")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[cid])
