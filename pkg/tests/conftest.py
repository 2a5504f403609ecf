import pytest

# (criterion id, description, passed, detail) recorded by test_acceptance
ACCEPTANCE: list[tuple[str, str, bool, str]] = []


@pytest.fixture
def criterion():
    def record(cid: str, description: str, passed: bool, detail: str = "") -> None:
        ACCEPTANCE.append((cid, description, bool(passed), detail))
        assert passed, f"{cid} {description}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid, description, passed, detail in ACCEPTANCE:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status} {cid:<6} {description} [{detail}]")
