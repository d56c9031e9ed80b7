import pytest

_ACCEPTANCE: dict[int, str] = {}


class _Reporter:
    def __call__(self, number: int, title: str, ok: bool, detail: str = "") -> bool:
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        # a criterion split over several tests fails if any part fails
        if number in _ACCEPTANCE and " FAIL " in _ACCEPTANCE[number] and ok:
            return ok
        _ACCEPTANCE[number] = line
        print(line)
        return ok


@pytest.fixture
def acceptance():
    return _Reporter()


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])
