import pytest

# criterion number -> (passed, detail); filled by the `acceptance` fixture
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


class _Recorder:
    def __init__(self, number: int):
        self.number = number
        self.detail = ""

    def note(self, detail: str) -> None:
        self.detail = detail


@pytest.fixture
def acceptance(request):
    number = request.node.get_closest_marker("criterion").args[0]
    rec = _Recorder(number)
    yield rec
    rep = getattr(request.node, "rep_call", None)
    passed = rep is not None and rep.passed
    ACCEPTANCE_RESULTS[number] = (passed, rec.detail)


@pytest.hookimpl(wrapper=True, tryfirst=True)
def pytest_runtest_makereport(item, call):
    rep = yield
    if rep.when == "call":
        item.rep_call = rep
    return rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {detail}")
