import pytest

from skelfac import bench

ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def squares_records():
    return bench.run_squares2d()


@pytest.fixture(scope="session")
def plates_records():
    return bench.run_plates3d()


@pytest.fixture
def acceptance(request):
    """Call with (number, ok, detail) to report one acceptance criterion."""
    log = request.config.stash.setdefault(ACCEPTANCE_KEY, {})

    def report(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        log[number] = line
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(ACCEPTANCE_KEY, {})
    if log:
        terminalreporter.section("acceptance criteria")
        for number in sorted(log):
            terminalreporter.write_line(log[number])
