import contextlib
import time

import pytest

from clusterbound import _backend

BACKENDS = [b for b in _backend.BACKENDS if b != "numba" or _backend.HAVE_NUMBA]

_RESULTS = []


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


class Criterion:
    def __init__(self, number, title, time_limit):
        self.number = number
        self.title = title
        self.time_limit = time_limit
        self.checks = []
        self.elapsed = None
        self.passed = False

    def check(self, condition, detail):
        self.checks.append((bool(condition), detail))

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        details = "; ".join(d for _, d in self.checks)
        return (f"[{status}] criterion {self.number:>2}: {self.title} "
                f"({self.elapsed:.2f}s < {self.time_limit:g}s) {details}")


@pytest.fixture
def criterion():
    @contextlib.contextmanager
    def run(number, title, time_limit):
        c = Criterion(number, title, time_limit)
        start = time.perf_counter()
        completed = False
        try:
            yield c
            completed = True
        finally:
            c.elapsed = time.perf_counter() - start
            c.passed = completed and all(ok for ok, _ in c.checks) and c.elapsed < time_limit
            _RESULTS.append(c)
            print(c.line())
        for ok, detail in c.checks:
            assert ok, detail
        assert c.elapsed < time_limit, f"took {c.elapsed:.2f}s, limit {time_limit}s"

    return run


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for c in sorted(_RESULTS, key=lambda c: c.number):
        terminalreporter.write_line(c.line())
