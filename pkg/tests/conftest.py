import time
from contextlib import contextmanager

import pytest

_RESULTS: dict[int, tuple[str, str, float]] = {}


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion, printed at the end of the run."""

    @contextmanager
    def run(num: int, title: str, budget: float | None = None):
        t0 = time.perf_counter()
        status = "FAIL"
        try:
            yield
            status = "PASS"
        finally:
            dt = time.perf_counter() - t0
            if status == "PASS" and budget is not None and dt > budget:
                status = "FAIL"
            _RESULTS[num] = (status, title, dt)
        if budget is not None:
            assert dt <= budget, f"criterion {num} took {dt:.1f}s, budget {budget}s"

    return run


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_RESULTS):
        status, title, dt = _RESULTS[num]
        terminalreporter.write_line(f"criterion {num:2d}: {status}  {title}  ({dt:.2f}s)")
