import os
import time
from contextlib import contextmanager

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("dev", deadline=None, max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


ACCEPTANCE_KEY = pytest.StashKey[dict]()


class _Recorder:
    def __init__(self, store):
        self.store = store

    @contextmanager
    def criterion(self, number: int, title: str):
        t0 = time.perf_counter()
        self.store[number] = (title, False, 0.0)
        yield
        # only reached when the body completes; a failure leaves the FAIL entry
        self.store[number] = (title, True, time.perf_counter() - t0)


@pytest.fixture
def acceptance(request):
    return _Recorder(request.config.stash.setdefault(ACCEPTANCE_KEY, {}))


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(ACCEPTANCE_KEY, {})
    if not results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(results):
        title, ok, secs = results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}  ({secs:.2f}s)")
