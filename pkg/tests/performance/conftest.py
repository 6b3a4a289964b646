"""Configuration for acceptance-scale experiments."""

import time
from collections.abc import Callable
from typing import Any

import pytest


@pytest.fixture
def benchmark():
    """Simple benchmark fixture recording the duration of one call.

    Example:
        def test_something(benchmark):
            result = benchmark(lambda: some_function(arg1, arg2))
            assert benchmark.duration < 10.0
    """

    class Benchmark:
        def __call__(self, func: Callable[..., Any], *args, **kwargs) -> Any:
            start_time = time.perf_counter()
            result = func(*args, **kwargs)
            self.duration = time.perf_counter() - start_time
            return result

    return Benchmark()


@pytest.fixture(autouse=True)
def skip_slow_tests(request):
    """Skip performance tests unless explicitly requested with --runslow."""
    if "performance" in request.keywords and not request.config.getoption("--runslow"):
        pytest.skip("performance tests are skipped by default (use --runslow to run them)")
