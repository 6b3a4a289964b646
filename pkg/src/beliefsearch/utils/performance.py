# Copyright 2025 Beacon, shrwnsan
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Wall-clock measurement for planners, oracles and sweeps.

Timings go to the ``beliefsearch.performance`` logger. Planners read
``PerformanceTracker.elapsed_ms`` to fill ``RunReport.wallclock_ms``.
"""

from __future__ import annotations

import functools
import logging
import time
from collections.abc import Callable
from typing import Any, ParamSpec, TypeVar

from beliefsearch.config import performance_config

perf_logger = logging.getLogger("beliefsearch.performance")

P = ParamSpec("P")
R = TypeVar("R")


def monitor_performance(
    func_name: str | None = None,
    threshold_ms: int | None = None,
    log_level: int = logging.DEBUG,
) -> Callable[[Callable[P, R]], Callable[P, R]]:
    """Decorator logging the execution time of a function.

    Args:
        func_name: Optional custom name for the function in logs
        threshold_ms: Warn when a call exceeds this many milliseconds
            (defaults to ``performance_config.slow_operation_ms``)
        log_level: Logging level for normal performance logs
    """
    limit = threshold_ms if threshold_ms is not None else performance_config.slow_operation_ms

    def decorator(func: Callable[P, R]) -> Callable[P, R]:
        name = func_name or f"{func.__module__}.{func.__qualname__}"

        @functools.wraps(func)
        def wrapper(*args: P.args, **kwargs: P.kwargs) -> R:
            with PerformanceTracker(name, threshold_ms=limit, log_level=log_level):
                return func(*args, **kwargs)

        return wrapper

    return decorator


class PerformanceTracker:
    """Context manager timing a block of code.

    Example:
        with PerformanceTracker("sbb1_search") as tracker:
            ...
        report.wallclock_ms = tracker.elapsed_ms
    """

    def __init__(
        self,
        operation_name: str,
        threshold_ms: int | None = None,
        log_level: int = logging.DEBUG,
    ):
        self.operation_name = operation_name
        self.threshold_ms = threshold_ms
        self.log_level = log_level
        self._start: float | None = None
        self._stop: float | None = None

    def __enter__(self) -> PerformanceTracker:
        self._start = time.perf_counter()
        return self

    def __exit__(self, exc_type: Any, exc_val: Any, exc_tb: Any) -> None:
        self._stop = time.perf_counter()
        elapsed = self.elapsed_ms
        perf_logger.log(
            self.log_level, "Performance: %s executed in %.2fms", self.operation_name, elapsed
        )
        if self.threshold_ms and elapsed > self.threshold_ms:
            perf_logger.warning(
                "Performance warning: %s exceeded threshold (%.2fms > %dms)",
                self.operation_name,
                elapsed,
                self.threshold_ms,
            )

    @property
    def elapsed_ms(self) -> float:
        """Milliseconds since entering; final once the block has exited."""
        if self._start is None:
            return 0.0
        end = self._stop if self._stop is not None else time.perf_counter()
        return (end - self._start) * 1000.0
