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

"""Base formatter with shared functionality for all formatters."""

from __future__ import annotations

from typing import TYPE_CHECKING

import colorama
from colorama import Fore, Style

if TYPE_CHECKING:
    from beliefsearch.harness.verification import VerificationSummary
    from beliefsearch.planning.models import RunReport

# Initialize colorama for cross-platform color support
colorama.init()


class BaseFormatter:
    """Base formatter providing common formatting functionality."""

    def _format_value(self, value: float | None, digits: int = 6) -> str:
        """Format an optional real, rendering a missing value as a dash."""
        if value is None:
            return "-"
        return f"{value:.{digits}g}"

    def _format_status(self, passed: bool) -> str:
        color = Fore.GREEN if passed else Fore.RED
        label = "PASS" if passed else "FAIL"
        return f"{color}{label}{Style.RESET_ALL}"

    def _format_branch(self, action: int, value: float, depth: int | None, chosen: bool) -> str:
        marker = f"{Fore.YELLOW}*{Style.RESET_ALL}" if chosen else " "
        depth_text = "" if depth is None else f"  depth {depth}"
        return f" {marker} action {action}: {self._format_value(value)}{depth_text}"

    def format_report(self, report: RunReport) -> str:
        """Format a planner run. Must be implemented by subclasses."""
        raise NotImplementedError

    def format_verification(self, summary: VerificationSummary) -> str:
        """Format a verification summary. Must be implemented by subclasses."""
        raise NotImplementedError
