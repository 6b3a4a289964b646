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

"""Standard output formatter."""

from __future__ import annotations

from typing import TYPE_CHECKING

from colorama import Fore, Style

from beliefsearch.utils.security import sanitize_path

from .base_formatter import BaseFormatter

if TYPE_CHECKING:
    from beliefsearch.harness.verification import VerificationSummary
    from beliefsearch.planning.models import RunReport


class StandardFormatter(BaseFormatter):
    """Plain text with colour highlights."""

    def _label(self, name: str) -> str:
        return f"{Fore.CYAN}{name}:{Style.RESET_ALL}"

    def format_report(self, report: RunReport) -> str:
        chosen = report.chosen_action
        output = [
            f"{self._label('Run')} {report.run_id or report.algorithm.value}",
            f"{self._label('Algorithm')} {report.algorithm.value}",
            f"{self._label('Seed')} {report.seed}",
            f"{self._label('Budget')} {report.budget:,}",
            f"{self._label('Chosen action')} {'-' if chosen is None else chosen}",
            f"{self._label('Leaf evaluations')} {report.leaf_evaluations:,}",
            f"{self._label('Node expansions')} {report.node_expansions:,}",
            f"{self._label('Max depth')} {report.max_depth_reached}",
        ]
        if report.regret is not None:
            output.append(f"{self._label('Regret')} {self._format_value(report.regret)}")
            width = self._format_value(report.bracket_width)
            output.append(f"{self._label('Bracket width')} {width}")
        output.append(f"{self._label('Wallclock')} {report.wallclock_ms:.1f} ms")

        if report.branch_values:
            output.append(f"\n{Fore.CYAN}Branches:{Style.RESET_ALL}")
            depths = report.branch_depths or (None,) * len(report.branch_values)
            for action, (value, depth) in enumerate(zip(report.branch_values, depths, strict=True)):
                output.append(self._format_branch(action, value, depth, action == chosen))
        if report.error:
            output.append(f"\n{Fore.RED}Error:{Style.RESET_ALL} {report.error}")
        return "\n".join(output)

    def format_verification(self, summary: VerificationSummary) -> str:
        output = [
            f"{Fore.CYAN}Check:{Style.RESET_ALL} {summary.check.value}",
            f"{Fore.CYAN}Trials:{Style.RESET_ALL} {summary.trials:,}",
            f"{Fore.CYAN}Confidence:{Style.RESET_ALL} {summary.confidence:g}",
            f"{Fore.CYAN}Result:{Style.RESET_ALL} {self._format_status(summary.passed)}",
            "",
        ]
        for row in summary.rows:
            status = self._format_status(row.dominated)
            if not row.required:
                status = f"{Style.DIM}info{Style.RESET_ALL}"
            output.append(
                f"  {row.parameter:<30} {row.point:>8g}  "
                f"{self._format_value(row.empirical):>12} <= {self._format_value(row.bound):<12} "
                f"{status}"
            )
        if summary.out_path is not None:
            output.append(f"\nWrote {len(summary.rows)} rows to {sanitize_path(summary.out_path)}")
        return "\n".join(output)
