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

"""Rich formatter for enhanced terminal output using the Rich library."""

from __future__ import annotations

from io import StringIO
from typing import TYPE_CHECKING

from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from .base_formatter import BaseFormatter

if TYPE_CHECKING:
    from beliefsearch.harness.verification import VerificationSummary
    from beliefsearch.planning.models import RunReport


class RichFormatter(BaseFormatter):
    """Tables and panels for terminals that render them."""

    def __init__(self, width: int = 120):
        self.width = width

    def _render(self, *renderables: object) -> str:
        buffer = StringIO()
        console = Console(file=buffer, width=self.width)
        for renderable in renderables:
            console.print(renderable)
        return buffer.getvalue()

    def format_report(self, report: RunReport) -> str:
        info = Table(box=box.ROUNDED, show_header=False)
        info.add_column("Field", style="cyan", no_wrap=True)
        info.add_column("Value", style="white")
        chosen = report.chosen_action
        info.add_row("Algorithm", f"[bold blue]{report.algorithm.value}[/bold blue]")
        info.add_row("Seed", str(report.seed))
        info.add_row("Budget", f"{report.budget:,}")
        info.add_row("Chosen action", "-" if chosen is None else f"[green]{chosen}[/green]")
        info.add_row("Leaf evaluations", f"{report.leaf_evaluations:,}")
        info.add_row("Node expansions", f"{report.node_expansions:,}")
        info.add_row("Max depth", str(report.max_depth_reached))
        if report.regret is not None:
            info.add_row("Regret", self._format_value(report.regret))
            info.add_row("Bracket width", self._format_value(report.bracket_width))
        info.add_row("Wallclock", f"{report.wallclock_ms:.1f} ms")
        if report.error:
            info.add_row("Error", f"[red]{report.error}[/red]")
        title = f"[bold]{report.run_id or 'Planner run'}[/bold]"
        renderables: list[object] = [Panel(info, title=title, border_style="blue")]

        if report.branch_values:
            branches = Table(box=box.SIMPLE, title="Branches", title_style="bold magenta")
            branches.add_column("Action", style="cyan", justify="right")
            branches.add_column("Value", justify="right")
            branches.add_column("Depth", justify="right")
            depths = report.branch_depths or (None,) * len(report.branch_values)
            for action, (value, depth) in enumerate(zip(report.branch_values, depths, strict=True)):
                style = "bold green" if action == chosen else "white"
                branches.add_row(
                    str(action),
                    f"[{style}]{self._format_value(value)}[/{style}]",
                    "-" if depth is None else str(depth),
                )
            renderables.append(branches)
        return self._render(*renderables)

    def format_verification(self, summary: VerificationSummary) -> str:
        status = "[green]PASS[/green]" if summary.passed else "[red]FAIL[/red]"
        table = Table(
            box=box.SIMPLE,
            title=f"{summary.check.value}: {status}",
            title_style="bold",
            caption=f"{summary.trials:,} trials, confidence {summary.confidence:g}",
        )
        table.add_column("Parameter", style="cyan")
        table.add_column("Point", justify="right")
        table.add_column("Empirical", justify="right")
        table.add_column("CI", justify="right")
        table.add_column("Bound", justify="right")
        table.add_column("", justify="center")
        for row in summary.rows:
            if not row.required:
                mark = "[dim]info[/dim]"
            else:
                mark = "[green]ok[/green]" if row.dominated else "[red]exceeded[/red]"
            table.add_row(
                row.parameter,
                f"{row.point:g}",
                self._format_value(row.empirical),
                f"[{self._format_value(row.ci_low, 4)}, {self._format_value(row.ci_high, 4)}]",
                self._format_value(row.bound),
                mark,
            )
        return self._render(table)
