#!/usr/bin/env python
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

"""Command-line interface for beliefsearch.

Exit codes: 0 success, 1 invalid input, 2 resource limits, 3 a verification
check that did not pass.
"""

from __future__ import annotations

import logging
import sys
from collections.abc import Callable
from functools import wraps
from pathlib import Path
from typing import Any, TypeVar

import click

from . import __version__
from .config import harness_config, search_defaults
from .exceptions import PlannerError, ResourceError, VerificationError
from .formatters import FORMATTERS
from .harness.problems import generate_problem
from .harness.regret import RegretOracle
from .harness.specs import load_problem, load_sweep
from .harness.sweep import format_csv, make_run_id, run_sweep
from .harness.verification import CHECK_LABELS, Check, verify
from .planning.models import Algorithm, SearchConfig
from .planning.search import backed_up_bounds, run_search
from .planning.tree import format_tree_dump, record_backup
from .utils.security import atomic_write_text, sanitize_path

logger = logging.getLogger(__name__)

EXIT_INVALID = 1
EXIT_RESOURCE = 2
EXIT_VERIFICATION = 3

F = TypeVar("F", bound=Callable[..., Any])


def _exit_code(error: PlannerError) -> int:
    if isinstance(error, ResourceError):
        return EXIT_RESOURCE
    if isinstance(error, VerificationError):
        return EXIT_VERIFICATION
    return EXIT_INVALID


def _echo(text: str, err: bool = False) -> None:
    try:
        click.echo(text, err=err)
    except UnicodeEncodeError:
        # Fallback for consoles with limited encoding support
        click.echo(text.encode("ascii", "replace").decode("ascii"), err=err)


def handle_errors(command: F) -> F:
    """Map package errors to an ``Error:`` line on stderr and the exit code."""

    @wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return command(*args, **kwargs)
        except PlannerError as error:
            logger.debug("Command failed", exc_info=True)
            _echo(f"Error: {error.get_safe_message()}", err=True)
            sys.exit(_exit_code(error))

    return wrapper  # type: ignore[return-value]


def _configure_logging(verbose: int) -> None:
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


@click.group(
    context_settings={"help_option_names": ["-h", "--help"]},
    epilog=(
        "Examples:\n\n"
        "  beliefsearch plan --problem bandit.json --algo sbb1 --budget 500\n\n"
        "  beliefsearch verify --check leaf-samples --trials 10000 --out l.csv\n\n"
        "  beliefsearch sweep --config sweep.json --out runs.csv"
    ),
)
@click.version_option(__version__, prog_name="beliefsearch")
@click.option("-v", "--verbose", count=True, help="Log at INFO (-v) or DEBUG (-vv) level.")
def cli(verbose: int) -> None:
    """Belief-tree planning for Bayes-adaptive MDPs."""
    _configure_logging(verbose)


ALGORITHMS = click.Choice([a.value for a in Algorithm], case_sensitive=False)
FORMATS = click.Choice(sorted(FORMATTERS), case_sensitive=False)


@cli.command()
@click.option(
    "--problem",
    "problem_path",
    required=True,
    type=click.Path(dir_okay=False, path_type=Path),
    help="Problem file (JSON).",
)
@click.option("--algo", default=Algorithm.SBB1.value, type=ALGORITHMS, show_default=True)
@click.option("--budget", default=search_defaults.budget, type=int, show_default=True)
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--epsilon", default=search_defaults.epsilon, type=float, show_default=True)
@click.option("--m-final", default=search_defaults.m_final, type=int, show_default=True)
@click.option("--workers", default=search_defaults.workers, type=int, show_default=True)
@click.option(
    "--oracle-depth",
    type=int,
    default=None,
    help="Compute regret against a full tree of this depth.",
)
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write the run as a one-row CSV.",
)
@click.option(
    "--audit",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write the planner's sample and expansion log.",
)
@click.option("-f", "--format", "output_format", default="standard", type=FORMATS)
@handle_errors
def plan(
    problem_path: Path,
    algo: str,
    budget: int,
    seed: int,
    epsilon: float,
    m_final: int,
    workers: int,
    oracle_depth: int | None,
    out: Path | None,
    audit: Path | None,
    output_format: str,
) -> None:
    """Run one planner on a problem and report the chosen root action."""
    problem = generate_problem(load_problem(problem_path))
    config = SearchConfig(
        algorithm=Algorithm.parse(algo),
        budget=budget,
        epsilon=epsilon,
        seed=seed,
        m_final=m_final,
        workers=workers,
        audit=audit is not None,
    )
    report = run_search(problem, config)
    report.run_id = make_run_id(config.algorithm, budget, seed)
    if oracle_depth is not None:
        RegretOracle(problem, depth=oracle_depth).apply(report)

    if out is not None:
        atomic_write_text(out, format_csv([report]))
        logger.info("Wrote run to %s", sanitize_path(out))
    if audit is not None:
        lines = [record.to_line() for record in report.audit]
        atomic_write_text(audit, "\n".join(lines) + "\n" if lines else "")
    _echo(FORMATTERS[output_format.lower()]().format_report(report))


@cli.command(name="verify")
@click.option(
    "--check",
    "--lemma",
    "check_name",
    required=True,
    type=click.Choice(
        [c.value for c in Check] + [label.upper() for label in CHECK_LABELS],
        case_sensitive=False,
    ),
    help="Which bound to check against simulation (a name, or a label L3 to L7).",
)
@click.option("--trials", default=1_000, type=int, show_default=True)
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--confidence", default=harness_config.confidence, type=float, show_default=True)
@click.option("--workers", default=1, type=int, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("-f", "--format", "output_format", default="standard", type=FORMATS)
@handle_errors
def verify_command(
    check_name: str,
    trials: int,
    seed: int,
    confidence: float,
    workers: int,
    out: Path | None,
    output_format: str,
) -> None:
    """Simulate a concentration bound and write paired empirical/bound columns."""
    summary = verify(check_name, trials, out, seed=seed, confidence=confidence, workers=workers)
    _echo(FORMATTERS[output_format.lower()]().format_verification(summary))
    if not summary.passed:
        failures = ", ".join(f"{row.parameter}@{row.point:g}" for row in summary.failures)
        raise VerificationError(
            f"{summary.check.value} exceeded its bound at {failures}", check=summary.check.value
        )


@cli.command()
@click.option(
    "--config",
    "config_path",
    required=True,
    type=click.Path(dir_okay=False, path_type=Path),
    help="Sweep file (JSON).",
)
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="CSV output (defaults to the sweep's own output, else stdout).",
)
@handle_errors
def sweep(config_path: Path, out: Path | None) -> None:
    """Run an (algorithm, budget, seed) grid and write one CSV row per run."""
    spec = load_sweep(config_path)
    if out is None and spec.output is not None:
        out = config_path.parent / spec.output
    reports = run_sweep(spec, out)
    if out is None:
        _echo(format_csv(reports).rstrip("\n"))
    else:
        failed = sum(1 for report in reports if report.error)
        _echo(f"Wrote {len(reports)} runs ({failed} failed) to {sanitize_path(out)}", err=True)


@cli.command(name="dump-tree")
@click.option(
    "--problem",
    "problem_path",
    required=True,
    type=click.Path(dir_okay=False, path_type=Path),
)
@click.option("--algo", default=Algorithm.SBB1.value, type=ALGORITHMS, show_default=True)
@click.option("--budget", default=search_defaults.budget, type=int, show_default=True)
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--epsilon", default=search_defaults.epsilon, type=float, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@handle_errors
def dump_tree(
    problem_path: Path,
    algo: str,
    budget: int,
    seed: int,
    epsilon: float,
    out: Path | None,
) -> None:
    """Run a planner and print its final tree, one tab-separated line per node."""
    problem = generate_problem(load_problem(problem_path))
    config = SearchConfig(
        algorithm=Algorithm.parse(algo), budget=budget, epsilon=epsilon, seed=seed
    )
    report = run_search(problem, config)
    tree = report.tree
    assert tree is not None
    record_backup(tree, *backed_up_bounds(tree))
    text = format_tree_dump(tree)
    if out is None:
        _echo(text.rstrip("\n"))
    else:
        atomic_write_text(out, text)
        _echo(f"Wrote {len(tree)} nodes to {sanitize_path(out)}", err=True)


def main() -> None:
    """Console-script entry point."""
    cli(prog_name="beliefsearch")


if __name__ == "__main__":
    main()
