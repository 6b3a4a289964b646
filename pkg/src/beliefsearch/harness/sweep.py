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

"""Budget sweeps and the run CSV.

A sweep runs every (algorithm, budget, seed) cell of its grid on one problem.
Cells are independent and run on a thread pool; rows are collected and
written once, sorted by run id, so the file only depends on the sweep.
"""

from __future__ import annotations

import csv
import io
import logging
from collections.abc import Iterable, Mapping
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from beliefsearch.config import harness_config
from beliefsearch.exceptions import ErrorCode, PlannerError, ValidationError
from beliefsearch.harness.problems import GeneratedProblem, generate_problem
from beliefsearch.harness.regret import RegretOracle
from beliefsearch.harness.specs import SweepSpec
from beliefsearch.planning.models import Algorithm, RunReport, SearchConfig
from beliefsearch.planning.search import run_search
from beliefsearch.planning.tree import Branch
from beliefsearch.utils.performance import monitor_performance
from beliefsearch.utils.security import atomic_write_text, sanitize_message, sanitize_path

logger = logging.getLogger(__name__)

CSV_HEADER = harness_config.csv_header


def make_run_id(algorithm: Algorithm, budget: int, seed: int) -> str:
    return f"{algorithm.value}-b{budget}-s{seed}"


def _float_cell(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def report_to_row(report: RunReport) -> dict[str, str]:
    """Flatten a report into CSV cells; ``None`` becomes the empty string."""
    chosen = report.chosen_action
    return {
        "run_id": report.run_id,
        "algo": report.algorithm.value,
        "seed": str(report.seed),
        "budget": str(report.budget),
        "leaf_evals": str(report.leaf_evaluations),
        "node_expansions": str(report.node_expansions),
        "max_depth": str(report.max_depth_reached),
        "chosen_action": "" if chosen is None else str(chosen),
        "regret": _float_cell(report.regret),
        "bracket_width": _float_cell(report.bracket_width),
        "error": report.error or "",
        "wallclock_ms": _float_cell(report.wallclock_ms),
    }


def report_from_row(row: Mapping[str, str]) -> RunReport:
    """Inverse of :func:`report_to_row`."""
    missing = [name for name in CSV_HEADER if name not in row]
    if missing:
        msg = f"CSV row is missing columns {missing}"
        raise ValidationError(msg, field="row", value=missing)

    def optional_float(name: str) -> float | None:
        return float(row[name]) if row[name] else None

    try:
        chosen = row["chosen_action"]
        return RunReport(
            algorithm=Algorithm.parse(row["algo"]),
            seed=int(row["seed"]),
            budget=int(row["budget"]),
            chosen_branch=Branch(int(chosen)) if chosen else None,
            leaf_evaluations=int(row["leaf_evals"]),
            node_expansions=int(row["node_expansions"]),
            max_depth_reached=int(row["max_depth"]),
            wallclock_ms=float(row["wallclock_ms"] or 0.0),
            regret=optional_float("regret"),
            bracket_width=optional_float("bracket_width"),
            error=row["error"] or None,
            run_id=row["run_id"],
        )
    except ValueError as exc:
        msg = f"Malformed CSV row {row.get('run_id', '?')}: {exc}"
        raise ValidationError(msg, field="row") from exc


def format_csv(reports: Iterable[RunReport]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    writer.writerows(report_to_row(r) for r in sorted(reports, key=lambda r: r.run_id))
    return buffer.getvalue()


def read_csv(path: str | Path) -> list[RunReport]:
    with Path(path).open(encoding="utf-8", newline="") as handle:
        return [report_from_row(row) for row in csv.DictReader(handle)]


def _error_report(config: SearchConfig, error: str) -> RunReport:
    return RunReport(
        algorithm=config.algorithm,
        seed=config.seed,
        budget=config.budget,
        chosen_branch=None,
        error=error,
    )


def run_cell(
    problem: GeneratedProblem,
    config: SearchConfig,
    oracle: RegretOracle | None = None,
) -> RunReport:
    """Run one planner configuration; any failure becomes an error row."""
    run_id = make_run_id(config.algorithm, config.budget, config.seed)
    try:
        report = run_search(problem, config)
        if oracle is not None:
            oracle.apply(report)
    except PlannerError as exc:
        logger.error("Run %s failed: %s", run_id, exc.get_safe_message())
        report = _error_report(config, f"{exc.error_code.value}: {exc.get_safe_message()}")
    except Exception as exc:
        logger.exception("Run %s crashed", run_id)
        message = sanitize_message(f"{type(exc).__name__}: {exc}")
        report = _error_report(config, f"{ErrorCode.INTERNAL.value}: {message}")
    report.run_id = run_id
    return report


def sweep_configs(sweep: SweepSpec) -> list[SearchConfig]:
    return [
        SearchConfig(
            algorithm=algorithm,
            budget=budget,
            epsilon=sweep.epsilon,
            seed=sweep.seed_offset + index,
            m_final=sweep.m_final,
        )
        for algorithm in sweep.algorithms
        for budget in sweep.budgets
        for index in range(sweep.seeds)
    ]


@monitor_performance("run_sweep")
def run_sweep(sweep: SweepSpec, out_path: str | Path | None = None) -> list[RunReport]:
    """Run every cell of ``sweep`` and write the CSV to ``out_path`` (or ``sweep.output``).

    Returns:
        The reports, sorted by run id
    """
    problem = generate_problem(sweep.problem)
    oracle = RegretOracle(problem, depth=sweep.oracle_depth)
    configs = sweep_configs(sweep)
    logger.info("Sweeping %d runs on %s with %d workers", len(configs), problem.name, sweep.workers)

    with ThreadPoolExecutor(max_workers=sweep.workers) as pool:
        reports = list(pool.map(lambda config: run_cell(problem, config, oracle), configs))
    reports.sort(key=lambda report: report.run_id)

    target = out_path if out_path is not None else sweep.output
    if target is not None:
        atomic_write_text(Path(target), format_csv(reports))
        logger.info("Wrote %d rows to %s", len(reports), sanitize_path(target))
    failed = sum(1 for report in reports if report.error)
    if failed:
        logger.warning("%d of %d runs failed", failed, len(reports))
    return reports
