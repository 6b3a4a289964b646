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

"""Regret of a planner's choice against an exhaustive reference.

The reference expands the full tree to a fixed depth. Finite-support problems
use exact leaf bounds and the regret is measured on the lower bracket;
otherwise leaves are padded with the trivial bracket ``[0, beta]`` and the
pessimistic regret ``max_b U_b - L_chosen`` is reported with the bracket width.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass

import numpy as np

from beliefsearch.config import harness_config, tree_config
from beliefsearch.exceptions import ResourceError, ValidationError
from beliefsearch.planning.models import PlanningProblem, RunReport
from beliefsearch.planning.tree import LeafValueSource, backup, build_full_tree, full_tree_size
from beliefsearch.utils.performance import PerformanceTracker

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReferenceValues:
    """Per-branch bracket of the reference tree."""

    lower: np.ndarray
    upper: np.ndarray
    exact: bool
    depth: int

    @property
    def bracket_width(self) -> float:
        return float((self.upper - self.lower).max())


class RegretOracle:
    """Lazily built, cached reference values for one problem.

    Safe to share between sweep threads.
    """

    def __init__(
        self,
        problem: PlanningProblem,
        depth: int | None = None,
        node_cap: int | None = None,
    ):
        self.problem = problem
        self.depth = harness_config.oracle_depth if depth is None else depth
        if self.depth < 0:
            msg = f"Oracle depth must be non-negative, got {self.depth}"
            raise ValidationError(msg, field="oracle_depth", value=self.depth)
        self.node_cap = tree_config.node_cap if node_cap is None else node_cap
        required = 1 + full_tree_size(problem.branching_factor, self.depth)
        if required > self.node_cap:
            msg = (
                f"Reference tree of depth {self.depth} needs {required} nodes, "
                f"cap is {self.node_cap}"
            )
            raise ResourceError(
                msg, resource="oracle_nodes", required=required, limit=self.node_cap
            )
        self._lock = threading.Lock()
        self._reference: ReferenceValues | None = None

    def reference(self) -> ReferenceValues:
        with self._lock:
            if self._reference is None:
                self._reference = self._compute()
            return self._reference

    def _compute(self) -> ReferenceValues:
        with PerformanceTracker(f"regret_oracle[{self.problem.name}]"):
            tree = build_full_tree(
                self.problem.root, self.depth, self.problem.model, node_cap=self.node_cap
            )
            exact = self.problem.has_finite_support
            if exact:
                lower = backup(tree, LeafValueSource.EXACT_LOWER)
                upper = backup(tree, LeafValueSource.EXACT_UPPER)
            else:
                lower = backup(tree, LeafValueSource.PAD_LOWER)
                upper = backup(tree, LeafValueSource.PAD_UPPER)
        logger.debug("Reference values at depth %d: lower=%s upper=%s", self.depth, lower, upper)
        return ReferenceValues(lower=lower, upper=upper, exact=exact, depth=self.depth)

    def regret(self, action: int) -> tuple[float, float]:
        """``(regret, bracket_width)`` of choosing root action ``action``."""
        reference = self.reference()
        if not 0 <= action < reference.lower.size:
            msg = f"Action {action} out of range"
            raise ValidationError(msg, field="chosen_action", value=action)
        if reference.exact:
            regret = float(reference.lower.max() - reference.lower[action])
        else:
            regret = float(reference.upper.max() - reference.lower[action])
        return max(regret, 0.0), reference.bracket_width

    def apply(self, report: RunReport) -> RunReport:
        """Fill ``report.regret`` and ``report.bracket_width`` in place."""
        if report.chosen_action is None:
            return report
        report.regret, report.bracket_width = self.regret(report.chosen_action)
        return report


def regret_of(
    report: RunReport, problem: PlanningProblem, oracle_depth: int | None = None
) -> float:
    """Regret of ``report``'s chosen branch against a depth-``oracle_depth`` reference."""
    oracle = RegretOracle(problem, depth=oracle_depth)
    oracle.apply(report)
    assert report.regret is not None
    return report.regret
