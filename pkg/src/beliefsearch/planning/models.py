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

"""Data models for planning problems, search configuration and run reports."""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from enum import Enum
from typing import Any

from beliefsearch.config import search_defaults, tree_config
from beliefsearch.core.belief import DIRICHLET, HyperState, PosteriorModel
from beliefsearch.core.mdp import FiniteMDP
from beliefsearch.exceptions import DomainError, ValidationError
from beliefsearch.planning.tree import Branch, Tree


class Algorithm(str, Enum):
    """The planners."""

    FLAT_ORACLE = "flat_oracle"
    FLAT_STOCHASTIC = "flat_stochastic"
    SBB1 = "sbb1"
    SBB2 = "sbb2"

    @classmethod
    def parse(cls, value: str | Algorithm) -> Algorithm:
        if isinstance(value, Algorithm):
            return value
        normalized = str(value).strip().lower().replace("-", "_")
        try:
            return cls(normalized)
        except ValueError:
            choices = ", ".join(a.value for a in cls)
            msg = f"Unknown algorithm '{value}' (choose from {choices})"
            raise ValidationError(msg, field="algorithm", value=value) from None


@dataclass(frozen=True)
class PlanningProblem:
    """A root hyper-state together with the model that interprets its belief."""

    root: HyperState
    model: PosteriorModel = DIRICHLET
    name: str = "problem"
    true_mdp: FiniteMDP | None = None

    @property
    def discount(self) -> float:
        return self.root.belief.discount

    @property
    def n_states(self) -> int:
        return self.root.belief.n_states

    @property
    def n_actions(self) -> int:
        return self.root.belief.n_actions

    @property
    def branching_factor(self) -> int:
        return self.n_actions * self.n_states * tree_config.n_rewards

    @property
    def has_finite_support(self) -> bool:
        return self.model.support(self.root.belief) is not None

    def finite_support(self) -> list[tuple[FiniteMDP, float]] | None:
        return self.model.support(self.root.belief)


@dataclass(frozen=True)
class SearchConfig:
    """Parameters of one planner run.

    ``gamma`` defaults to the problem's discount and ``beta`` to
    ``1 / (1 - gamma)``; :meth:`resolve` fills both in. ``m`` and ``depth``
    override the closed-form defaults of the flat planners.
    """

    algorithm: Algorithm = Algorithm.SBB1
    budget: int = search_defaults.budget
    epsilon: float = search_defaults.epsilon
    seed: int = 0
    gamma: float | None = None
    beta: float | None = None
    m: int | None = None
    depth: int | None = None
    m_final: int = search_defaults.m_final
    workers: int = search_defaults.workers
    node_cap: int | None = None
    audit: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "algorithm", Algorithm.parse(self.algorithm))
        if self.budget < 1:
            msg = f"Budget must be at least 1, got {self.budget}"
            raise ValidationError(msg, field="budget", value=self.budget)
        if not self.epsilon > 0:
            msg = f"Epsilon must be positive, got {self.epsilon}"
            raise ValidationError(msg, field="epsilon", value=self.epsilon)
        if not 0 <= self.seed < 2**64:
            msg = f"Seed must lie in [0, 2**64), got {self.seed}"
            raise ValidationError(msg, field="seed", value=self.seed)
        if self.m is not None and self.m < 1:
            msg = f"Samples per leaf must be at least 1, got {self.m}"
            raise ValidationError(msg, field="m", value=self.m)
        if self.depth is not None and self.depth < 0:
            msg = f"Depth must be non-negative, got {self.depth}"
            raise ValidationError(msg, field="depth", value=self.depth)
        if self.m_final < 1:
            msg = f"m_final must be at least 1, got {self.m_final}"
            raise ValidationError(msg, field="m_final", value=self.m_final)
        if self.workers < 1:
            msg = f"Workers must be at least 1, got {self.workers}"
            raise ValidationError(msg, field="workers", value=self.workers)

    def resolve(self, problem: PlanningProblem) -> SearchConfig:
        """Copy with ``gamma`` and ``beta`` filled in and checked against ``problem``."""
        gamma = problem.discount if self.gamma is None else float(self.gamma)
        if abs(gamma - problem.discount) > 1e-12:
            msg = f"Configured gamma {gamma} differs from the problem's discount {problem.discount}"
            raise ValidationError(msg, field="gamma", value=gamma)
        if not 0.0 < gamma < 1.0:
            msg = f"Search needs gamma in (0, 1), got {gamma}"
            raise DomainError(msg, field="gamma", value=gamma)
        beta = 1.0 / (1.0 - gamma) if self.beta is None else float(self.beta)
        if beta < 1.0 / (1.0 - gamma) - 1e-12:
            msg = f"beta must be at least 1 / (1 - gamma) = {1.0 / (1.0 - gamma):.6g}"
            raise ValidationError(msg, field="beta", value=beta)
        return replace(self, gamma=gamma, beta=beta)


@dataclass
class AuditRecord:
    """One logged planner event.

    SBB1 logs every upper sample and every expansion; SBB2 also logs the
    depths of the samples averaged into each new leaf estimate.
    """

    iteration: int
    node_id: int
    value: float
    expanded: int | None = None
    window: tuple[int, int] | None = None
    sample_depths: tuple[int, ...] = ()

    def to_line(self) -> str:
        expanded = "-" if self.expanded is None else str(self.expanded)
        return f"{self.iteration}\t{self.node_id}\t{self.value:.12g}\t{expanded}"


@dataclass
class RunReport:
    """Outcome and cost of one planner run."""

    algorithm: Algorithm
    seed: int
    budget: int
    chosen_branch: Branch | None
    leaf_evaluations: int = 0
    node_expansions: int = 0
    max_depth_reached: int = 0
    branch_values: tuple[float, ...] = ()
    branch_depths: tuple[int, ...] = ()
    wallclock_ms: float = 0.0
    regret: float | None = None
    bracket_width: float | None = None
    error: str | None = None
    run_id: str = ""
    audit: list[AuditRecord] = field(default_factory=list, repr=False)
    tree: Tree | None = field(default=None, repr=False, compare=False)

    @property
    def chosen_action(self) -> int | None:
        return None if self.chosen_branch is None else self.chosen_branch.root_action

    def to_dict(self) -> dict[str, Any]:
        skipped = ("audit", "tree")
        data = {f.name: getattr(self, f.name) for f in fields(self) if f.name not in skipped}
        data["algorithm"] = self.algorithm.value
        data["chosen_branch"] = self.chosen_action
        data["branch_values"] = list(self.branch_values)
        data["branch_depths"] = list(self.branch_depths)
        return data
