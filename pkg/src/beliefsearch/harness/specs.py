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

"""Problem and sweep files.

Both are JSON documents validated by pydantic models that reject unknown keys.
Pydantic failures surface as :class:`beliefsearch.exceptions.ValidationError`
naming the offending field; unreadable files as ``ConfigurationError``.
"""

from __future__ import annotations

import json
import logging
from enum import Enum
from pathlib import Path
from typing import Any, TypeVar

import pydantic
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, model_validator

from beliefsearch.config import harness_config, search_defaults
from beliefsearch.exceptions import ConfigurationError, ValidationError
from beliefsearch.planning.models import Algorithm
from beliefsearch.utils.security import sanitize_path

logger = logging.getLogger(__name__)


class Generator(str, Enum):
    """How a problem's root belief (and optional truth) is built."""

    EXPLICIT = "explicit"
    RANDOM_MDP = "random_mdp"
    TWO_ARMED_BANDIT = "two_armed_bandit"
    CHAIN = "chain"
    FINITE_MIXTURE = "finite_mixture"


GENERATOR_PARAMS: dict[Generator, frozenset[str]] = {
    Generator.EXPLICIT: frozenset(),
    Generator.RANDOM_MDP: frozenset({"seed", "concentration"}),
    Generator.TWO_ARMED_BANDIT: frozenset({"alpha0", "beta0", "alpha1", "beta1"}),
    Generator.CHAIN: frozenset({"slip", "transition_strength"}),
    Generator.FINITE_MIXTURE: frozenset({"seed", "count", "concentration"}),
}


class MDPSpec(BaseModel):
    """One known MDP, optionally weighted as a mixture component."""

    model_config = ConfigDict(extra="forbid")

    transition: list[list[list[float]]]
    mean_reward: list[list[float]]
    weight: PositiveFloat = 1.0


class ProblemSpec(BaseModel):
    """A planning problem as written in a problem file."""

    model_config = ConfigDict(extra="forbid")

    name: str = "problem"
    n_states: PositiveInt = 1
    n_actions: PositiveInt = 2
    gamma: float = Field(ge=0.0, lt=1.0)
    generator: Generator = Generator.EXPLICIT
    generator_params: dict[str, float] = Field(default_factory=dict)
    initial_state: int = Field(default=0, ge=0)
    prior_transition_counts: list[list[list[PositiveFloat]]] | None = None
    prior_reward_params: list[list[tuple[PositiveFloat, PositiveFloat]]] | None = None
    true_mdp_seed: int | None = Field(default=None, ge=0)
    finite_support: list[MDPSpec] | None = None

    @model_validator(mode="after")
    def _check_consistency(self) -> ProblemSpec:
        unknown = set(self.generator_params) - GENERATOR_PARAMS[self.generator]
        if unknown:
            msg = f"Unknown parameters for generator {self.generator.value}: {sorted(unknown)}"
            raise ValueError(msg)
        if self.initial_state >= self.n_states:
            msg = f"initial_state {self.initial_state} out of range for {self.n_states} states"
            raise ValueError(msg)

        bandit_shape = (self.n_states, self.n_actions) == (1, 2)
        if self.generator is Generator.TWO_ARMED_BANDIT and not bandit_shape:
            msg = "two_armed_bandit problems have exactly 1 state and 2 actions"
            raise ValueError(msg)
        if self.generator is Generator.CHAIN and (self.n_states < 2 or self.n_actions != 2):
            msg = "chain problems need at least 2 states and exactly 2 actions"
            raise ValueError(msg)
        if self.generator is Generator.FINITE_MIXTURE and not self.finite_support:
            if "count" not in self.generator_params:
                msg = "finite_mixture needs either finite_support or a component count"
                raise ValueError(msg)
        if self.finite_support and self.generator not in (
            Generator.EXPLICIT,
            Generator.FINITE_MIXTURE,
        ):
            msg = "finite_support is only allowed with the explicit or finite_mixture generators"
            raise ValueError(msg)

        shape = (self.n_states, self.n_actions)
        if self.prior_transition_counts is not None:
            counts = self.prior_transition_counts
            if len(counts) != shape[0] or any(len(row) != shape[1] for row in counts) or any(
                len(cell) != shape[0] for row in counts for cell in row
            ):
                msg = f"prior_transition_counts must have shape {(*shape, shape[0])}"
                raise ValueError(msg)
        if self.prior_reward_params is not None:
            params = self.prior_reward_params
            if len(params) != shape[0] or any(len(row) != shape[1] for row in params):
                msg = f"prior_reward_params must have shape {(*shape, 2)}"
                raise ValueError(msg)
        if self.finite_support:
            total = sum(component.weight for component in self.finite_support)
            if abs(total - 1.0) > 1e-9:
                msg = f"finite_support weights must sum to 1, got {total}"
                raise ValueError(msg)
        return self


class SweepSpec(BaseModel):
    """A grid of planner runs on one problem."""

    model_config = ConfigDict(extra="forbid")

    problem: ProblemSpec
    algorithms: list[Algorithm] = Field(min_length=1)
    budgets: list[PositiveInt] = Field(min_length=1)
    seeds: PositiveInt = 5
    seed_offset: int = Field(default=0, ge=0)
    epsilon: PositiveFloat = search_defaults.epsilon
    m_final: PositiveInt = search_defaults.m_final
    oracle_depth: int = Field(default=harness_config.oracle_depth, ge=0)
    workers: PositiveInt = 1
    output: str | None = None


ModelT = TypeVar("ModelT", bound=BaseModel)


def _first_error_field(exc: pydantic.ValidationError) -> str:
    errors = exc.errors()
    if not errors:
        return "document"
    location = ".".join(str(part) for part in errors[0]["loc"])
    return location or "document"


def parse_spec(model: type[ModelT], data: Any) -> ModelT:
    """Validate ``data`` against ``model``, raising the package's ValidationError."""
    try:
        return model.model_validate(data)
    except pydantic.ValidationError as exc:
        field = _first_error_field(exc)
        message = exc.errors()[0]["msg"] if exc.errors() else str(exc)
        msg = f"Invalid {model.__name__} at '{field}': {message}"
        raise ValidationError(msg, field=field) from exc


def _read_json(path: Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        msg = f"Cannot read {sanitize_path(path)}: {exc.strerror or exc}"
        raise ConfigurationError(msg, details={"path": sanitize_path(path)}) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        msg = f"{sanitize_path(path)} is not valid JSON (line {exc.lineno}, column {exc.colno})"
        raise ConfigurationError(msg, details={"path": sanitize_path(path)}) from exc


def load_problem(path: str | Path) -> ProblemSpec:
    logger.debug("Loading problem file %s", sanitize_path(path))
    return parse_spec(ProblemSpec, _read_json(Path(path)))


def load_sweep(path: str | Path) -> SweepSpec:
    """Load a sweep file; ``problem`` may be inline or a path relative to the file."""
    path = Path(path)
    logger.debug("Loading sweep file %s", sanitize_path(path))
    data = _read_json(path)
    if isinstance(data, dict) and isinstance(data.get("problem"), str):
        data = {**data, "problem": _read_json(path.parent / data["problem"])}
    return parse_spec(SweepSpec, data)
