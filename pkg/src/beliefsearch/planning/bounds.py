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

"""Upper and lower bounds on hyper-state values.

For a hyper-state ``(s, xi)`` and MDPs ``mu`` drawn from ``xi``:

* an upper sample is ``V*_mu(s)``, the value of acting optimally with ``mu``
  revealed;
* a lower sample is ``V^pi_mu(s)`` for the policy ``pi`` that is optimal in the
  mean MDP of ``xi`` (the *pinned* policy), which is one admissible way to act
  without knowing ``mu``.

Both are unbiased for the corresponding bracket ends of the Bayes-optimal value.
Upper and lower samples taken together share the same ``mu``.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from beliefsearch.core.belief import (
    DIRICHLET,
    HyperState,
    PosteriorModel,
    mixture_mean,
    validate_weights,
)
from beliefsearch.core.mdp import FiniteMDP, Policy, policy_evaluation, policy_iteration
from beliefsearch.exceptions import ValidationError
from beliefsearch.utils.streams import Purpose, StreamFactory

logger = logging.getLogger(__name__)


@dataclass
class BoundEstimate:
    """Running Monte-Carlo estimate of one bound at one node."""

    samples: list[float] = field(default_factory=list)
    total: float = 0.0

    def add(self, value: float) -> None:
        self.samples.append(float(value))
        self.total += float(value)

    def extend(self, values: Sequence[float]) -> None:
        for value in values:
            self.add(value)

    @property
    def count(self) -> int:
        return len(self.samples)

    @property
    def mean(self) -> float:
        """Sample mean; NaN before the first sample."""
        if not self.samples:
            return float("nan")
        return self.total / len(self.samples)


def pinned_policy(model: PosteriorModel, hyper: HyperState) -> Policy:
    """Optimal policy of the mean MDP of ``hyper.belief``."""
    return policy_iteration(model.mean_mdp(hyper.belief))[1]


def sample_upper(
    hyper: HyperState, rng: np.random.Generator, model: PosteriorModel = DIRICHLET
) -> float:
    """One upper sample: ``V*_mu(s)`` for ``mu`` drawn from the belief."""
    mdp = model.sample_mdp(hyper.belief, rng)
    values, _ = policy_iteration(mdp)
    return values[hyper.state]


def sample_lower(
    hyper: HyperState,
    policy: Policy,
    rng: np.random.Generator,
    model: PosteriorModel = DIRICHLET,
) -> float:
    """One lower sample: value of ``policy`` in an MDP drawn from the belief."""
    mdp = model.sample_mdp(hyper.belief, rng)
    return policy_evaluation(mdp, policy)[hyper.state]


def draw_bound_pair(
    hyper: HyperState,
    policy: Policy,
    rng: np.random.Generator,
    model: PosteriorModel = DIRICHLET,
) -> tuple[float, float]:
    """Lower and upper sample from the same drawn MDP.

    The lower sample is clipped to the upper one; they can only differ in the
    wrong direction by solver round-off.
    """
    mdp = model.sample_mdp(hyper.belief, rng)
    values, _ = policy_iteration(mdp)
    upper = values[hyper.state]
    lower = policy_evaluation(mdp, policy)[hyper.state]
    return min(lower, upper), upper


def estimate_bounds(
    hyper: HyperState,
    m: int,
    streams: StreamFactory,
    node_id: int = 0,
    model: PosteriorModel = DIRICHLET,
    workers: int = 1,
) -> tuple[BoundEstimate, BoundEstimate]:
    """``m`` paired draws of both bounds.

    Draw ``j`` uses the stream keyed ``(node_id, j, BOUND)``, so the result
    does not depend on ``workers``.

    Returns:
        ``(lower, upper)`` estimates
    """
    if m < 1:
        msg = f"Number of samples must be at least 1, got {m}"
        raise ValidationError(msg, field="m", value=m)
    policy = pinned_policy(model, hyper)

    def draw(j: int) -> tuple[float, float]:
        return draw_bound_pair(hyper, policy, streams.stream(node_id, j, Purpose.BOUND), model)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            pairs = list(pool.map(draw, range(m)))
    else:
        pairs = [draw(j) for j in range(m)]

    lower, upper = BoundEstimate(), BoundEstimate()
    for low, high in pairs:
        lower.add(low)
        upper.add(high)
    return lower, upper


def exact_bounds(
    state: int, finite_support: Sequence[tuple[FiniteMDP, float]]
) -> tuple[float, float]:
    """Both bracket ends for a finite-support belief, computed exactly.

    Returns:
        ``(lower, upper)`` where upper averages each component's optimal value
        and lower averages each component's value of the mean-MDP policy
    """
    if not finite_support:
        msg = "Finite support must contain at least one MDP"
        raise ValidationError(msg, field="finite_support")
    components = [mdp for mdp, _ in finite_support]
    weights = np.array([w for _, w in finite_support], dtype=float)
    validate_weights(weights, field="finite_support")

    policy = policy_iteration(mixture_mean(components, weights))[1]
    upper = 0.0
    lower = 0.0
    for mdp, weight in zip(components, weights, strict=True):
        upper += weight * policy_iteration(mdp)[0][state]
        lower += weight * policy_evaluation(mdp, policy)[state]
    return min(lower, upper), upper
