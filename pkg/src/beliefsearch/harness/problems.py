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

"""Problem generators.

Every generator is deterministic: random pieces come from the GENERATOR
stream of the seed named in the problem file.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from beliefsearch.config import harness_config
from beliefsearch.core.belief import (
    DIRICHLET,
    BeliefState,
    FiniteSupportPosterior,
    HyperState,
    PosteriorModel,
)
from beliefsearch.core.mdp import FiniteMDP, random_mdp
from beliefsearch.harness.specs import Generator, MDPSpec, ProblemSpec
from beliefsearch.planning.models import PlanningProblem
from beliefsearch.utils.streams import Purpose, StreamFactory

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeneratedProblem(PlanningProblem):
    """A planning problem plus the spec and generator that produced it."""

    generator: Generator = Generator.EXPLICIT
    spec: ProblemSpec | None = None


def _prior(spec: ProblemSpec, transition_counts: np.ndarray | None = None) -> BeliefState:
    shape = (spec.n_states, spec.n_actions)
    if spec.prior_transition_counts is not None:
        counts = np.asarray(spec.prior_transition_counts, dtype=float)
    elif transition_counts is not None:
        counts = transition_counts
    else:
        counts = np.ones((*shape, spec.n_states))
    if spec.prior_reward_params is not None:
        params = np.asarray(spec.prior_reward_params, dtype=float)
    else:
        params = np.ones((*shape, 2))
    return BeliefState(counts, params, spec.gamma)


def _component(spec: ProblemSpec, component: MDPSpec) -> FiniteMDP:
    return FiniteMDP(
        np.asarray(component.transition, dtype=float),
        np.asarray(component.mean_reward, dtype=float),
        spec.gamma,
    )


def _generator_rng(seed: int) -> np.random.Generator:
    return StreamFactory(seed).stream(Purpose.GENERATOR)


def chain_mdp(n_states: int, slip: float, gamma: float) -> FiniteMDP:
    """A chain where action 0 moves forward and action 1 returns to the start.

    With probability ``slip`` the other move happens instead. Moving forward
    in the last state pays 1; returning pays 0.2 everywhere.
    """
    transition = np.zeros((n_states, 2, n_states))
    for s in range(n_states):
        forward = min(s + 1, n_states - 1)
        transition[s, 0, forward] += 1.0 - slip
        transition[s, 0, 0] += slip
        transition[s, 1, 0] += 1.0 - slip
        transition[s, 1, forward] += slip
    mean_reward = np.zeros((n_states, 2))
    mean_reward[-1, 0] = 1.0
    mean_reward[:, 1] = 0.2
    return FiniteMDP(transition, mean_reward, gamma)


def generate_problem(spec: ProblemSpec) -> GeneratedProblem:
    """Build the root hyper-state, its posterior model and, when defined, the true MDP."""
    params = spec.generator_params
    model: PosteriorModel = DIRICHLET
    true_mdp: FiniteMDP | None = None

    if spec.generator is Generator.RANDOM_MDP:
        seed = int(params.get("seed", spec.true_mdp_seed or 0))
        concentration = float(params.get("concentration", 1.0))
        true_mdp = random_mdp(
            spec.n_states, spec.n_actions, spec.gamma, _generator_rng(seed), concentration
        )
        prior = _prior(spec)
    elif spec.generator is Generator.TWO_ARMED_BANDIT:
        reward_params = np.array(
            [
                [
                    [params.get("alpha0", 1.0), params.get("beta0", 1.0)],
                    [params.get("alpha1", 1.0), params.get("beta1", 1.0)],
                ]
            ]
        )
        if spec.prior_reward_params is None:
            spec = spec.model_copy(update={"prior_reward_params": reward_params.tolist()})
        prior = _prior(spec)
    elif spec.generator is Generator.CHAIN:
        true_mdp = chain_mdp(spec.n_states, float(params.get("slip", 0.2)), spec.gamma)
        strength = float(params.get("transition_strength", 0.0))
        prior = _prior(spec, transition_counts=1.0 + strength * true_mdp.transition)
    else:
        prior = _prior(spec)

    if spec.finite_support:
        components = [_component(spec, c) for c in spec.finite_support]
        weights = [c.weight for c in spec.finite_support]
        model = FiniteSupportPosterior(components, weights, prior)
    elif spec.generator is Generator.FINITE_MIXTURE:
        seed = int(params.get("seed", spec.true_mdp_seed or 0))
        count = int(params["count"])
        concentration = float(params.get("concentration", 1.0))
        rng = _generator_rng(seed)
        components = [
            random_mdp(spec.n_states, spec.n_actions, spec.gamma, rng, concentration)
            for _ in range(count)
        ]
        model = FiniteSupportPosterior(components, [1.0 / count] * count, prior)

    if true_mdp is None and spec.true_mdp_seed is not None:
        rng = StreamFactory(spec.true_mdp_seed).stream(Purpose.GENERATOR, 1)
        true_mdp = model.sample_mdp(prior, rng)

    logger.debug("Generated %s problem '%s'", spec.generator.value, spec.name)
    return GeneratedProblem(
        root=HyperState(spec.initial_state, prior),
        model=model,
        name=spec.name,
        true_mdp=true_mdp,
        generator=spec.generator,
        spec=spec,
    )


def two_branch_problem(
    gamma: float | None = None,
    gap_ratio: float | None = None,
    strength: float | None = None,
) -> GeneratedProblem:
    """Two-armed bandit with sharply concentrated arms whose branch values
    differ by ``gap_ratio * beta``.

    Arm means are ``0.5 +/- gap / 2`` with ``gap = gap_ratio / (1 - gamma)``,
    and each Beta prior carries ``strength`` pseudo-observations, so the
    posterior barely moves during a search.
    """
    gamma = harness_config.two_branch_gamma if gamma is None else gamma
    gap_ratio = harness_config.two_branch_gap_ratio if gap_ratio is None else gap_ratio
    strength = harness_config.two_branch_strength if strength is None else strength
    gap = gap_ratio / (1.0 - gamma)
    good, bad = 0.5 + gap / 2.0, 0.5 - gap / 2.0
    spec = ProblemSpec(
        name="two-branch",
        n_states=1,
        n_actions=2,
        gamma=gamma,
        generator=Generator.TWO_ARMED_BANDIT,
        generator_params={
            "alpha0": good * strength,
            "beta0": (1.0 - good) * strength,
            "alpha1": bad * strength,
            "beta1": (1.0 - bad) * strength,
        },
    )
    return generate_problem(spec)
