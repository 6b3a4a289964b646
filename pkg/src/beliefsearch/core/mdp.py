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

"""Known finite MDPs and their exact solution.

Values follow the backwards-induction convention used by every tree backup in
the package: the immediate reward is not discounted,

    V(s) = max_a [ r(s, a) + gamma * sum_s' P(s' | s, a) V(s') ].

Rewards are Bernoulli with success probability ``mean_reward``; the solvers
only ever need the mean.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from beliefsearch.config import solver_config
from beliefsearch.exceptions import DomainError, ValidationError

logger = logging.getLogger(__name__)


def argmax_lowest(values: np.ndarray, tol: float = 1e-12) -> int:
    """Index of the maximum, resolving ties (within ``tol``) to the lowest index."""
    values = np.asarray(values, dtype=float)
    best = values.max()
    return int(np.flatnonzero(values >= best - tol)[0])


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class FiniteMDP:
    """A known MDP with finite states and actions.

    Attributes:
        transition: Array of shape (S, A, S); ``transition[s, a]`` is the
            next-state distribution
        mean_reward: Array of shape (S, A) with Bernoulli success probabilities
        discount: Discount factor in [0, 1)
    """

    transition: np.ndarray
    mean_reward: np.ndarray
    discount: float

    def __post_init__(self) -> None:
        transition = np.array(self.transition, dtype=float)
        mean_reward = np.array(self.mean_reward, dtype=float)

        if transition.ndim != 3 or transition.shape[0] != transition.shape[2]:
            msg = f"Transition table must have shape (S, A, S), got {transition.shape}"
            raise ValidationError(msg, field="transition", value=transition.shape)
        if transition.shape[0] < 1 or transition.shape[1] < 1:
            msg = "An MDP needs at least one state and one action"
            raise ValidationError(msg, field="transition", value=transition.shape)
        if mean_reward.shape != transition.shape[:2]:
            msg = (
                f"Reward table shape {mean_reward.shape} does not match "
                f"(S, A) = {transition.shape[:2]}"
            )
            raise ValidationError(msg, field="mean_reward", value=mean_reward.shape)
        if not np.all(np.isfinite(transition)) or np.any(transition < 0):
            msg = "Transition probabilities must be finite and non-negative"
            raise ValidationError(msg, field="transition")
        row_error = np.abs(transition.sum(axis=2) - 1.0).max()
        if row_error > solver_config.stochastic_tol:
            msg = f"Transition rows must sum to 1 (worst deviation {row_error:.3e})"
            raise ValidationError(msg, field="transition", value=float(row_error))
        if not np.all(np.isfinite(mean_reward)) or np.any((mean_reward < 0) | (mean_reward > 1)):
            msg = "Mean rewards must lie in [0, 1]"
            raise ValidationError(msg, field="mean_reward")
        if not 0.0 <= float(self.discount) < 1.0:
            msg = f"Discount must lie in [0, 1), got {self.discount}"
            raise ValidationError(msg, field="discount", value=self.discount)

        object.__setattr__(self, "transition", _readonly(transition))
        object.__setattr__(self, "mean_reward", _readonly(mean_reward))
        object.__setattr__(self, "discount", float(self.discount))

    @property
    def n_states(self) -> int:
        return int(self.transition.shape[0])

    @property
    def n_actions(self) -> int:
        return int(self.transition.shape[1])

    @property
    def value_bound(self) -> float:
        """Largest possible value, ``1 / (1 - gamma)`` for rewards in [0, 1]."""
        return 1.0 / (1.0 - self.discount)


@dataclass(frozen=True, eq=False)
class Policy:
    """Deterministic stationary policy: ``action_of[s]`` is the action in state s."""

    action_of: np.ndarray

    def __post_init__(self) -> None:
        actions = np.array(self.action_of, dtype=np.int64)
        if actions.ndim != 1:
            msg = "Policy must be a one-dimensional table of actions"
            raise ValidationError(msg, field="action_of", value=actions.shape)
        object.__setattr__(self, "action_of", _readonly(actions))

    def __getitem__(self, state: int) -> int:
        return int(self.action_of[state])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Policy):
            return NotImplemented
        return bool(np.array_equal(self.action_of, other.action_of))

    def __hash__(self) -> int:
        return hash(self.action_of.tobytes())

    def validate_for(self, mdp: FiniteMDP) -> None:
        """Raise ValidationError unless the policy fits ``mdp``."""
        if self.action_of.shape != (mdp.n_states,):
            msg = f"Policy covers {self.action_of.shape[0]} states, MDP has {mdp.n_states}"
            raise ValidationError(msg, field="policy", value=self.action_of.shape)
        if np.any(self.action_of < 0) or np.any(self.action_of >= mdp.n_actions):
            msg = f"Policy actions must lie in [0, {mdp.n_actions})"
            raise ValidationError(msg, field="policy")


@dataclass(frozen=True, eq=False)
class ValueFunction:
    """State values ``value_of[s]``."""

    value_of: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "value_of", _readonly(np.array(self.value_of, dtype=float)))

    def __getitem__(self, state: int) -> float:
        return float(self.value_of[state])

    def sup_distance(self, other: ValueFunction) -> float:
        return float(np.abs(self.value_of - other.value_of).max())


def q_values(mdp: FiniteMDP, values: np.ndarray) -> np.ndarray:
    """One Bellman lookahead: ``Q[s, a] = r(s, a) + gamma * E[V(s')]``."""
    return mdp.mean_reward + mdp.discount * np.einsum("sat,t->sa", mdp.transition, values)


def greedy_policy(mdp: FiniteMDP, values: np.ndarray) -> Policy:
    """Greedy policy with respect to ``values``; ties go to the lowest action."""
    q = q_values(mdp, values)
    return Policy(np.array([argmax_lowest(row) for row in q], dtype=np.int64))


def value_iteration(mdp: FiniteMDP, tol: float | None = None) -> tuple[ValueFunction, Policy]:
    """Solve ``mdp`` to sup-norm accuracy ``tol`` by value iteration.

    Iteration stops once successive iterates differ by at most
    ``tol * (1 - gamma) / (2 * gamma)``, which keeps the returned values within
    ``tol`` of the fixed point.

    Returns:
        The value estimate and the greedy policy with respect to it
    """
    tol = solver_config.value_iteration_tol if tol is None else tol
    if not tol > 0:
        msg = f"Tolerance must be positive, got {tol}"
        raise ValidationError(msg, field="tol", value=tol)

    gamma = mdp.discount
    stop_at = np.inf if gamma == 0 else tol * (1.0 - gamma) / (2.0 * gamma)

    values = np.zeros(mdp.n_states)
    for iteration in range(1, solver_config.max_value_iterations + 1):
        updated = q_values(mdp, values).max(axis=1)
        change = float(np.abs(updated - values).max())
        values = updated
        if change <= stop_at:
            logger.debug("Value iteration converged after %d sweeps", iteration)
            break
    else:
        logger.warning(
            "Value iteration hit the sweep cap (%d) before reaching tol=%g",
            solver_config.max_value_iterations,
            tol,
        )

    return ValueFunction(values), greedy_policy(mdp, values)


def policy_evaluation(mdp: FiniteMDP, policy: Policy) -> ValueFunction:
    """Exact value of ``policy`` by solving ``(I - gamma P_pi) V = r_pi``."""
    policy.validate_for(mdp)
    states = np.arange(mdp.n_states)
    p_pi = mdp.transition[states, policy.action_of]
    r_pi = mdp.mean_reward[states, policy.action_of]
    system = np.eye(mdp.n_states) - mdp.discount * p_pi
    return ValueFunction(np.linalg.solve(system, r_pi))


def policy_iteration(mdp: FiniteMDP) -> tuple[ValueFunction, Policy]:
    """Exact optimal values and policy by Howard's policy iteration.

    Actions change only on improvements larger than
    ``solver_config.improvement_tol``; the final policy is the lowest-index
    greedy policy for the optimal values.
    """
    policy = Policy(np.array([argmax_lowest(row) for row in mdp.mean_reward], dtype=np.int64))
    values = policy_evaluation(mdp, policy)

    for _ in range(solver_config.max_policy_iterations):
        q = q_values(mdp, values.value_of)
        current = q[np.arange(mdp.n_states), policy.action_of]
        best = q.max(axis=1)
        improvable = best > current + solver_config.improvement_tol
        if not improvable.any():
            break
        actions = policy.action_of.copy()
        actions[improvable] = [argmax_lowest(q[s]) for s in np.flatnonzero(improvable)]
        policy = Policy(actions)
        values = policy_evaluation(mdp, policy)
    else:
        logger.warning("Policy iteration hit the iteration cap")

    final = greedy_policy(mdp, values.value_of)
    if final != policy:
        values = policy_evaluation(mdp, final)
    return values, final


def perturbation_gap(epsilon: float, gamma: float) -> float:
    """Sup-norm bound ``epsilon / (1 - gamma)**2`` on the value change of any
    fixed policy between two MDPs whose kernels and rewards differ by at most
    ``epsilon``."""
    if not 0.0 <= gamma < 1.0:
        msg = f"gamma must lie in [0, 1), got {gamma}"
        raise DomainError(msg, field="gamma", value=gamma)
    if epsilon < 0:
        msg = f"epsilon must be non-negative, got {epsilon}"
        raise DomainError(msg, field="epsilon", value=epsilon)
    return epsilon / (1.0 - gamma) ** 2


def transition_distance(first: FiniteMDP, second: FiniteMDP) -> float:
    """Largest L1 distance between corresponding next-state distributions."""
    return float(np.abs(first.transition - second.transition).sum(axis=2).max())


def reward_distance(first: FiniteMDP, second: FiniteMDP) -> float:
    return float(np.abs(first.mean_reward - second.mean_reward).max())


def random_mdp(
    n_states: int,
    n_actions: int,
    gamma: float,
    rng: np.random.Generator,
    concentration: float = 1.0,
) -> FiniteMDP:
    """MDP with Dirichlet(concentration) rows and uniform mean rewards."""
    if n_states < 1 or n_actions < 1:
        msg = "n_states and n_actions must be positive"
        raise ValidationError(msg, field="shape", value=(n_states, n_actions))
    alpha = np.full(n_states, float(concentration))
    transition = rng.dirichlet(alpha, size=(n_states, n_actions))
    transition /= transition.sum(axis=2, keepdims=True)
    return FiniteMDP(transition, rng.random((n_states, n_actions)), gamma)


def simulate_returns(
    mdp: FiniteMDP,
    policy: Policy,
    state: int,
    n_rollouts: int,
    rng: np.random.Generator,
    horizon: int | None = None,
) -> np.ndarray:
    """Discounted returns of ``n_rollouts`` simulated trajectories from ``state``.

    Rewards are drawn as Bernoulli variables, so the sample mean is an
    unbiased estimate of the policy's value up to the truncation at
    ``horizon`` (by default the point where ``gamma**t`` drops below 1e-12).
    """
    policy.validate_for(mdp)
    if horizon is None:
        horizon = 1 if mdp.discount == 0 else int(np.ceil(np.log(1e-12) / np.log(mdp.discount)))

    states = np.full(n_rollouts, state, dtype=np.int64)
    returns = np.zeros(n_rollouts)
    cumulative = np.cumsum(mdp.transition, axis=2)
    weight = 1.0
    for _ in range(horizon):
        actions = policy.action_of[states]
        rewards = rng.random(n_rollouts) < mdp.mean_reward[states, actions]
        returns += weight * rewards
        weight *= mdp.discount
        draws = rng.random(n_rollouts)
        states = (draws[:, None] >= cumulative[states, actions]).sum(axis=1)
        states = np.minimum(states, mdp.n_states - 1)
    return returns
