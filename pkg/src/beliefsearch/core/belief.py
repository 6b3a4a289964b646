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

"""Conjugate beliefs over finite MDPs.

A :class:`BeliefState` stores Dirichlet counts per (s, a) transition row and
Beta parameters per (s, a) Bernoulli reward. The counts are also the
sufficient statistic for any other prior over the same MDP family, which is
how :class:`FiniteSupportPosterior` reweights a finite mixture of known MDPs.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

from beliefsearch.core.mdp import FiniteMDP
from beliefsearch.exceptions import DomainError, ValidationError

logger = logging.getLogger(__name__)

REWARD_SUCCESS = 1
REWARD_FAILURE = 0


@dataclass(frozen=True, eq=False)
class BeliefState:
    """Posterior parameters for every (state, action) pair.

    Attributes:
        transition_counts: Array (S, A, S) of positive Dirichlet counts
        reward_params: Array (S, A, 2) of positive Beta parameters (alpha, beta)
        discount: Discount factor shared by every MDP in the belief's support
    """

    transition_counts: np.ndarray
    reward_params: np.ndarray
    discount: float

    def __post_init__(self) -> None:
        counts = np.array(self.transition_counts, dtype=float)
        params = np.array(self.reward_params, dtype=float)

        if counts.ndim != 3 or counts.shape[0] != counts.shape[2] or counts.shape[0] < 1:
            msg = f"Transition counts must have shape (S, A, S), got {counts.shape}"
            raise ValidationError(msg, field="transition_counts", value=counts.shape)
        if params.shape != (*counts.shape[:2], 2):
            msg = f"Reward parameters must have shape (S, A, 2), got {params.shape}"
            raise ValidationError(msg, field="reward_params", value=params.shape)
        if not np.all(np.isfinite(counts)) or np.any(counts <= 0):
            msg = "Transition counts must be finite and strictly positive"
            raise ValidationError(msg, field="transition_counts")
        if not np.all(np.isfinite(params)) or np.any(params <= 0):
            msg = "Reward parameters must be finite and strictly positive"
            raise ValidationError(msg, field="reward_params")
        if not 0.0 <= float(self.discount) < 1.0:
            msg = f"Discount must lie in [0, 1), got {self.discount}"
            raise ValidationError(msg, field="discount", value=self.discount)

        counts.setflags(write=False)
        params.setflags(write=False)
        object.__setattr__(self, "transition_counts", counts)
        object.__setattr__(self, "reward_params", params)
        object.__setattr__(self, "discount", float(self.discount))

    @classmethod
    def uniform(
        cls,
        n_states: int,
        n_actions: int,
        discount: float,
        transition_count: float = 1.0,
        reward_params: tuple[float, float] = (1.0, 1.0),
    ) -> BeliefState:
        """Belief with identical counts everywhere (all ones by default)."""
        counts = np.full((n_states, n_actions, n_states), float(transition_count))
        params = np.broadcast_to(np.asarray(reward_params, dtype=float), (n_states, n_actions, 2))
        return cls(counts, params.copy(), discount)

    @property
    def n_states(self) -> int:
        return int(self.transition_counts.shape[0])

    @property
    def n_actions(self) -> int:
        return int(self.transition_counts.shape[1])

    def row_total(self, s: int, a: int) -> float:
        """Dirichlet concentration ``n = sum_i psi_i`` of row (s, a)."""
        return float(self.transition_counts[s, a].sum())

    def same_counts(self, other: BeliefState) -> bool:
        return bool(
            np.array_equal(self.transition_counts, other.transition_counts)
            and np.array_equal(self.reward_params, other.reward_params)
        )

    def key(self) -> bytes:
        """Hashable digest of the counts, used to cache per-belief results."""
        return self.transition_counts.tobytes() + self.reward_params.tobytes()

    def check_pair(self, s: int, a: int) -> None:
        if not 0 <= s < self.n_states:
            msg = f"State {s} out of range [0, {self.n_states})"
            raise ValidationError(msg, field="s", value=s)
        if not 0 <= a < self.n_actions:
            msg = f"Action {a} out of range [0, {self.n_actions})"
            raise ValidationError(msg, field="a", value=a)


@dataclass(frozen=True)
class Transition:
    """One observed step ``(s, a, r, s_next)`` with a Bernoulli reward."""

    s: int
    a: int
    r: int
    s_next: int

    def __post_init__(self) -> None:
        if self.r not in (REWARD_FAILURE, REWARD_SUCCESS):
            msg = f"Reward must be 0 or 1, got {self.r}"
            raise ValidationError(msg, field="r", value=self.r)
        if min(self.s, self.a, self.s_next) < 0:
            msg = "Indices must be non-negative"
            raise ValidationError(msg, field="transition", value=(self.s, self.a, self.s_next))


@dataclass(frozen=True)
class HyperState:
    """A BAMDP state ``omega = (s, xi)``."""

    state: int
    belief: BeliefState

    def __post_init__(self) -> None:
        if not 0 <= self.state < self.belief.n_states:
            msg = f"State {self.state} out of range [0, {self.belief.n_states})"
            raise ValidationError(msg, field="state", value=self.state)


def posterior_update(belief: BeliefState, obs: Transition) -> BeliefState:
    """Condition ``belief`` on one observed transition.

    Only cell (obs.s, obs.a) changes: ``psi[s_next] += 1`` and the Beta pair
    gains ``(r, 1 - r)``.
    """
    belief.check_pair(obs.s, obs.a)
    if obs.s_next >= belief.n_states:
        msg = f"Next state {obs.s_next} out of range [0, {belief.n_states})"
        raise ValidationError(msg, field="s_next", value=obs.s_next)

    counts = belief.transition_counts.copy()
    params = belief.reward_params.copy()
    counts[obs.s, obs.a, obs.s_next] += 1.0
    params[obs.s, obs.a, 0] += obs.r
    params[obs.s, obs.a, 1] += 1 - obs.r
    return BeliefState(counts, params, belief.discount)


def mean_mdp(belief: BeliefState) -> FiniteMDP:
    """The expected MDP: normalized counts and Beta means."""
    counts = belief.transition_counts
    params = belief.reward_params
    transition = counts / counts.sum(axis=2, keepdims=True)
    mean_reward = params[..., 0] / params.sum(axis=2)
    return FiniteMDP(transition, mean_reward, belief.discount)


def predictive_distribution(belief: BeliefState, s: int, a: int) -> np.ndarray:
    """Joint predictive of the next step at (s, a).

    Returns:
        Array of shape (2, S); entry ``[r, s_next]`` is the probability of
        reward ``r`` and next state ``s_next``
    """
    belief.check_pair(s, a)
    row = belief.transition_counts[s, a]
    alpha, beta = belief.reward_params[s, a]
    success = alpha / (alpha + beta)
    return np.outer([1.0 - success, success], row / row.sum())


def sample_mdp(belief: BeliefState, rng: np.random.Generator) -> FiniteMDP:
    """Draw one MDP: a Dirichlet row per (s, a) and a Beta mean reward per (s, a).

    Rows are drawn as normalized Gamma variables. A row whose Gamma draws all
    underflow (every count tiny) is redrawn with ``Generator.dirichlet``.
    """
    counts = belief.transition_counts
    draws = rng.gamma(shape=counts, scale=1.0)
    totals = draws.sum(axis=2, keepdims=True)
    degenerate = totals[..., 0] <= 0
    if degenerate.any():
        for s, a in zip(*np.nonzero(degenerate), strict=True):
            draws[s, a] = rng.dirichlet(counts[s, a])
        totals = draws.sum(axis=2, keepdims=True)
    transition = draws / totals

    params = belief.reward_params
    mean_reward = rng.beta(params[..., 0], params[..., 1])
    return FiniteMDP(transition, mean_reward, belief.discount)


def observation_counts(belief: BeliefState, prior: BeliefState) -> tuple[np.ndarray, np.ndarray]:
    """Counts added to ``prior`` to reach ``belief``.

    Returns:
        ``(transitions, rewards)`` with shapes (S, A, S) and (S, A, 2); the
        reward array holds (successes, failures)
    """
    if belief.transition_counts.shape != prior.transition_counts.shape:
        msg = "Belief and prior have different shapes"
        raise ValidationError(msg, field="belief", value=belief.transition_counts.shape)
    transitions = belief.transition_counts - prior.transition_counts
    rewards = belief.reward_params - prior.reward_params
    if np.any(transitions < -1e-9) or np.any(rewards < -1e-9):
        msg = "Belief is not reachable from the prior by observations"
        raise ValidationError(msg, field="belief")
    return np.maximum(transitions, 0.0), np.maximum(rewards, 0.0)


def dirichlet_step_bound(n_t: float, k: int) -> float:
    """Largest move ``k / (2 (n_t + k))`` of a Dirichlet mean coordinate after
    ``k`` observations from a row with total count ``n_t``."""
    if not n_t > 0:
        msg = f"Total count must be positive, got {n_t}"
        raise DomainError(msg, field="n_t", value=n_t)
    if k < 1:
        msg = f"Number of steps must be at least 1, got {k}"
        raise DomainError(msg, field="k", value=k)
    return k / (2.0 * (n_t + k))


def dirichlet_coordinate_bound(psi_i: float, n_t: float, k: int) -> float:
    """Exact worst-case move ``k * max(psi_i, n_t - psi_i) / (n_t (n_t + k))`` of
    one mean coordinate after ``k`` observations.

    Coincides with :func:`dirichlet_step_bound` when ``psi_i = n_t / 2`` and
    exceeds it otherwise.
    """
    dirichlet_step_bound(n_t, k)
    if not 0 < psi_i <= n_t:
        msg = f"Coordinate count must lie in (0, n_t], got {psi_i}"
        raise DomainError(msg, field="psi_i", value=psi_i)
    return k * max(psi_i, n_t - psi_i) / (n_t * (n_t + k))


def dirichlet_mean_shift(
    belief: BeliefState, s: int, a: int, next_states: Sequence[int]
) -> np.ndarray:
    """Sup-norm movement of the mean of row (s, a) after each observation.

    Entry ``j`` is ``max_i |psi_{t+j+1}^i / n_{t+j+1} - psi_t^i / n_t|``.
    """
    belief.check_pair(s, a)
    row = belief.transition_counts[s, a].astype(float)
    start = row / row.sum()
    shifts = np.empty(len(next_states))
    current = row.copy()
    for j, s_next in enumerate(next_states):
        current[s_next] += 1.0
        shifts[j] = np.abs(current / current.sum() - start).max()
    return shifts


def martingale_residual(belief: BeliefState, s: int, a: int) -> float:
    """``max_i |E[psi_{t+1}^i / n_{t+1}] - psi_t^i / n_t|`` under the predictive."""
    belief.check_pair(s, a)
    row = belief.transition_counts[s, a].astype(float)
    total = row.sum()
    probabilities = row / total
    # Posterior mean after observing j is (row + e_j) / (total + 1)
    expected = (probabilities @ (row[None, :] + np.eye(row.size))) / (total + 1.0)
    return float(np.abs(expected - probabilities).max())


@runtime_checkable
class PosteriorModel(Protocol):
    """How a belief maps to predictions, mean MDPs and sampled MDPs."""

    def predictive(self, belief: BeliefState, s: int, a: int) -> np.ndarray: ...

    def mean_mdp(self, belief: BeliefState) -> FiniteMDP: ...

    def sample_mdp(self, belief: BeliefState, rng: np.random.Generator) -> FiniteMDP: ...

    def support(self, belief: BeliefState) -> list[tuple[FiniteMDP, float]] | None: ...


class DirichletPosterior:
    """The conjugate Dirichlet-Beta model; infinite support."""

    def predictive(self, belief: BeliefState, s: int, a: int) -> np.ndarray:
        return predictive_distribution(belief, s, a)

    def mean_mdp(self, belief: BeliefState) -> FiniteMDP:
        return mean_mdp(belief)

    def sample_mdp(self, belief: BeliefState, rng: np.random.Generator) -> FiniteMDP:
        return sample_mdp(belief, rng)

    def support(self, belief: BeliefState) -> None:
        return None

    def __repr__(self) -> str:
        return "DirichletPosterior()"


class FiniteSupportPosterior:
    """A prior that is a finite mixture of known MDPs.

    The mixture weights are updated from the observation counts that separate
    a belief from ``prior``. A belief that no component can explain keeps the
    prior weights, so every node of a fully expanded tree stays well defined.
    """

    def __init__(
        self,
        components: Sequence[FiniteMDP],
        weights: Sequence[float],
        prior: BeliefState,
    ):
        if not components:
            msg = "A finite-support posterior needs at least one component"
            raise ValidationError(msg, field="components")
        weights_array = np.asarray(weights, dtype=float)
        validate_weights(weights_array, field="weights")
        if weights_array.size != len(components):
            msg = f"Got {weights_array.size} weights for {len(components)} components"
            raise ValidationError(msg, field="weights", value=weights_array.size)
        shape = prior.transition_counts.shape
        for mdp in components:
            if mdp.transition.shape != shape:
                msg = f"Component shape {mdp.transition.shape} does not match prior {shape}"
                raise ValidationError(msg, field="components", value=mdp.transition.shape)
            if mdp.discount != prior.discount:
                msg = "Components must share the prior's discount"
                raise ValidationError(msg, field="discount", value=mdp.discount)

        self.components = list(components)
        self.weights = weights_array
        self.prior = prior
        self._transitions = np.stack([m.transition for m in components])
        self._rewards = np.stack([m.mean_reward for m in components])
        self._cache: dict[bytes, np.ndarray] = {}

    def posterior_weights(self, belief: BeliefState) -> np.ndarray:
        key = belief.key()
        cached = self._cache.get(key)
        if cached is not None:
            return cached

        transitions, rewards = observation_counts(belief, self.prior)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_p = np.where(transitions > 0, np.log(self._transitions), 0.0)
            log_r1 = np.where(rewards[..., 0] > 0, np.log(self._rewards), 0.0)
            log_r0 = np.where(rewards[..., 1] > 0, np.log1p(-self._rewards), 0.0)
        log_likelihood = (
            (transitions * log_p).sum(axis=(1, 2, 3))
            + (rewards[..., 0] * log_r1).sum(axis=(1, 2))
            + (rewards[..., 1] * log_r0).sum(axis=(1, 2))
        )
        log_weights = np.log(self.weights) + log_likelihood
        if not np.isfinite(log_weights).any():
            weights = self.weights
        else:
            log_weights -= log_weights.max()
            weights = np.exp(log_weights)
            weights /= weights.sum()
        weights.setflags(write=False)
        self._cache[key] = weights
        return weights

    def predictive(self, belief: BeliefState, s: int, a: int) -> np.ndarray:
        belief.check_pair(s, a)
        weights = self.posterior_weights(belief)
        success = self._rewards[:, s, a]
        rows = self._transitions[:, s, a, :]
        joint = np.einsum("k,kr,kt->rt", weights, np.stack([1.0 - success, success], 1), rows)
        return joint / joint.sum()

    def mean_mdp(self, belief: BeliefState) -> FiniteMDP:
        weights = self.posterior_weights(belief)
        return mixture_mean(self.components, weights)

    def sample_mdp(self, belief: BeliefState, rng: np.random.Generator) -> FiniteMDP:
        weights = self.posterior_weights(belief)
        return self.components[int(rng.choice(len(self.components), p=weights))]

    def support(self, belief: BeliefState) -> list[tuple[FiniteMDP, float]]:
        weights = self.posterior_weights(belief)
        return [(m, float(w)) for m, w in zip(self.components, weights, strict=True) if w > 0]

    def __repr__(self) -> str:
        return f"FiniteSupportPosterior(components={len(self.components)})"


def validate_weights(weights: np.ndarray, field: str = "weights", tol: float = 1e-9) -> None:
    if weights.ndim != 1 or weights.size == 0:
        msg = "Weights must be a non-empty vector"
        raise ValidationError(msg, field=field)
    if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
        msg = "Weights must be finite and positive"
        raise ValidationError(msg, field=field)
    if abs(float(weights.sum()) - 1.0) > tol:
        msg = f"Weights must sum to 1, got {weights.sum():.12f}"
        raise ValidationError(msg, field=field, value=float(weights.sum()))


def mixture_mean(components: Sequence[FiniteMDP], weights: np.ndarray) -> FiniteMDP:
    """Weighted-mean MDP of a finite mixture."""
    transition = np.einsum("k,ksat->sat", weights, np.stack([m.transition for m in components]))
    transition /= transition.sum(axis=2, keepdims=True)
    mean_reward = np.einsum("k,ksa->sa", weights, np.stack([m.mean_reward for m in components]))
    mean_reward = np.clip(mean_reward, 0.0, 1.0)
    return FiniteMDP(transition, mean_reward, components[0].discount)


DIRICHLET = DirichletPosterior()

