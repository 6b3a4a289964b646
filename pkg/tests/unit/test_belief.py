"""Tests for Dirichlet-Beta beliefs and finite-support posteriors."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from beliefsearch.core.belief import (
    DIRICHLET,
    BeliefState,
    FiniteSupportPosterior,
    HyperState,
    PosteriorModel,
    Transition,
    dirichlet_coordinate_bound,
    dirichlet_mean_shift,
    dirichlet_step_bound,
    martingale_residual,
    mean_mdp,
    observation_counts,
    posterior_update,
    predictive_distribution,
    sample_mdp,
)
from beliefsearch.exceptions import DomainError, ValidationError
from tests.test_utils import bandit_mdp


@pytest.fixture
def belief():
    return BeliefState.uniform(3, 2, 0.9)


class TestBeliefState:
    """Construction and validation."""

    def test_uniform_shapes(self, belief):
        assert belief.n_states == 3
        assert belief.n_actions == 2
        assert belief.transition_counts.shape == (3, 2, 3)
        assert belief.reward_params.shape == (3, 2, 2)
        assert belief.row_total(0, 1) == 3.0

    def test_rejects_non_positive_counts(self):
        counts = np.ones((2, 1, 2))
        counts[0, 0, 1] = 0.0
        with pytest.raises(ValidationError) as exc_info:
            BeliefState(counts, np.ones((2, 1, 2)), 0.5)
        assert exc_info.value.field == "transition_counts"

    def test_rejects_bad_reward_shape(self):
        with pytest.raises(ValidationError):
            BeliefState(np.ones((2, 1, 2)), np.ones((2, 1, 3)), 0.5)

    def test_hyper_state_checks_range(self, belief):
        with pytest.raises(ValidationError):
            HyperState(3, belief)

    def test_transition_rejects_non_binary_reward(self):
        with pytest.raises(ValidationError):
            Transition(0, 0, 2, 0)


class TestPosteriorUpdate:
    """Conjugate updates touch exactly one cell."""

    def test_only_observed_cell_changes(self, belief):
        updated = posterior_update(belief, Transition(1, 0, 1, 2))
        delta = updated.transition_counts - belief.transition_counts
        assert delta.sum() == 1.0
        assert delta[1, 0, 2] == 1.0
        reward_delta = updated.reward_params - belief.reward_params
        assert reward_delta[1, 0].tolist() == [1.0, 0.0]
        assert reward_delta.sum() == 1.0

    def test_original_belief_is_untouched(self, belief):
        posterior_update(belief, Transition(0, 0, 0, 0))
        assert belief.same_counts(BeliefState.uniform(3, 2, 0.9))

    def test_rejects_out_of_range_next_state(self, belief):
        with pytest.raises(ValidationError):
            posterior_update(belief, Transition(0, 0, 0, 3))

    def test_observation_counts_recover_history(self, belief):
        updated = posterior_update(belief, Transition(0, 1, 1, 2))
        updated = posterior_update(updated, Transition(0, 1, 0, 2))
        transitions, rewards = observation_counts(updated, belief)
        assert transitions[0, 1, 2] == 2.0
        assert transitions.sum() == 2.0
        assert rewards[0, 1].tolist() == [1.0, 1.0]

    def test_observation_counts_reject_unreachable_belief(self, belief):
        updated = posterior_update(belief, Transition(0, 0, 1, 0))
        with pytest.raises(ValidationError):
            observation_counts(belief, updated)


class TestPredictive:
    """Mean MDPs, joint predictives and samples."""

    def test_mean_mdp_of_uniform_belief(self, belief):
        mdp = mean_mdp(belief)
        np.testing.assert_allclose(mdp.transition, 1.0 / 3.0)
        np.testing.assert_allclose(mdp.mean_reward, 0.5)
        assert mdp.discount == 0.9

    def test_predictive_is_a_joint_distribution(self, belief):
        updated = posterior_update(belief, Transition(2, 1, 1, 0))
        joint = predictive_distribution(updated, 2, 1)
        assert joint.shape == (2, 3)
        assert joint.sum() == pytest.approx(1.0)
        # Beta(2, 1) predicts success with probability 2/3, Dirichlet(2, 1, 1) state 0 with 1/2
        assert joint[1].sum() == pytest.approx(2.0 / 3.0)
        assert joint[:, 0].sum() == pytest.approx(0.5)

    def test_sample_mean_approaches_mean_mdp(self, belief):
        rng = np.random.default_rng(5)
        samples = [sample_mdp(belief, rng) for _ in range(4_000)]
        transition = np.mean([m.transition for m in samples], axis=0)
        reward = np.mean([m.mean_reward for m in samples], axis=0)
        np.testing.assert_allclose(transition, mean_mdp(belief).transition, atol=0.03)
        np.testing.assert_allclose(reward, mean_mdp(belief).mean_reward, atol=0.03)

    def test_dirichlet_model_satisfies_protocol(self):
        assert isinstance(DIRICHLET, PosteriorModel)
        assert DIRICHLET.support(BeliefState.uniform(1, 1, 0.5)) is None


class TestDirichletSmoothness:
    """Closed-form bounds on how far a Dirichlet mean can move."""

    def test_step_bound_matches_coordinate_bound_at_symmetric_counts(self):
        assert dirichlet_step_bound(2.0, 1) == pytest.approx(1.0 / 6.0)
        assert dirichlet_coordinate_bound(1.0, 2.0, 1) == pytest.approx(1.0 / 6.0)

    def test_skewed_row_exceeds_step_bound(self):
        # Counts (0.1, 0.9): one more observation of state 0 moves that mean by 0.45
        belief = BeliefState(np.array([[[0.1, 0.9]]]).repeat(2, axis=0), np.ones((2, 1, 2)), 0.5)
        shift = dirichlet_mean_shift(belief, 0, 0, [0])[0]
        assert shift == pytest.approx(0.45)
        assert shift == pytest.approx(dirichlet_coordinate_bound(0.1, 1.0, 1))
        assert shift > dirichlet_step_bound(1.0, 1)

    @given(
        st.lists(st.floats(0.05, 5.0), min_size=2, max_size=4),
        st.lists(st.integers(0, 3), min_size=1, max_size=8),
    )
    def test_coordinate_bound_dominates_observed_shift(self, row, observations):
        n_states = len(row)
        observations = [o % n_states for o in observations]
        counts = np.tile(np.asarray(row), (n_states, 1, 1))
        belief = BeliefState(counts, np.ones((n_states, 1, 2)), 0.5)
        shifts = dirichlet_mean_shift(belief, 0, 0, observations)
        total = sum(row)
        for k, shift in enumerate(shifts, start=1):
            worst = max(dirichlet_coordinate_bound(psi, total, k) for psi in row)
            assert shift <= worst + 1e-12

    def test_mean_is_a_martingale(self):
        belief = BeliefState(
            np.array([[[0.3, 2.0, 5.5]]]).repeat(3, axis=0), np.ones((3, 1, 2)), 0.5
        )
        assert martingale_residual(belief, 1, 0) < 1e-12

    def test_bounds_reject_bad_domain(self):
        with pytest.raises(DomainError):
            dirichlet_step_bound(0.0, 1)
        with pytest.raises(DomainError):
            dirichlet_step_bound(1.0, 0)
        with pytest.raises(DomainError):
            dirichlet_coordinate_bound(2.0, 1.0, 1)


class TestFiniteSupportPosterior:
    """Mixture reweighting from observation counts."""

    def test_prior_weights_at_the_root(self, two_point_problem):
        model = two_point_problem.model
        weights = model.posterior_weights(two_point_problem.root.belief)
        np.testing.assert_allclose(weights, [0.5, 0.5])

    def test_reward_observation_reweights(self, two_point_problem):
        model = two_point_problem.model
        updated = posterior_update(two_point_problem.root.belief, Transition(0, 0, 1, 0))
        # Likelihoods 0.9 and 0.2 for a success on action 0
        np.testing.assert_allclose(model.posterior_weights(updated), [0.45 / 0.55, 0.1 / 0.55])

    def test_predictive_mixes_components(self, two_point_problem):
        model = two_point_problem.model
        joint = model.predictive(two_point_problem.root.belief, 0, 1)
        assert joint.shape == (2, 1)
        assert joint[1, 0] == pytest.approx(0.5 * 0.1 + 0.5 * 0.8)

    def test_unexplained_belief_keeps_prior_weights(self):
        certain = bandit_mdp(1.0, 0.0)
        other = bandit_mdp(1.0, 0.0)
        prior = BeliefState.uniform(1, 2, 0.5)
        model = FiniteSupportPosterior([certain, other], [0.3, 0.7], prior)
        # A failure on action 0 has probability zero under both components
        updated = posterior_update(prior, Transition(0, 0, 0, 0))
        np.testing.assert_allclose(model.posterior_weights(updated), [0.3, 0.7])

    def test_mean_mdp_is_weighted_average(self, two_point_problem):
        mdp = two_point_problem.model.mean_mdp(two_point_problem.root.belief)
        np.testing.assert_allclose(mdp.mean_reward, [[0.55, 0.45]])

    def test_support_lists_components(self, two_point_problem):
        support = two_point_problem.model.support(two_point_problem.root.belief)
        assert len(support) == 2
        assert sum(weight for _, weight in support) == pytest.approx(1.0)

    def test_samples_are_components(self, two_point_problem):
        model = two_point_problem.model
        rng = np.random.default_rng(0)
        drawn = {id(model.sample_mdp(two_point_problem.root.belief, rng)) for _ in range(50)}
        assert drawn <= {id(m) for m in model.components}

    def test_rejects_mismatched_weights(self):
        prior = BeliefState.uniform(1, 2, 0.5)
        with pytest.raises(ValidationError):
            FiniteSupportPosterior([bandit_mdp(0.1, 0.2)], [0.5, 0.5], prior)
        with pytest.raises(ValidationError):
            FiniteSupportPosterior([bandit_mdp(0.1, 0.2)], [0.9], prior)

    def test_rejects_discount_mismatch(self):
        prior = BeliefState.uniform(1, 2, 0.9)
        with pytest.raises(ValidationError):
            FiniteSupportPosterior([bandit_mdp(0.1, 0.2)], [1.0], prior)
