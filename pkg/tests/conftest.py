"""Configuration for pytest and hypothesis, plus shared problem fixtures."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from beliefsearch.core.mdp import FiniteMDP
from beliefsearch.harness.problems import generate_problem
from beliefsearch.harness.specs import Generator, ProblemSpec
from tests.test_utils import bandit_mdp, mixture_problem

# Define a 'dev' profile for faster local testing
# This profile runs fewer examples per test.
settings.register_profile(
    "dev",
    max_examples=10,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)

# Define a 'ci' profile for more thorough testing in CI environments
settings.register_profile("ci", max_examples=100, deadline=None)

# Load the 'dev' profile by default when running tests locally
settings.load_profile("dev")


def pytest_addoption(parser):
    parser.addoption(
        "--runslow",
        action="store_true",
        default=False,
        help="run acceptance-scale performance tests",
    )


@pytest.fixture
def bandit_problem():
    """Two-armed Bernoulli bandit with uniform priors, gamma = 0.5."""
    spec = ProblemSpec(
        name="bandit", n_states=1, n_actions=2, gamma=0.5, generator=Generator.TWO_ARMED_BANDIT
    )
    return generate_problem(spec)


@pytest.fixture
def two_point_problem():
    """Finite mixture of two bandits with opposite good arms."""
    return mixture_problem([bandit_mdp(0.9, 0.1), bandit_mdp(0.2, 0.8)], [0.5, 0.5])


@pytest.fixture
def known_bandit_problem():
    """A finite mixture with a single component: the MDP is known."""
    return mixture_problem([bandit_mdp(0.2, 0.8)], [1.0], name="known")


@pytest.fixture
def walk_mdp():
    """Two states: action 1 in state 0 moves to the paying state 1.

    With gamma = 0.9: V(1) = 10, V(0) = 9; the optimal policy is (1, 0).
    """
    transition = np.zeros((2, 2, 2))
    transition[0, 0, 0] = 1.0
    transition[0, 1, 1] = 1.0
    transition[1, :, 1] = 1.0
    mean_reward = np.array([[0.0, 0.0], [1.0, 1.0]])
    return FiniteMDP(transition, mean_reward, 0.9)
