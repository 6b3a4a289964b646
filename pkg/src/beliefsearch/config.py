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

"""Configuration constants for beliefsearch.

This module contains the numerical tolerances, resource caps and experiment
defaults used throughout the package, centralized for easier tuning.
"""

from dataclasses import dataclass, field


@dataclass
class SolverConfig:
    """Tolerances for the exact MDP solvers."""

    # Sup-norm accuracy of value iteration
    value_iteration_tol: float = 1e-9
    max_value_iterations: int = 1_000_000

    # Policy iteration switches action only on improvements larger than this
    improvement_tol: float = 1e-12
    max_policy_iterations: int = 1_000

    # Row-sum tolerance for stochastic matrices
    stochastic_tol: float = 1e-12


@dataclass
class TreeConfig:
    """Resource caps for belief trees."""

    node_cap: int = 1_000_000
    # Reward alphabet of the Bernoulli rewards
    n_rewards: int = 2


@dataclass
class SearchDefaults:
    """Defaults shared by the planners."""

    # Lower-bound samples per frontier leaf for the final branch choice of SBB1/SBB2
    m_final: int = 32
    budget: int = 1_000
    epsilon: float = 0.5
    workers: int = 1


@dataclass
class HarnessConfig:
    """Defaults for the verification checks and sweeps."""

    confidence: float = 0.99
    oracle_depth: int = 3
    min_trials: int = 100

    # Stopping-time simulation
    leaf_sample_beta: float = 1.0
    leaf_sample_deltas: tuple[float, ...] = (0.25, 0.5)
    leaf_sample_max_n: int = 12
    leaf_sample_horizon: int = 256
    leaf_sample_laws: tuple[str, ...] = ("uniform", "bernoulli")

    # Two-branch bandit used for the depth-tail experiments
    two_branch_gamma: float = 0.5
    two_branch_gap_ratio: float = 0.25
    two_branch_strength: float = 1_000.0
    two_branch_budget: int = 200
    tail_window: int = 10
    sbb2_tail_offset: int = 5

    # Dirichlet smoothness and perturbation checks
    lipschitz_max_steps: int = 20
    perturbation_epsilons: tuple[float, ...] = (0.01, 0.1)
    perturbation_gammas: tuple[float, ...] = (0.5, 0.9)
    hoeffding_max_weights: int = 20

    csv_header: tuple[str, ...] = field(
        default=(
            "run_id",
            "algo",
            "seed",
            "budget",
            "leaf_evals",
            "node_expansions",
            "max_depth",
            "chosen_action",
            "regret",
            "bracket_width",
            "error",
            "wallclock_ms",
        )
    )


@dataclass
class PerformanceConfig:
    """Configuration for performance logging and error display."""

    slow_operation_ms: int = 5_000
    max_error_length: int = 300


# Global configuration instances
solver_config = SolverConfig()
tree_config = TreeConfig()
search_defaults = SearchDefaults()
harness_config = HarnessConfig()
performance_config = PerformanceConfig()
