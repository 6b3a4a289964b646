"""Known MDPs, their exact solvers, and conjugate beliefs over them."""

from .belief import (
    DIRICHLET,
    BeliefState,
    DirichletPosterior,
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
from .mdp import (
    FiniteMDP,
    Policy,
    ValueFunction,
    argmax_lowest,
    perturbation_gap,
    policy_evaluation,
    policy_iteration,
    q_values,
    random_mdp,
    simulate_returns,
    value_iteration,
)

__all__ = [
    "DIRICHLET",
    "BeliefState",
    "DirichletPosterior",
    "FiniteMDP",
    "FiniteSupportPosterior",
    "HyperState",
    "Policy",
    "PosteriorModel",
    "Transition",
    "ValueFunction",
    "argmax_lowest",
    "dirichlet_coordinate_bound",
    "dirichlet_mean_shift",
    "dirichlet_step_bound",
    "martingale_residual",
    "mean_mdp",
    "observation_counts",
    "perturbation_gap",
    "policy_evaluation",
    "policy_iteration",
    "posterior_update",
    "predictive_distribution",
    "q_values",
    "random_mdp",
    "sample_mdp",
    "simulate_returns",
    "value_iteration",
]
