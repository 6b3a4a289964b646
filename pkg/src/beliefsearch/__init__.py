"""beliefsearch - belief-tree planning for Bayesian reinforcement learning."""

from .core.belief import BeliefState, HyperState, Transition
from .core.mdp import FiniteMDP, Policy, ValueFunction
from .exceptions import (
    CapabilityError,
    ConfigurationError,
    DomainError,
    PlannerError,
    ResourceError,
    StateError,
    ValidationError,
    VerificationError,
)
from .planning.models import Algorithm, PlanningProblem, RunReport, SearchConfig
from .planning.search import run_search

__version__ = "0.1.0"

__all__ = [
    "Algorithm",
    "BeliefState",
    "CapabilityError",
    "ConfigurationError",
    "DomainError",
    "FiniteMDP",
    "HyperState",
    "PlannerError",
    "PlanningProblem",
    "Policy",
    "ResourceError",
    "RunReport",
    "SearchConfig",
    "StateError",
    "Transition",
    "ValidationError",
    "ValueFunction",
    "VerificationError",
    "run_search",
]
