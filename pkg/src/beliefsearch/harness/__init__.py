"""Problem files, generators, regret references, verification checks and sweeps."""

from .problems import GeneratedProblem, chain_mdp, generate_problem, two_branch_problem
from .regret import ReferenceValues, RegretOracle, regret_of
from .specs import (
    Generator,
    MDPSpec,
    ProblemSpec,
    SweepSpec,
    load_problem,
    load_sweep,
    parse_spec,
)
from .sweep import format_csv, read_csv, report_from_row, report_to_row, run_cell, run_sweep
from .verification import Check, VerificationRow, VerificationSummary, verify

__all__ = [
    "Check",
    "GeneratedProblem",
    "Generator",
    "MDPSpec",
    "ProblemSpec",
    "ReferenceValues",
    "RegretOracle",
    "SweepSpec",
    "VerificationRow",
    "VerificationSummary",
    "chain_mdp",
    "format_csv",
    "generate_problem",
    "load_problem",
    "load_sweep",
    "parse_spec",
    "read_csv",
    "regret_of",
    "report_from_row",
    "report_to_row",
    "run_cell",
    "run_sweep",
    "two_branch_problem",
    "verify",
]
