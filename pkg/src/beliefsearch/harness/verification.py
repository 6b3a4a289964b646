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

"""Simulations that hold the concentration calculators against empirical data.

Each check produces rows pairing an empirical quantity (with a confidence
interval when it is a Monte-Carlo estimate) with the closed-form bound at the
same grid point. A row is dominated when the lower end of its interval does
not exceed the bound. A check passes when every required row is dominated;
report-only rows are written to the CSV but never fail a check.
"""

from __future__ import annotations

import csv
import io
import logging
from collections.abc import Callable, Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from enum import Enum
from pathlib import Path

import numpy as np

from beliefsearch.analysis.concentration import (
    depth_threshold,
    expected_leaf_samples,
    hoeffding,
    leaf_sample_hoeffding_tail,
    leaf_sample_tail,
    mean_interval,
    proportion_interval,
    sbb1_depth_tail,
    sbb2_depth_tail,
    weighted_hoeffding,
)
from beliefsearch.config import harness_config
from beliefsearch.core.belief import (
    BeliefState,
    dirichlet_coordinate_bound,
    dirichlet_mean_shift,
    dirichlet_step_bound,
    martingale_residual,
)
from beliefsearch.core.mdp import (
    FiniteMDP,
    Policy,
    perturbation_gap,
    policy_evaluation,
    random_mdp,
)
from beliefsearch.exceptions import ValidationError
from beliefsearch.harness.problems import two_branch_problem
from beliefsearch.planning.models import Algorithm, SearchConfig
from beliefsearch.planning.search import run_search
from beliefsearch.utils.performance import monitor_performance
from beliefsearch.utils.security import atomic_write_text, sanitize_path
from beliefsearch.utils.streams import Purpose, StreamFactory

logger = logging.getLogger(__name__)

EXACT_TOL = 1e-12


class Check(str, Enum):
    """The available verification checks."""

    LEAF_SAMPLES = "leaf-samples"
    SBB1_DEPTH = "sbb1-depth"
    SBB2_DEPTH = "sbb2-depth"
    DIRICHLET_SMOOTHNESS = "dirichlet-smoothness"
    VALUE_PERTURBATION = "value-perturbation"
    HOEFFDING = "hoeffding"

    @classmethod
    def parse(cls, value: str | Check) -> Check:
        """Look up a check by name or by its short label (``L3`` .. ``L7``)."""
        if isinstance(value, Check):
            return value
        normalized = str(value).strip().lower().replace("_", "-")
        if normalized in CHECK_LABELS:
            return CHECK_LABELS[normalized]
        try:
            return cls(normalized)
        except ValueError:
            choices = ", ".join([c.value for c in cls] + [label.upper() for label in CHECK_LABELS])
            msg = f"Unknown check '{value}' (choose from {choices})"
            raise ValidationError(msg, field="check", value=value) from None


CHECK_LABELS: dict[str, Check] = {
    "l3": Check.LEAF_SAMPLES,
    "l4": Check.SBB1_DEPTH,
    "l5": Check.SBB2_DEPTH,
    "l6": Check.DIRICHLET_SMOOTHNESS,
    "l7": Check.VALUE_PERTURBATION,
}


@dataclass(frozen=True)
class VerificationRow:
    """One grid point of a check."""

    check: str
    parameter: str
    point: float
    empirical: float
    ci_low: float
    ci_high: float
    bound: float
    dominated: bool
    required: bool = True

    @classmethod
    def exact(
        cls,
        check: Check,
        parameter: str,
        point: float,
        empirical: float,
        bound: float,
        required: bool = True,
    ) -> VerificationRow:
        """Row for a deterministic quantity; the interval collapses to the value."""
        return cls(
            check=check.value,
            parameter=parameter,
            point=point,
            empirical=empirical,
            ci_low=empirical,
            ci_high=empirical,
            bound=bound,
            dominated=empirical <= bound + EXACT_TOL,
            required=required,
        )

    @classmethod
    def proportion(
        cls,
        check: Check,
        parameter: str,
        point: float,
        hits: int,
        trials: int,
        bound: float,
        confidence: float,
        required: bool = True,
    ) -> VerificationRow:
        low, high = proportion_interval(hits, trials, confidence)
        return cls(
            check=check.value,
            parameter=parameter,
            point=point,
            empirical=hits / trials,
            ci_low=low,
            ci_high=high,
            bound=bound,
            dominated=low <= bound + EXACT_TOL,
            required=required,
        )

    def to_csv(self) -> list[str]:
        return [
            self.check,
            self.parameter,
            f"{self.point:g}",
            f"{self.empirical:.12g}",
            f"{self.ci_low:.12g}",
            f"{self.ci_high:.12g}",
            f"{self.bound:.12g}",
            str(self.dominated).lower(),
            str(self.required).lower(),
        ]


CSV_HEADER = tuple(f.name for f in fields(VerificationRow))


@dataclass
class VerificationSummary:
    """Outcome of one check."""

    check: Check
    trials: int
    seed: int
    confidence: float
    rows: list[VerificationRow] = field(default_factory=list)
    out_path: Path | None = None

    @property
    def passed(self) -> bool:
        return all(row.dominated for row in self.rows if row.required)

    @property
    def failures(self) -> list[VerificationRow]:
        return [row for row in self.rows if row.required and not row.dominated]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(row.to_csv() for row in self.rows)
        return buffer.getvalue()


def simulate_stopping_times(
    beta: float,
    delta: float,
    trials: int,
    rng: np.random.Generator,
    horizon: int,
    law: str = "uniform",
) -> np.ndarray:
    """Number of draws on ``[0, beta]`` until the running mean exceeds its
    expectation ``beta / 2`` minus ``delta``; ``horizon + 1`` when it never does.

    ``law`` is ``"uniform"`` (Uniform[0, beta]) or ``"bernoulli"`` (0 or
    ``beta`` with equal odds, the two-point law with the largest variance).
    """
    shape = (trials, horizon)
    if law == "uniform":
        draws = rng.uniform(0.0, beta, size=shape)
    elif law == "bernoulli":
        draws = beta * (rng.random(size=shape) < 0.5)
    else:
        msg = f"Unknown sampling law '{law}' (choose from uniform, bernoulli)"
        raise ValidationError(msg, field="law", value=law)
    running = np.cumsum(draws, axis=1) / np.arange(1, horizon + 1)
    stopped = running > beta / 2.0 - delta
    return np.where(stopped.any(axis=1), stopped.argmax(axis=1) + 1, horizon + 1)


def _leaf_samples(
    trials: int, streams: StreamFactory, confidence: float
) -> Iterator[VerificationRow]:
    """Stopping times against the mean bound and two tail bounds.

    The Hoeffding-rate tail rows are required. The quadratic-exponent rows
    are written for comparison only.
    """
    beta = harness_config.leaf_sample_beta
    check = Check.LEAF_SAMPLES
    for law_index, law in enumerate(harness_config.leaf_sample_laws):
        for index, delta in enumerate(harness_config.leaf_sample_deltas):
            rng = streams.stream(law_index, index, Purpose.SIMULATION)
            n = simulate_stopping_times(
                beta, delta, trials, rng, harness_config.leaf_sample_horizon, law
            )
            low, high = mean_interval(n, confidence)
            mean = float(n.mean())
            bound = expected_leaf_samples(beta, delta)
            yield VerificationRow(
                check.value, f"{law}:mean", delta, mean, low, high, bound, low <= bound
            )
            parameter = f"{law}:delta={delta:g}"
            for point in range(1, harness_config.leaf_sample_max_n + 1):
                hits = int((n > point).sum())
                yield VerificationRow.proportion(
                    check,
                    parameter,
                    point,
                    hits,
                    trials,
                    leaf_sample_hoeffding_tail(beta, delta, point),
                    confidence,
                )
                yield VerificationRow.proportion(
                    check,
                    f"{parameter}:n-squared",
                    point,
                    hits,
                    trials,
                    leaf_sample_tail(beta, delta, point),
                    confidence,
                    required=False,
                )


def branch_depths(algorithm: Algorithm, trials: int, seed: int, workers: int) -> np.ndarray:
    """Depth reached in the suboptimal branch of the two-branch problem, one run per seed."""
    problem = two_branch_problem()

    def depth(offset: int) -> int:
        config = SearchConfig(
            algorithm=algorithm,
            budget=harness_config.two_branch_budget,
            seed=seed + offset,
            m_final=1,
        )
        return run_search(problem, config).branch_depths[1]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return np.fromiter(pool.map(depth, range(trials)), dtype=np.int64, count=trials)


def _two_branch_threshold() -> tuple[float, float, float, int]:
    gamma = harness_config.two_branch_gamma
    beta = 1.0 / (1.0 - gamma)
    delta = harness_config.two_branch_gap_ratio * beta
    return beta, delta, gamma, depth_threshold(beta, delta, gamma)


def _sbb1_depth(
    trials: int, seed: int, confidence: float, workers: int
) -> Iterator[VerificationRow]:
    beta, delta, gamma, k0 = _two_branch_threshold()
    depths = branch_depths(Algorithm.SBB1, trials, seed, workers)
    for k in range(k0, k0 + harness_config.tail_window + 1):
        yield VerificationRow.proportion(
            Check.SBB1_DEPTH,
            f"k0={k0}",
            k,
            int((depths > k).sum()),
            trials,
            sbb1_depth_tail(beta, delta, gamma, k),
            confidence,
        )


def _sbb2_depth(
    trials: int, seed: int, confidence: float, workers: int
) -> Iterator[VerificationRow]:
    _, _, gamma, k0 = _two_branch_threshold()
    sbb2 = branch_depths(Algorithm.SBB2, trials, seed, workers)
    sbb1 = branch_depths(Algorithm.SBB1, trials, seed, workers)
    start = k0 + harness_config.sbb2_tail_offset
    for k in range(start, start + harness_config.tail_window + 1):
        hits = int((sbb2 > k).sum())
        yield VerificationRow.proportion(
            Check.SBB2_DEPTH,
            f"k0={k0}",
            k,
            hits,
            trials,
            sbb2_depth_tail(gamma, k, k0),
            confidence,
        )
        _, sbb1_high = proportion_interval(int((sbb1 > k).sum()), trials, confidence)
        yield VerificationRow.proportion(
            Check.SBB2_DEPTH, "vs-sbb1", k, hits, trials, sbb1_high, confidence
        )


def _random_row_counts(rng: np.random.Generator) -> np.ndarray:
    n_states = int(rng.integers(2, 5))
    return rng.gamma(1.0, 3.0, size=n_states) + 0.05


def _dirichlet_smoothness(trials: int, streams: StreamFactory) -> Iterator[VerificationRow]:
    """Mean movement of a Dirichlet row against the per-step bounds.

    Half of the sequences are random; the other half send every observation
    to the least likely next state, which attains the worst case.
    """
    check = Check.DIRICHLET_SMOOTHNESS
    max_steps = harness_config.lipschitz_max_steps
    tight = np.zeros(max_steps)
    stated = np.zeros(max_steps)
    martingale = 0.0
    for trial in range(trials):
        rng = streams.stream(trial, Purpose.SIMULATION)
        row = _random_row_counts(rng)
        n_states = row.size
        belief = BeliefState(
            row.reshape(1, 1, n_states).repeat(n_states, axis=0),
            np.ones((n_states, 1, 2)),
            0.5,
        )
        if trial % 2:
            sequence = [int(np.argmin(row))] * max_steps
        else:
            sequence = rng.choice(n_states, size=max_steps, p=row / row.sum()).tolist()
        shifts = dirichlet_mean_shift(belief, 0, 0, sequence)
        total = float(row.sum())
        for j, shift in enumerate(shifts):
            k = j + 1
            exact = max(dirichlet_coordinate_bound(float(p), total, k) for p in row)
            tight[j] = max(tight[j], shift / exact)
            stated[j] = max(stated[j], shift / dirichlet_step_bound(total, k))
        martingale = max(martingale, martingale_residual(belief, 0, 0))

    for j in range(max_steps):
        yield VerificationRow.exact(check, "tight", j + 1, float(tight[j]), 1.0)
    for j in range(max_steps):
        yield VerificationRow.exact(check, "half-step", j + 1, float(stated[j]), 1.0, False)
    yield VerificationRow.exact(check, "martingale", 0, martingale, 0.0)


def perturbed_mdp(mdp: FiniteMDP, epsilon: float, rng: np.random.Generator) -> FiniteMDP:
    """An MDP within ``epsilon`` of ``mdp`` in row L1 distance and reward sup norm."""
    other = random_mdp(mdp.n_states, mdp.n_actions, mdp.discount, rng)
    transition = (1.0 - epsilon / 2.0) * mdp.transition + (epsilon / 2.0) * other.transition
    noise = rng.uniform(-epsilon, epsilon, size=mdp.mean_reward.shape)
    return FiniteMDP(transition, np.clip(mdp.mean_reward + noise, 0.0, 1.0), mdp.discount)


def _value_perturbation(trials: int, streams: StreamFactory) -> Iterator[VerificationRow]:
    grid = [
        (epsilon, gamma)
        for epsilon in harness_config.perturbation_epsilons
        for gamma in harness_config.perturbation_gammas
    ]
    for index, (epsilon, gamma) in enumerate(grid):
        worst = 0.0
        for trial in range(trials):
            rng = streams.stream(index, trial, Purpose.SIMULATION)
            n_states, n_actions = (int(x) for x in rng.integers(1, 4, size=2))
            mdp = random_mdp(n_states, n_actions, gamma, rng)
            nearby = perturbed_mdp(mdp, epsilon, rng)
            policy = Policy(rng.integers(0, n_actions, size=n_states))
            gap = policy_evaluation(mdp, policy).sup_distance(policy_evaluation(nearby, policy))
            worst = max(worst, gap)
        yield VerificationRow.exact(
            Check.VALUE_PERTURBATION,
            f"gamma={gamma:g}",
            epsilon,
            worst,
            perturbation_gap(epsilon, gamma),
        )


def _hoeffding(
    trials: int, streams: StreamFactory, confidence: float
) -> Iterator[VerificationRow]:
    check = Check.HOEFFDING
    max_weights = harness_config.hoeffding_max_weights
    rng = streams.stream(0, Purpose.SIMULATION)

    square_sums = np.zeros(max_weights + 1)
    for _ in range(trials):
        n = int(rng.integers(2, max_weights + 1))
        weights = rng.dirichlet(np.ones(n))
        square_sums[n] = max(square_sums[n], float(np.sum(weights**2)))
    for n in range(2, max_weights + 1):
        if square_sums[n] > 0:
            yield VerificationRow.exact(check, "square-sum", n, float(square_sums[n]), 1.0)

    eps = 0.1
    worst_gap = max(
        abs(weighted_hoeffding(np.full(n, 1.0 / n), 1.0, eps) - hoeffding(n, 1.0, eps))
        for n in range(1, max_weights + 1)
    )
    yield VerificationRow.exact(check, "uniform-weights", eps, worst_gap, 0.0)

    # Weighted means of Uniform[0, 1] draws; one-sided deviations
    for n in (2, 5, max_weights):
        weights = rng.dirichlet(np.ones(n))
        draws = rng.random((trials, n))
        hits = int(((draws @ weights) - 0.5 >= eps).sum())
        yield VerificationRow.proportion(
            check,
            "weighted-tail",
            n,
            hits,
            trials,
            weighted_hoeffding(weights, 1.0, eps),
            confidence,
        )


def _rows(
    check: Check, trials: int, seed: int, confidence: float, workers: int
) -> Iterator[VerificationRow]:
    streams = StreamFactory(seed).spawn(list(Check).index(check))
    runners: dict[Check, Callable[[], Iterator[VerificationRow]]] = {
        Check.LEAF_SAMPLES: lambda: _leaf_samples(trials, streams, confidence),
        Check.SBB1_DEPTH: lambda: _sbb1_depth(trials, seed, confidence, workers),
        Check.SBB2_DEPTH: lambda: _sbb2_depth(trials, seed, confidence, workers),
        Check.DIRICHLET_SMOOTHNESS: lambda: _dirichlet_smoothness(trials, streams),
        Check.VALUE_PERTURBATION: lambda: _value_perturbation(trials, streams),
        Check.HOEFFDING: lambda: _hoeffding(trials, streams, confidence),
    }
    return runners[check]()


@monitor_performance("verify")
def verify(
    check: Check | str,
    trials: int,
    out_path: str | Path | None = None,
    seed: int = 0,
    confidence: float | None = None,
    workers: int = 1,
) -> VerificationSummary:
    """Run ``check`` with ``trials`` replications and optionally write its CSV."""
    check = Check.parse(check)
    if trials < harness_config.min_trials:
        msg = f"Need at least {harness_config.min_trials} trials, got {trials}"
        raise ValidationError(msg, field="trials", value=trials)
    if workers < 1:
        msg = f"Workers must be at least 1, got {workers}"
        raise ValidationError(msg, field="workers", value=workers)
    confidence = harness_config.confidence if confidence is None else confidence

    summary = VerificationSummary(check, trials, seed, confidence)
    summary.rows.extend(_rows(check, trials, seed, confidence, workers))
    for row in summary.failures:
        logger.warning(
            "%s: empirical %.6g (CI low %.6g) exceeds bound %.6g at %s=%g",
            check.value,
            row.empirical,
            row.ci_low,
            row.bound,
            row.parameter,
            row.point,
        )
    if out_path is not None:
        summary.out_path = atomic_write_text(Path(out_path), summary.to_csv())
        logger.info("Wrote %d rows to %s", len(summary.rows), sanitize_path(out_path))
    logger.info("%s %s", check.value, "passed" if summary.passed else "failed")
    return summary


__all__ = [
    "CSV_HEADER",
    "Check",
    "VerificationRow",
    "VerificationSummary",
    "branch_depths",
    "perturbed_mdp",
    "simulate_stopping_times",
    "verify",
]
