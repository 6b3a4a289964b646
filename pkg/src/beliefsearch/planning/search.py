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

"""Planners that pick a root action of a belief tree.

* flat oracle search: full expansion, exact leaf lower bounds;
* flat stochastic search: full expansion, ``m`` Monte-Carlo lower samples per leaf;
* SBB1: stochastic branch and bound, expanding the leaf with the best mean
  upper sample after resampling every leaf;
* SBB2: descends the backed-up upper bounds, averaging the upper samples
  stored along each leaf's path between half its depth and its depth.

A leaf evaluation is one posterior MDP draw plus an exact solve (or one exact
leaf bound). Every planner is a deterministic function of problem and config.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import Any

import numpy as np

from beliefsearch.core.mdp import argmax_lowest
from beliefsearch.exceptions import CapabilityError, ErrorCode, ResourceError
from beliefsearch.planning.bounds import sample_lower, sample_upper
from beliefsearch.planning.models import (
    Algorithm,
    AuditRecord,
    PlanningProblem,
    RunReport,
    SearchConfig,
)
from beliefsearch.planning.tree import (
    Branch,
    LeafValueSource,
    Tree,
    backup,
    backup_values,
    build_full_tree,
    full_tree_size,
)
from beliefsearch.utils.performance import PerformanceTracker
from beliefsearch.utils.streams import Purpose, StreamFactory

logger = logging.getLogger(__name__)


def _log_depth(ratio: float, gamma: float) -> int:
    """``ceil(log_gamma(ratio))``, zero once ``ratio >= 1``."""
    if ratio >= 1.0:
        return 0
    return max(0, math.ceil(math.log(ratio) / math.log(gamma) - 1e-9))


def oracle_depth(gamma: float, epsilon: float, beta: float) -> int:
    """Depth ``ceil(log_gamma(epsilon / beta))`` of flat oracle search."""
    return _log_depth(epsilon / beta, gamma)


def stochastic_depth(gamma: float, epsilon: float, beta: float) -> int:
    """Depth ``ceil(log_gamma(epsilon / (2 beta)))`` of flat stochastic search."""
    return _log_depth(epsilon / (2.0 * beta), gamma)


def stochastic_samples(depth: int, branching_factor: int) -> int:
    """Samples per leaf ``ceil(2 depth ln(phi))``, at least one."""
    return max(1, math.ceil(2 * depth * math.log(branching_factor)))


def required_flat_evaluations(
    algorithm: Algorithm, branching_factor: int, depth: int, m: int = 1
) -> int:
    """Leaf evaluations of a flat planner that searches to ``depth``.

    Flat oracle search deepens one level at a time and evaluates every leaf
    at every level, so it spends ``sum_{j=1..d} phi**j`` unless it stops
    early. Flat stochastic search evaluates only the final frontier,
    ``m * phi**d`` times.
    """
    depth = max(depth, 1)
    if algorithm is Algorithm.FLAT_ORACLE:
        return full_tree_size(branching_factor, depth)
    if algorithm is Algorithm.FLAT_STOCHASTIC:
        return m * branching_factor**depth
    msg = f"{algorithm.value} has no closed-form evaluation count"
    raise CapabilityError(msg, planner=algorithm.value)


class _Sampler:
    """Runs a batch of independent draws, optionally on a thread pool."""

    def __init__(self, workers: int):
        self._pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None

    def map(self, draw: Callable[[Any], float], tasks: Sequence[Any]) -> list[float]:
        if self._pool is None:
            return [draw(task) for task in tasks]
        return list(self._pool.map(draw, tasks))

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown()

    def __enter__(self) -> _Sampler:
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()


def _check_budget(required: int, config: SearchConfig) -> None:
    if required > config.budget:
        msg = (
            f"{config.algorithm.value} needs {required} leaf evaluations, "
            f"budget is {config.budget}"
        )
        raise ResourceError(
            msg,
            resource="leaf_evaluations",
            required=required,
            limit=config.budget,
            error_code=ErrorCode.BUDGET_EXCEEDED,
        )


def _report(
    config: SearchConfig,
    tree: Tree,
    branch_values: np.ndarray,
    evaluations: int,
    expansions: int,
    audit: list[AuditRecord],
) -> RunReport:
    return RunReport(
        algorithm=config.algorithm,
        seed=config.seed,
        budget=config.budget,
        chosen_branch=Branch(argmax_lowest(branch_values)),
        leaf_evaluations=evaluations,
        node_expansions=expansions,
        max_depth_reached=tree.max_depth,
        branch_values=tuple(float(v) for v in branch_values),
        branch_depths=tuple(int(d) for d in tree.branch_depths()),
        audit=audit,
        tree=tree,
    )


def flat_oracle_search(problem: PlanningProblem, config: SearchConfig) -> RunReport:
    """Deepen a full tree until ``k = ceil(log_gamma(epsilon / beta))`` using
    exact leaf lower bounds.

    Deepening stops early once the gap between the best and second-best
    branch lower bounds exceeds ``2 * beta * gamma**d``.

    Raises:
        CapabilityError: If the problem has no finite support
        ResourceError: If the budget or node cap is too small
    """
    config = config.resolve(problem)
    assert config.gamma is not None and config.beta is not None
    if not problem.has_finite_support:
        msg = "Flat oracle search needs exact leaf bounds (a finite-support problem)"
        raise CapabilityError(msg, planner=Algorithm.FLAT_ORACLE.value)

    k = config.depth if config.depth is not None else oracle_depth(
        config.gamma, config.epsilon, config.beta
    )
    depth = max(k, 1)
    required = required_flat_evaluations(Algorithm.FLAT_ORACLE, problem.branching_factor, depth)
    _check_budget(required, config)

    with PerformanceTracker("flat_oracle_search") as tracker:
        tree = Tree(problem.root, problem.model, node_cap=config.node_cap)
        if 1 + full_tree_size(tree.branching_factor, depth) > tree.node_cap:
            msg = f"A depth-{depth} tree exceeds the node cap of {tree.node_cap}"
            raise ResourceError(
                msg,
                resource="nodes",
                limit=tree.node_cap,
                error_code=ErrorCode.NODE_CAP_EXCEEDED,
            )

        evaluations = 0
        frontier = [0]
        branch_values = tree.immediate_rewards(0)
        for level in range(1, depth + 1):
            frontier = [child for node_id in frontier for child in tree.expand(node_id)]
            for leaf in frontier:
                tree.exact_bounds(leaf)
            evaluations += len(frontier)
            branch_values = backup(tree, LeafValueSource.EXACT_LOWER)

            ordered = np.sort(branch_values)[::-1]
            gap = ordered[0] - ordered[1] if ordered.size > 1 else math.inf
            if level < depth and gap > 2.0 * config.beta * config.gamma**level:
                logger.info("Flat oracle search stopped at depth %d (gap %.4g)", level, gap)
                break

    report = _report(config, tree, branch_values, evaluations, tree.expansions, [])
    report.wallclock_ms = tracker.elapsed_ms
    return report


def flat_stochastic_search(problem: PlanningProblem, config: SearchConfig) -> RunReport:
    """Expand fully to ``k = ceil(log_gamma(epsilon / 2 beta))`` and average
    ``m`` lower samples per leaf, ``m = ceil(2 k ln(phi))`` by default.

    Raises:
        ResourceError: If ``m * phi**k`` exceeds the budget
    """
    config = config.resolve(problem)
    assert config.gamma is not None and config.beta is not None
    phi = problem.branching_factor
    k = config.depth if config.depth is not None else stochastic_depth(
        config.gamma, config.epsilon, config.beta
    )
    m = config.m if config.m is not None else stochastic_samples(k, phi)
    depth = max(k, 1)
    _check_budget(required_flat_evaluations(Algorithm.FLAT_STOCHASTIC, phi, depth, m), config)

    streams = StreamFactory(config.seed)
    with PerformanceTracker("flat_stochastic_search") as tracker:
        tree = build_full_tree(problem.root, depth, problem.model, node_cap=config.node_cap)
        leaves = tree.leaves()
        policies = {leaf: tree.pinned_policy(leaf) for leaf in leaves}

        def draw(task: tuple[int, int]) -> float:
            leaf, j = task
            rng = streams.stream(leaf, j, Purpose.LOWER)
            return sample_lower(tree.nodes[leaf].hyper, policies[leaf], rng, problem.model)

        tasks = [(leaf, j) for leaf in leaves for j in range(m)]
        with _Sampler(config.workers) as sampler:
            samples = sampler.map(draw, tasks)
        for (leaf, _), value in zip(tasks, samples, strict=True):
            tree.nodes[leaf].lower.add(value)
        branch_values = backup(tree, LeafValueSource.LOWER)

    logger.debug("Flat stochastic search: depth %d, m=%d, %d leaves", depth, m, len(leaves))
    report = _report(config, tree, branch_values, len(tasks), tree.expansions, [])
    report.wallclock_ms = tracker.elapsed_ms
    return report


def final_reserve(config: SearchConfig, leaves: int) -> int:
    """Evaluations set aside for the final choice over ``leaves`` frontier leaves."""
    return config.m_final * leaves


def final_samples(config: SearchConfig, evaluations: int, leaves: int) -> int:
    """Lower samples per leaf the rest of the budget pays for, at most ``m_final``."""
    if leaves == 0:
        return 0
    return max(0, min(config.m_final, (config.budget - evaluations) // leaves))


def _search_step_fits(
    config: SearchConfig, evaluations: int, cost: int, leaves_after: int, expansions: int
) -> bool:
    """Whether one more sample-and-expand step stays inside the budget.

    The first step only has to fit by itself; later steps must also leave
    ``m_final`` lower samples for every leaf of the tree they produce.
    """
    reserve = 0 if expansions == 0 else final_reserve(config, leaves_after)
    return evaluations + cost + reserve <= config.budget


def _final_choice(
    tree: Tree,
    problem: PlanningProblem,
    config: SearchConfig,
    streams: StreamFactory,
    sampler: _Sampler,
    evaluations: int,
) -> tuple[np.ndarray, int]:
    """Back up the lower samples the remaining budget allows at every frontier leaf.

    Each leaf gets ``min(m_final, remaining // leaves)`` samples. When not even
    one sample per leaf is left, the branches are ranked by backed-up mean
    upper samples instead, padding unsampled leaves with ``1 / (1 - gamma)``.

    Returns:
        Branch values and the number of lower samples drawn
    """
    leaves = tree.leaves()
    m = final_samples(config, evaluations, len(leaves))
    if m == 0:
        logger.warning(
            "No budget left for lower samples at %d leaves; ranking branches by upper means",
            len(leaves),
        )
        _, upper = backed_up_bounds(tree)
        if tree.root.is_leaf:
            return tree.immediate_rewards(0), 0
        return tree.action_values(0, upper), 0
    if m < config.m_final:
        logger.info("Final choice uses %d of %d lower samples per leaf", m, config.m_final)
    policies = {leaf: tree.pinned_policy(leaf) for leaf in leaves}

    def draw(task: tuple[int, int]) -> float:
        leaf, j = task
        rng = streams.stream(leaf, j, Purpose.LOWER)
        return sample_lower(tree.nodes[leaf].hyper, policies[leaf], rng, problem.model)

    tasks = [(leaf, j) for leaf in leaves for j in range(m)]
    for (leaf, _), value in zip(tasks, sampler.map(draw, tasks), strict=True):
        tree.nodes[leaf].lower.add(value)
    return backup(tree, LeafValueSource.LOWER), len(tasks)


def _upper_draw(
    tree: Tree, problem: PlanningProblem, streams: StreamFactory
) -> Callable[[int], float]:
    """Next upper sample of a node; draw ``j`` of node ``n`` uses stream ``(n, j, BOUND)``."""

    def draw(node_id: int) -> float:
        node = tree.nodes[node_id]
        rng = streams.stream(node_id, node.upper.count, Purpose.BOUND)
        return sample_upper(node.hyper, rng, problem.model)

    return draw


def sbb1_search(problem: PlanningProblem, config: SearchConfig) -> RunReport:
    """Stochastic branch and bound with per-iteration resampling of every leaf.

    Each iteration adds one upper sample at every leaf and expands the leaf
    with the largest mean upper sample (lowest id on ties). A pass is only
    started when it fits the budget together with the final lower samples,
    so ``leaf_evaluations`` never exceeds ``budget``.
    """
    config = config.resolve(problem)
    streams = StreamFactory(config.seed)
    audit: list[AuditRecord] = []

    with PerformanceTracker("sbb1_search") as tracker, _Sampler(config.workers) as sampler:
        tree = Tree(problem.root, problem.model, node_cap=config.node_cap)
        tree.expand(0)
        phi = tree.branching_factor
        draw = _upper_draw(tree, problem, streams)

        evaluations = 0
        expansions = 0
        iteration = 0
        while True:
            leaves = tree.leaves()
            if not _search_step_fits(
                config, evaluations, len(leaves), len(leaves) + phi - 1, expansions
            ):
                logger.info("SBB1 budget reached after %d iterations", iteration)
                break
            iteration += 1
            for leaf, value in zip(leaves, sampler.map(draw, leaves), strict=True):
                tree.nodes[leaf].upper.add(value)
                if config.audit:
                    audit.append(AuditRecord(iteration, leaf, value))
            evaluations += len(leaves)

            means = np.array([tree.nodes[leaf].upper.mean for leaf in leaves])
            target = leaves[argmax_lowest(means, tol=0.0)]
            try:
                tree.expand(target)
            except ResourceError as exc:
                logger.warning("SBB1 stopped expanding: %s", exc)
                break
            expansions += 1
            if config.audit:
                audit.append(AuditRecord(iteration, target, float(means.max()), expanded=target))

        logger.debug("SBB1: %d iterations, %d leaves", iteration, len(tree.leaves()))
        branch_values, final_draws = _final_choice(
            tree, problem, config, streams, sampler, evaluations
        )

    report = _report(config, tree, branch_values, evaluations + final_draws, expansions, audit)
    report.wallclock_ms = tracker.elapsed_ms
    return report


def window_bounds(depth: int) -> tuple[int, int]:
    """Depths ``[ceil(k / 2), k]`` whose samples feed a depth-``k`` leaf."""
    return (depth + 1) // 2, depth


def window_estimate(tree: Tree, node_id: int) -> tuple[float, tuple[int, ...]]:
    """Mean of the upper samples stored on the node's path inside its window.

    Returns:
        The estimate and the depth of every sample that went into it
    """
    low, _ = window_bounds(tree.nodes[node_id].depth)
    total = 0.0
    depths: list[int] = []
    current: int | None = node_id
    while current is not None and tree.nodes[current].depth >= low:
        node = tree.nodes[current]
        total += node.upper.total
        depths.extend([node.depth] * node.upper.count)
        current = node.parent
    if not depths:
        return float("nan"), ()
    return total / len(depths), tuple(depths)


def sbb2_search(problem: PlanningProblem, config: SearchConfig) -> RunReport:
    """Stochastic branch and bound that reuses upper samples along each path.

    Each iteration backs up the window estimates, descends from the root by
    the best backed-up action while sampling children from the predictive,
    draws a fresh upper sample at the leaf reached, then expands it and draws
    one upper sample at every new child. An iteration is only started when
    its ``1 + phi`` samples fit the budget together with the final lower
    samples, so ``leaf_evaluations`` never exceeds ``budget``.
    """
    config = config.resolve(problem)
    streams = StreamFactory(config.seed)
    audit: list[AuditRecord] = []

    with PerformanceTracker("sbb2_search") as tracker, _Sampler(config.workers) as sampler:
        tree = Tree(problem.root, problem.model, node_cap=config.node_cap)
        phi = tree.branching_factor
        capacity = min(tree.node_cap, 1 + phi * (config.budget + 1))
        values = np.zeros(capacity)
        draw = _upper_draw(tree, problem, streams)

        def sample_children(parent: int, iteration: int) -> None:
            first = tree.nodes[parent].first_child or 0
            children = list(range(first, first + phi))
            for child, value in zip(children, sampler.map(draw, children), strict=True):
                tree.nodes[child].upper.add(value)
            for child in children:
                estimate, depths = window_estimate(tree, child)
                values[child] = estimate
                if config.audit:
                    audit.append(
                        AuditRecord(
                            iteration,
                            child,
                            estimate,
                            window=window_bounds(tree.nodes[child].depth),
                            sample_depths=depths,
                        )
                    )
            values[parent] = tree.action_values(parent, values).max()
            tree.refresh_ancestors(parent, values)

        tree.expand(0)
        evaluations = 0
        if phi <= config.budget:
            sample_children(0, 0)
            evaluations = phi
        expansions = 0
        iteration = 0
        while True:
            leaves = len(tree.leaves())
            if not _search_step_fits(config, evaluations, 1 + phi, leaves + phi - 1, expansions):
                logger.info("SBB2 budget reached after %d iterations", iteration)
                break
            iteration += 1
            rng = streams.stream(Purpose.DESCENT, iteration)
            node_id = 0
            while not tree.nodes[node_id].is_leaf:
                action = tree.best_action(node_id, values)
                probabilities = tree.nodes[node_id].child_probabilities
                assert probabilities is not None
                weights = probabilities[action] / probabilities[action].sum()
                choice = int(rng.choice(weights.size, p=weights))
                node_id = tree.children(node_id, action)[choice]

            value = draw(node_id)
            tree.nodes[node_id].upper.add(value)
            evaluations += 1
            if config.audit:
                audit.append(AuditRecord(iteration, node_id, value))
            try:
                tree.expand(node_id)
            except ResourceError as exc:
                logger.warning("SBB2 stopped expanding: %s", exc)
                break
            expansions += 1
            if config.audit:
                audit.append(AuditRecord(iteration, node_id, value, expanded=node_id))
            sample_children(node_id, iteration)
            evaluations += phi

        logger.debug("SBB2: %d iterations, %d nodes", iteration, len(tree))
        branch_values, final_draws = _final_choice(
            tree, problem, config, streams, sampler, evaluations
        )

    report = _report(config, tree, branch_values, evaluations + final_draws, expansions, audit)
    report.wallclock_ms = tracker.elapsed_ms
    return report


PLANNERS: dict[Algorithm, Callable[[PlanningProblem, SearchConfig], RunReport]] = {
    Algorithm.FLAT_ORACLE: flat_oracle_search,
    Algorithm.FLAT_STOCHASTIC: flat_stochastic_search,
    Algorithm.SBB1: sbb1_search,
    Algorithm.SBB2: sbb2_search,
}


def run_search(problem: PlanningProblem, config: SearchConfig) -> RunReport:
    """Dispatch to the planner named by ``config.algorithm``."""
    logger.debug(
        "Running %s on %s (budget=%d, seed=%d)",
        config.algorithm.value,
        problem.name,
        config.budget,
        config.seed,
    )
    return PLANNERS[config.algorithm](problem, config)


def backed_up_bounds(tree: Tree) -> tuple[np.ndarray, np.ndarray]:
    """Node values backed up from the mean lower and mean upper samples.

    Leaves without samples of a kind use the trivial bracket for that side.
    """

    def side(source: LeafValueSource, pad: float) -> Callable[[int], float]:
        def value(node_id: int) -> float:
            node = tree.nodes[node_id]
            estimate = node.lower if source is LeafValueSource.LOWER else node.upper
            return estimate.mean if estimate.count else pad

        return value

    lower, _ = backup_values(tree, side(LeafValueSource.LOWER, 0.0))
    upper, _ = backup_values(tree, side(LeafValueSource.UPPER, 1.0 / (1.0 - tree.discount)))
    return lower, upper
