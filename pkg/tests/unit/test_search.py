"""Tests for the four planners and their closed-form parameters."""

import numpy as np
import pytest

from beliefsearch.core.mdp import argmax_lowest
from beliefsearch.exceptions import CapabilityError, DomainError, ResourceError, ValidationError
from beliefsearch.harness.problems import two_branch_problem
from beliefsearch.planning.models import Algorithm, SearchConfig
from beliefsearch.planning.search import (
    backed_up_bounds,
    oracle_depth,
    required_flat_evaluations,
    run_search,
    stochastic_depth,
    stochastic_samples,
    window_bounds,
    window_estimate,
)
from tests.test_utils import bandit_mdp, mixture_problem


class TestClosedForms:
    """Depths, sample counts and budgets of the flat planners."""

    def test_depths(self):
        assert oracle_depth(0.5, 0.5, 2.0) == 2
        assert stochastic_depth(0.5, 0.5, 2.0) == 3
        assert oracle_depth(0.5, 3.0, 2.0) == 0

    def test_samples_per_leaf(self):
        assert stochastic_samples(3, 4) == 9
        assert stochastic_samples(0, 4) == 1

    def test_required_evaluations(self):
        assert required_flat_evaluations(Algorithm.FLAT_ORACLE, 4, 2) == 20
        assert required_flat_evaluations(Algorithm.FLAT_STOCHASTIC, 4, 3, m=9) == 576
        # Depth zero still searches one level
        assert required_flat_evaluations(Algorithm.FLAT_ORACLE, 4, 0) == 4

    def test_branch_and_bound_has_no_closed_form(self):
        with pytest.raises(CapabilityError):
            required_flat_evaluations(Algorithm.SBB1, 4, 2)

    def test_window_bounds(self):
        assert window_bounds(1) == (1, 1)
        assert window_bounds(4) == (2, 4)
        assert window_bounds(5) == (3, 5)


class TestSearchConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [{"budget": 0}, {"epsilon": 0.0}, {"workers": 0}, {"m_final": 0}, {"m": 0}, {"seed": -1}],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValidationError):
            SearchConfig(**kwargs)

    def test_algorithm_names_are_normalized(self):
        assert SearchConfig(algorithm="Flat-Oracle").algorithm is Algorithm.FLAT_ORACLE
        with pytest.raises(ValidationError):
            Algorithm.parse("uct")

    def test_resolve_fills_gamma_and_beta(self, bandit_problem):
        resolved = SearchConfig().resolve(bandit_problem)
        assert resolved.gamma == 0.5
        assert resolved.beta == pytest.approx(2.0)

    def test_resolve_rejects_mismatched_gamma(self, bandit_problem):
        with pytest.raises(ValidationError):
            SearchConfig(gamma=0.9).resolve(bandit_problem)

    def test_resolve_rejects_small_beta(self, bandit_problem):
        with pytest.raises(ValidationError):
            SearchConfig(beta=1.5).resolve(bandit_problem)

    def test_zero_discount_is_a_domain_error(self):
        problem = mixture_problem([bandit_mdp(0.2, 0.8, gamma=0.0)], [1.0])
        with pytest.raises(DomainError):
            run_search(problem, SearchConfig())


class TestFlatPlanners:
    def test_oracle_needs_finite_support(self, bandit_problem):
        config = SearchConfig(algorithm=Algorithm.FLAT_ORACLE, budget=100)
        with pytest.raises(CapabilityError):
            run_search(bandit_problem, config)

    def test_oracle_picks_the_better_arm(self, known_bandit_problem):
        config = SearchConfig(algorithm=Algorithm.FLAT_ORACLE, budget=20)
        report = run_search(known_bandit_problem, config)
        assert report.chosen_action == 1
        assert report.leaf_evaluations == 20
        assert report.max_depth_reached == 2
        assert report.branch_values == pytest.approx((1.0, 1.6))

    def test_oracle_budget_is_checked_up_front(self, known_bandit_problem):
        config = SearchConfig(algorithm=Algorithm.FLAT_ORACLE, budget=19)
        with pytest.raises(ResourceError) as exc_info:
            run_search(known_bandit_problem, config)
        assert exc_info.value.details["required"] == 20

    def test_stochastic_budget(self, bandit_problem):
        config = SearchConfig(algorithm=Algorithm.FLAT_STOCHASTIC, budget=575)
        with pytest.raises(ResourceError):
            run_search(bandit_problem, config)

    def test_stochastic_overrides(self, known_bandit_problem):
        config = SearchConfig(algorithm=Algorithm.FLAT_STOCHASTIC, budget=8, depth=1, m=2)
        report = run_search(known_bandit_problem, config)
        assert report.leaf_evaluations == 8
        assert report.chosen_action == 1

    def test_stochastic_is_worker_invariant(self, bandit_problem):
        base = {"algorithm": Algorithm.FLAT_STOCHASTIC, "budget": 600, "seed": 4}
        serial = run_search(bandit_problem, SearchConfig(**base))
        pooled = run_search(bandit_problem, SearchConfig(**base, workers=3))
        assert serial.branch_values == pooled.branch_values
        assert serial.leaf_evaluations == 576


class TestBranchAndBound:
    @pytest.mark.parametrize("algorithm", [Algorithm.SBB1, Algorithm.SBB2])
    def test_known_bandit(self, known_bandit_problem, algorithm):
        config = SearchConfig(algorithm=algorithm, budget=60, m_final=2)
        report = run_search(known_bandit_problem, config)
        assert report.chosen_action == 1
        assert report.leaf_evaluations <= 60
        assert report.node_expansions >= 1
        assert len(report.branch_depths) == 2

    @pytest.mark.parametrize("algorithm", [Algorithm.SBB1, Algorithm.SBB2])
    def test_two_branch_problem(self, algorithm):
        config = SearchConfig(algorithm=algorithm, budget=200, m_final=4, seed=1)
        report = run_search(two_branch_problem(), config)
        assert report.chosen_action == 0

    @pytest.mark.parametrize("algorithm", [Algorithm.SBB1, Algorithm.SBB2])
    def test_same_seed_same_run(self, bandit_problem, algorithm):
        config = SearchConfig(algorithm=algorithm, budget=80, m_final=3, seed=7)
        first = run_search(bandit_problem, config)
        second = run_search(bandit_problem, config)
        assert first.branch_values == second.branch_values
        assert first.node_expansions == second.node_expansions
        assert len(first.tree) == len(second.tree)

    @pytest.mark.parametrize("algorithm", [Algorithm.SBB1, Algorithm.SBB2])
    def test_workers_do_not_change_results(self, bandit_problem, algorithm):
        base = {"algorithm": algorithm, "budget": 80, "m_final": 3, "seed": 7}
        serial = run_search(bandit_problem, SearchConfig(**base))
        pooled = run_search(bandit_problem, SearchConfig(**base, workers=4))
        assert serial.branch_values == pooled.branch_values
        assert serial.branch_depths == pooled.branch_depths

    def test_sbb1_audit_log(self, bandit_problem):
        config = SearchConfig(algorithm=Algorithm.SBB1, budget=40, m_final=1, audit=True)
        report = run_search(bandit_problem, config)
        expanded = [record for record in report.audit if record.expanded is not None]
        assert len(expanded) == report.node_expansions
        assert report.audit[0].to_line().startswith("1\t")

    def test_sbb2_audit_records_windows(self, bandit_problem):
        config = SearchConfig(algorithm=Algorithm.SBB2, budget=40, m_final=1, audit=True)
        report = run_search(bandit_problem, config)
        windows = [record for record in report.audit if record.window is not None]
        assert windows
        for record in windows:
            low, high = record.window
            assert all(low <= depth <= high for depth in record.sample_depths)

    def test_sbb2_window_estimate_averages_the_path(self, bandit_problem):
        config = SearchConfig(algorithm=Algorithm.SBB2, budget=40, m_final=1)
        tree = run_search(bandit_problem, config).tree
        deepest = max(range(len(tree)), key=lambda node_id: tree.nodes[node_id].depth)
        estimate, depths = window_estimate(tree, deepest)
        low, high = window_bounds(tree.nodes[deepest].depth)
        assert depths
        assert min(depths) >= low
        assert max(depths) == high
        assert 0.0 <= estimate <= 2.0

    def test_node_cap_stops_expansion(self, bandit_problem):
        config = SearchConfig(algorithm=Algorithm.SBB1, budget=500, m_final=1, node_cap=9)
        report = run_search(bandit_problem, config)
        assert len(report.tree) <= 9
        assert report.chosen_action in (0, 1)

    def test_backed_up_bounds_cover_every_node(self, bandit_problem):
        config = SearchConfig(algorithm=Algorithm.SBB1, budget=60, m_final=2)
        tree = run_search(bandit_problem, config).tree
        lower, upper = backed_up_bounds(tree)
        assert lower.shape == upper.shape == (len(tree),)
        assert np.all(np.isfinite(lower))
        assert np.all((upper >= 0.0) & (upper <= 2.0))


class TestBudgetAccounting:
    """Branch-and-bound planners keep every leaf evaluation inside the budget."""

    @pytest.mark.parametrize("algorithm", [Algorithm.SBB1, Algorithm.SBB2])
    @pytest.mark.parametrize("budget", [1, 4, 9, 40, 100, 1_000])
    def test_evaluations_never_exceed_budget(self, bandit_problem, algorithm, budget):
        config = SearchConfig(algorithm=algorithm, budget=budget, seed=1)
        report = run_search(bandit_problem, config)
        assert report.leaf_evaluations <= budget
        assert report.chosen_action in (0, 1)

    def test_final_samples_shrink_to_what_is_left(self, bandit_problem):
        config = SearchConfig(algorithm=Algorithm.SBB1, budget=100, seed=1)
        report = run_search(bandit_problem, config)
        # One pass over 4 leaves, then 13 lower samples at each of the 7 leaves
        assert report.node_expansions == 1
        assert report.leaf_evaluations == 4 + 7 * 13
        tree = report.tree
        assert [tree.nodes[leaf].lower.count for leaf in tree.leaves()] == [13] * 7

    @pytest.mark.parametrize("algorithm", [Algorithm.SBB1, Algorithm.SBB2])
    def test_full_final_samples_are_reserved(self, bandit_problem, algorithm):
        config = SearchConfig(algorithm=algorithm, budget=2_000, m_final=4, seed=3)
        report = run_search(bandit_problem, config)
        tree = report.tree
        assert report.node_expansions > 1
        assert all(tree.nodes[leaf].lower.count == 4 for leaf in tree.leaves())
        assert report.leaf_evaluations <= 2_000

    def test_no_lower_samples_left_falls_back_to_upper_means(self, bandit_problem):
        config = SearchConfig(algorithm=Algorithm.SBB2, budget=9, seed=1)
        report = run_search(bandit_problem, config)
        assert report.leaf_evaluations == 9
        assert all(node.lower.count == 0 for node in report.tree.nodes)
        _, upper = backed_up_bounds(report.tree)
        expected = report.tree.action_values(0, upper)
        assert report.branch_values == pytest.approx(tuple(expected))


class TestExpansionOrder:
    """Which leaf each planner expands, replayed from the audit log."""

    def test_sbb1_one_expansion_at_branching_factor_budget(self, bandit_problem):
        phi = bandit_problem.branching_factor
        config = SearchConfig(algorithm=Algorithm.SBB1, budget=phi, seed=5, audit=True)
        report = run_search(bandit_problem, config)
        assert report.node_expansions == 1
        assert report.leaf_evaluations == phi
        samples = {r.node_id: r.value for r in report.audit if r.expanded is None}
        assert sorted(samples) == [1, 2, 3, 4]
        best = min(samples, key=lambda node_id: (-samples[node_id], node_id))
        expanded = [r.expanded for r in report.audit if r.expanded is not None]
        assert expanded == [best]

    def test_sbb1_expands_the_best_mean_leaf(self, bandit_problem):
        config = SearchConfig(algorithm=Algorithm.SBB1, budget=200, m_final=1, seed=2, audit=True)
        report = run_search(bandit_problem, config)
        totals: dict[int, float] = {}
        counts: dict[int, int] = {}
        sampled: list[int] = []
        checked = 0
        for record in report.audit:
            if record.expanded is None:
                totals[record.node_id] = totals.get(record.node_id, 0.0) + record.value
                counts[record.node_id] = counts.get(record.node_id, 0) + 1
                sampled.append(record.node_id)
                continue
            means = np.array([totals[leaf] / counts[leaf] for leaf in sampled])
            assert record.expanded == sampled[argmax_lowest(means, tol=0.0)]
            sampled = []
            checked += 1
        assert checked == report.node_expansions > 1

    def test_sbb2_first_expansion_follows_the_depth_one_samples(self, bandit_problem):
        phi = bandit_problem.branching_factor
        sbb1 = run_search(
            bandit_problem,
            SearchConfig(algorithm=Algorithm.SBB1, budget=phi, seed=6, audit=True),
        )
        sbb2 = run_search(
            bandit_problem,
            SearchConfig(algorithm=Algorithm.SBB2, budget=2 * phi + 1, seed=6, audit=True),
        )
        assert sbb2.node_expansions == 1
        first = {r.node_id: r.value for r in sbb1.audit if r.expanded is None}
        windows = {r.node_id: r.value for r in sbb2.audit if r.iteration == 0}
        assert windows == first

        tree = sbb2.tree
        values = np.zeros(len(tree))
        for node_id, value in windows.items():
            values[node_id] = value
        (sbb1_expanded,) = [r.expanded for r in sbb1.audit if r.expanded is not None]
        assert sbb1.tree.nodes[sbb1_expanded].depth == 1
        (expanded,) = [r.expanded for r in sbb2.audit if r.expanded is not None]
        assert tree.nodes[expanded].depth == 1
        assert tree.nodes[expanded].action_in == argmax_lowest(tree.action_values(0, values))
