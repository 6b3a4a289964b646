"""Tests for the simulation checks behind ``beliefsearch verify``."""

import csv

import numpy as np
import pytest

from beliefsearch.core.mdp import random_mdp, reward_distance, transition_distance
from beliefsearch.exceptions import ValidationError
from beliefsearch.harness.verification import (
    CSV_HEADER,
    Check,
    VerificationRow,
    VerificationSummary,
    branch_depths,
    perturbed_mdp,
    simulate_stopping_times,
    verify,
)
from beliefsearch.planning.models import Algorithm


class TestRows:
    def test_check_names(self):
        assert Check.parse("leaf_samples") is Check.LEAF_SAMPLES
        assert Check.parse(" SBB2-Depth ") is Check.SBB2_DEPTH
        assert Check.parse("L4") is Check.SBB1_DEPTH
        assert Check.parse("l7") is Check.VALUE_PERTURBATION
        with pytest.raises(ValidationError):
            Check.parse("tail-7")

    def test_exact_row(self):
        row = VerificationRow.exact(Check.HOEFFDING, "square-sum", 3, 0.5, 1.0)
        assert row.dominated
        assert (row.ci_low, row.ci_high) == (0.5, 0.5)
        assert not VerificationRow.exact(Check.HOEFFDING, "square-sum", 3, 1.5, 1.0).dominated

    def test_proportion_row_uses_the_lower_interval_end(self):
        # 12 hits in 100 trials is above 0.1, but not significantly so
        row = VerificationRow.proportion(Check.SBB1_DEPTH, "k0=2", 3, 12, 100, 0.1, 0.99)
        assert row.empirical == pytest.approx(0.12)
        assert row.ci_low < 0.1 < row.ci_high
        assert row.dominated
        far = VerificationRow.proportion(Check.SBB1_DEPTH, "k0=2", 3, 60, 100, 0.1, 0.99)
        assert not far.dominated

    def test_summary_ignores_report_only_rows(self):
        summary = VerificationSummary(Check.DIRICHLET_SMOOTHNESS, 100, 0, 0.99)
        summary.rows.append(
            VerificationRow.exact(Check.DIRICHLET_SMOOTHNESS, "half-step", 1, 2.0, 1.0, False)
        )
        assert summary.passed
        summary.rows.append(
            VerificationRow.exact(Check.DIRICHLET_SMOOTHNESS, "tight", 1, 2.0, 1.0)
        )
        assert not summary.passed
        assert len(summary.failures) == 1

    def test_csv_layout(self):
        summary = VerificationSummary(Check.HOEFFDING, 100, 0, 0.99)
        summary.rows.append(VerificationRow.exact(Check.HOEFFDING, "square-sum", 2, 0.5, 1.0))
        lines = summary.to_csv().splitlines()
        assert lines[0].split(",") == list(CSV_HEADER)
        assert lines[1].split(",")[-2:] == ["true", "true"]


class TestSimulators:
    def test_stopping_times(self):
        rng = np.random.default_rng(0)
        # With delta above beta / 2 the first draw always stops
        assert np.all(simulate_stopping_times(1.0, 0.6, 50, rng, 10) == 1)
        times = simulate_stopping_times(1.0, 0.05, 500, rng, 4)
        assert times.min() >= 1
        assert times.max() <= 5

    def test_two_point_stopping_times(self):
        rng = np.random.default_rng(2)
        # Threshold 0: a Bernoulli run stops at its first success
        times = simulate_stopping_times(1.0, 0.5, 4_000, rng, 64, law="bernoulli")
        assert times.min() == 1
        assert times.mean() == pytest.approx(2.0, abs=0.15)
        with pytest.raises(ValidationError):
            simulate_stopping_times(1.0, 0.5, 10, rng, 4, law="cauchy")

    def test_perturbed_mdp_stays_within_epsilon(self):
        rng = np.random.default_rng(3)
        mdp = random_mdp(3, 2, 0.9, rng)
        nearby = perturbed_mdp(mdp, 0.1, rng)
        assert transition_distance(mdp, nearby) <= 0.1 + 1e-12
        assert reward_distance(mdp, nearby) <= 0.1 + 1e-12

    def test_branch_depths(self):
        depths = branch_depths(Algorithm.SBB1, trials=3, seed=0, workers=2)
        assert depths.shape == (3,)
        assert np.all(depths >= 1)


class TestVerify:
    def test_trial_floor(self):
        with pytest.raises(ValidationError) as exc_info:
            verify(Check.HOEFFDING, 99)
        assert exc_info.value.field == "trials"

    def test_workers_floor(self):
        with pytest.raises(ValidationError):
            verify(Check.HOEFFDING, 100, workers=0)

    def test_dirichlet_smoothness(self):
        summary = verify("dirichlet-smoothness", 100)
        assert summary.passed
        tight = [row for row in summary.rows if row.parameter == "tight"]
        assert max(row.empirical for row in tight) == pytest.approx(1.0)
        # Skewed rows move further than the half-step bound allows
        half_step = [row for row in summary.rows if row.parameter == "half-step"]
        assert any(row.empirical > 1.0 for row in half_step)
        assert not any(row.required for row in half_step)

    def test_value_perturbation(self):
        summary = verify(Check.VALUE_PERTURBATION, 100, seed=2)
        assert summary.passed
        assert len(summary.rows) == 4
        assert all(0.0 < row.empirical <= row.bound for row in summary.rows)

    def test_hoeffding(self):
        summary = verify(Check.HOEFFDING, 200, seed=1)
        assert summary.passed
        uniform = next(row for row in summary.rows if row.parameter == "uniform-weights")
        assert uniform.empirical <= 1e-12

    def test_leaf_sample_means_are_dominated(self):
        summary = verify(Check.LEAF_SAMPLES, 500)
        means = [row for row in summary.rows if row.parameter.endswith(":mean")]
        assert len(means) == 4
        assert all(row.dominated for row in means)
        assert all(row.empirical >= 1.0 for row in means)

    def test_leaf_samples_cover_both_laws(self):
        summary = verify(Check.LEAF_SAMPLES, 500, seed=3)
        assert summary.passed, summary.failures
        laws = {row.parameter.split(":")[0] for row in summary.rows}
        assert laws == {"uniform", "bernoulli"}
        required = [row for row in summary.rows if row.required]
        assert not any(row.parameter.endswith(":n-squared") for row in required)

    def test_two_point_draws_exceed_the_quadratic_tail(self):
        # With delta = beta / 2, N is geometric: Pr[N > 2] = 1/4 > exp(-2)
        summary = verify(Check.LEAF_SAMPLES, 2_000, seed=1)
        row = next(
            row
            for row in summary.rows
            if row.parameter == "bernoulli:delta=0.5:n-squared" and row.point == 2
        )
        assert row.empirical == pytest.approx(0.25, abs=0.05)
        assert not row.dominated
        assert not row.required
        assert summary.passed

    def test_same_seed_same_rows(self):
        first = verify(Check.DIRICHLET_SMOOTHNESS, 100, seed=5)
        second = verify(Check.DIRICHLET_SMOOTHNESS, 100, seed=5)
        assert first.rows == second.rows

    def test_writes_csv(self, tmp_path):
        out = tmp_path / "results" / "hoeffding.csv"
        summary = verify(Check.HOEFFDING, 100, out)
        assert summary.out_path == out
        with out.open(encoding="utf-8", newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert len(rows) == len(summary.rows)
        assert {row["check"] for row in rows} == {"hoeffding"}
