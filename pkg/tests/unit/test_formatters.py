"""Tests for the output formatters."""

import json
import math
import unittest
from pathlib import Path

from colorama import Fore

from beliefsearch.formatters import FORMATTERS, JSONFormatter, RichFormatter, StandardFormatter
from beliefsearch.formatters.base_formatter import BaseFormatter
from beliefsearch.harness.verification import Check, VerificationRow, VerificationSummary
from beliefsearch.planning.models import Algorithm, RunReport
from beliefsearch.planning.tree import Branch


def make_report(**overrides):
    values = {
        "algorithm": Algorithm.SBB2,
        "seed": 4,
        "budget": 1200,
        "chosen_branch": Branch(1),
        "leaf_evaluations": 1184,
        "node_expansions": 37,
        "max_depth_reached": 5,
        "branch_values": (0.8125, 1.4375),
        "branch_depths": (3, 5),
        "wallclock_ms": 42.0,
        "run_id": "sbb2-b1200-s4",
    }
    values.update(overrides)
    return RunReport(**values)


def make_summary():
    summary = VerificationSummary(Check.DIRICHLET_SMOOTHNESS, 100, 0, 0.99)
    summary.rows.append(VerificationRow.exact(Check.DIRICHLET_SMOOTHNESS, "tight", 2, 0.5, 1.0))
    summary.rows.append(
        VerificationRow.exact(Check.DIRICHLET_SMOOTHNESS, "half-step", 2, 1.8, 1.0, False)
    )
    summary.out_path = Path("/home/user/experiments/results/dirichlet.csv")
    return summary


class TestBaseFormatter(unittest.TestCase):
    """Test cases for BaseFormatter."""

    def setUp(self):
        self.formatter = BaseFormatter()

    def test_format_value(self):
        self.assertEqual(self.formatter._format_value(None), "-")
        self.assertEqual(self.formatter._format_value(0.125), "0.125")
        self.assertEqual(self.formatter._format_value(1 / 3, 3), "0.333")

    def test_format_status(self):
        self.assertIn(Fore.GREEN, self.formatter._format_status(True))
        self.assertIn("FAIL", self.formatter._format_status(False))

    def test_format_branch_marks_choice(self):
        chosen = self.formatter._format_branch(1, 1.5, 4, True)
        self.assertIn(Fore.YELLOW, chosen)
        self.assertIn("depth 4", chosen)
        self.assertNotIn("depth", self.formatter._format_branch(0, 1.0, None, False))

    def test_abstract_methods(self):
        with self.assertRaises(NotImplementedError):
            self.formatter.format_report(make_report())
        with self.assertRaises(NotImplementedError):
            self.formatter.format_verification(make_summary())


class TestStandardFormatter(unittest.TestCase):
    """Test cases for StandardFormatter."""

    def setUp(self):
        self.formatter = StandardFormatter()

    def test_report(self):
        output = self.formatter.format_report(make_report())
        self.assertIn("sbb2-b1200-s4", output)
        self.assertIn("1,200", output)
        self.assertIn("Branches:", output)
        self.assertIn("action 1: 1.4375  depth 5", output)
        self.assertNotIn("Regret", output)

    def test_report_with_regret_and_error(self):
        output = self.formatter.format_report(
            make_report(regret=0.25, bracket_width=0.0, error="budget_exceeded: budget 10")
        )
        self.assertIn("Regret", output)
        self.assertIn("0.25", output)
        self.assertIn("budget_exceeded", output)

    def test_verification(self):
        output = self.formatter.format_verification(make_summary())
        self.assertIn("dirichlet-smoothness", output)
        self.assertIn("PASS", output)
        self.assertIn("info", output)
        self.assertIn("Wrote 2 rows to results/dirichlet.csv", output)
        self.assertNotIn("/home/user", output)


class TestJSONFormatter(unittest.TestCase):
    """Test cases for JSONFormatter."""

    def setUp(self):
        self.formatter = JSONFormatter()

    def test_report(self):
        data = json.loads(self.formatter.format_report(make_report()))
        self.assertEqual(data["algorithm"], "sbb2")
        self.assertEqual(data["chosen_action"], 1)
        self.assertNotIn("chosen_branch", data)
        self.assertNotIn("tree", data)
        self.assertEqual(data["branch_depths"], [3, 5])

    def test_non_finite_values_become_null(self):
        report = make_report(branch_values=(math.inf, 0.5), chosen_branch=None)
        data = json.loads(self.formatter.format_report(report))
        self.assertEqual(data["branch_values"], [None, 0.5])
        self.assertIsNone(data["chosen_action"])

    def test_verification(self):
        data = json.loads(self.formatter.format_verification(make_summary()))
        self.assertTrue(data["passed"])
        self.assertEqual(len(data["rows"]), 2)
        self.assertFalse(data["rows"][1]["required"])
        self.assertTrue(data["out_path"].endswith("dirichlet.csv"))


class TestRichFormatter(unittest.TestCase):
    """Test cases for RichFormatter."""

    def setUp(self):
        self.formatter = RichFormatter()

    def test_report(self):
        output = self.formatter.format_report(make_report(regret=0.0, bracket_width=0.5))
        self.assertIn("sbb2-b1200-s4", output)
        self.assertIn("Branches", output)
        self.assertIn("Bracket width", output)

    def test_verification(self):
        output = self.formatter.format_verification(make_summary())
        self.assertIn("PASS", output)
        self.assertIn("half-step", output)
        self.assertIn("100 trials", output)


def test_registry():
    assert set(FORMATTERS) == {"standard", "json", "rich"}
    assert FORMATTERS["rich"] is RichFormatter
