#!/usr/bin/env python3
"""
Unit tests for loading and validating the laboratory configuration.
"""

import os
import sys
import unittest
from fractions import Fraction
from pathlib import Path
from unittest.mock import patch

# Add the project root to the Python path
project_root = Path(__file__).parent.parent.parent.parent.parent
sys.path.insert(0, str(project_root))

from shortness_lab.settings import SEED_ENV, LabSettings, load_settings, parse_fraction


class TestParseFraction(unittest.TestCase):
    """Rational thresholds written as p/q."""

    def test_valid_forms(self):
        """Test fractions, integers and surrounding whitespace."""
        self.assertEqual(parse_fraction("3/2"), Fraction(3, 2))
        self.assertEqual(parse_fraction("2"), Fraction(2))
        self.assertEqual(parse_fraction(" 5/4 "), Fraction(5, 4))
        self.assertEqual(parse_fraction("6/4"), Fraction(3, 2))

    def test_invalid_forms(self):
        """Test that malformed, zero-denominator and non-positive values are rejected."""
        for text in ("abc", "3/0", "-1/2", "0", "1/-2", "3/2/1"):
            with self.assertRaises(ValueError, msg=text):
                parse_fraction(text)


class TestLabSettings(unittest.TestCase):
    """Configuration files and their validation."""

    def setUp(self):
        """Set up test fixtures."""
        self.fixtures_dir = Path(__file__).parent.parent / "fixtures"

    def load(self, name: str) -> LabSettings:
        return load_settings(str(self.fixtures_dir / name), required=True)

    def test_load_valid_config(self):
        """Test that every table of a full config is applied."""
        settings = self.load("config_quick.toml")

        self.assertEqual(settings.budget.nodes, 1000000)
        self.assertEqual(settings.budget.seconds, 120.0)
        self.assertEqual(settings.max_vertices, 5000)
        self.assertEqual(settings.threads, 1)
        self.assertEqual(settings.config_seed, 7)
        self.assertEqual(settings.gluelab.t, Fraction(3, 2))
        self.assertEqual(settings.gluelab.size_cap, 6)
        self.assertEqual(settings.gluelab.instances, 4)
        self.assertEqual(settings.gluelab.cuts_per_instance, 5)
        self.assertEqual(settings.report.table, 'csv')
        self.assertEqual(settings.report.n_max, 1)

    def test_empty_config_uses_defaults(self):
        """Test the defaults of an empty file."""
        settings = self.load("config_empty.toml")

        self.assertEqual(settings.report.table, 'md')
        self.assertEqual(settings.report.n_max, 3)
        self.assertEqual(settings.gluelab.size_cap, 12)
        self.assertIsNone(settings.config_seed)

    def test_invalid_values(self):
        """Test the validation message of each invalid fixture."""
        cases = {
            "config_invalid_table.toml": "Unsupported table format",
            "config_invalid_size_cap.toml": "Invalid size_cap",
            "config_invalid_budget.toml": "Invalid budget nodes",
            "config_invalid_rational.toml": "denominator must be positive",
            "config_malformed.toml": "Invalid TOML configuration",
        }
        for name, message in cases.items():
            with self.assertRaises(ValueError, msg=name) as context:
                self.load(name)
            self.assertIn(message, str(context.exception))

    def test_missing_file(self):
        """Test optional and required configuration files."""
        missing = str(self.fixtures_dir / "does_not_exist.toml")

        settings = load_settings(missing)
        self.assertEqual(settings.report.table, 'md')

        with self.assertRaises(FileNotFoundError) as context:
            load_settings(missing, required=True)
        self.assertIn("Configuration file not found", str(context.exception))

    def test_seed_precedence(self):
        """Test --seed over the environment over the config file."""
        settings = self.load("config_quick.toml")

        with patch.dict(os.environ, {SEED_ENV: "11"}):
            self.assertEqual(settings.resolve_seed(3), 3)
            self.assertEqual(settings.resolve_seed(), 11)
        with patch.dict(os.environ, {}, clear=True):
            self.assertEqual(settings.resolve_seed(), 7)
            self.assertEqual(self.load("config_empty.toml").resolve_seed(), 0)

    def test_invalid_seed_environment(self):
        """Test that a non-integer seed variable is rejected."""
        with patch.dict(os.environ, {SEED_ENV: "seven"}):
            with self.assertRaises(ValueError):
                self.load("config_quick.toml").resolve_seed()

    def test_search_budget_overrides(self):
        """Test that command-line limits replace the configured ones."""
        settings = self.load("config_quick.toml")

        budget = settings.search_budget(nodes=50, seed=4)

        self.assertEqual(budget.nodes, 50)
        self.assertEqual(budget.seconds, 120.0)
        self.assertEqual(budget.seed, 4)


if __name__ == '__main__':
    unittest.main()
