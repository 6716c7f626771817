#!/usr/bin/env python3
"""
Unit tests for the gluing and K4-replacement checkers and their harnesses.
"""

import json
import os
import sys
import unittest
from fractions import Fraction
from pathlib import Path

import networkx as nx

# Add the project root to the Python path
project_root = Path(__file__).parent.parent.parent.parent.parent
sys.path.insert(0, str(project_root))

from shortness_lab.analysis.gluelab import (
    HOLDS,
    NOT_APPLICABLE,
    GlueSpec,
    check_constr3_preservation,
    check_glue_preservation,
    cut_inequality_holds,
    find_weak_lemma_counterexample,
    glue,
    hexagon_glue_spec,
    min_bipartite_degree,
    random_glue_instance,
    run_constr3_harness,
    run_glue_harness,
    spec_from_payload,
    spec_to_payload,
)
from shortness_lab.analysis.oracle import SearchBudget, toughness_exact
from shortness_lab.errors import InvalidCrossEdge, NotFoundWithinBudget
from shortness_lab.graphs.blocks import build_T
from shortness_lab.graphs.generators import random_triangulation

SLOW = os.environ.get('SHORTNESS_LAB_SLOW') == '1'


class TestGlueSpec(unittest.TestCase):
    """Loading and validating gluing instances."""

    def setUp(self):
        """Set up test fixtures."""
        self.fixtures_dir = Path(__file__).parent.parent / "fixtures"

    def load(self, name: str) -> dict:
        return json.loads((self.fixtures_dir / name).read_text())

    def test_prism_fixture(self):
        """Test that two K4s glued by a matching give the triangular prism."""
        spec = spec_from_payload(self.load("prism_glue.json"))

        union = glue(spec)

        self.assertEqual(union.number_of_nodes(), 6)
        self.assertEqual(union.number_of_edges(), 9)
        self.assertTrue(nx.is_isomorphic(union, nx.circular_ladder_graph(3)))
        self.assertEqual(min_bipartite_degree(spec), 1)

    def test_cross_edge_outside_neighbourhood(self):
        """Test that a cross edge at v1 itself is rejected."""
        with self.assertRaises(InvalidCrossEdge):
            spec_from_payload(self.load("bad_cross_edge.json"))

    def test_missing_fields(self):
        """Test that incomplete payloads are rejected."""
        with self.assertRaises(ValueError) as context:
            spec_from_payload({"v1": 0, "v2": 0})

        self.assertIn("g1_plus", str(context.exception))

    def test_unknown_apex(self):
        """Test that v1 must be a vertex of G1+."""
        with self.assertRaises(InvalidCrossEdge):
            GlueSpec(nx.complete_graph(4), 9, nx.complete_graph(4), 0, frozenset())

    def test_payload_keeps_cross_edges(self):
        """Test that serialising a spec keeps its cross edges sorted."""
        payload = spec_to_payload(spec_from_payload(self.load("prism_glue.json")))

        self.assertEqual(payload["cross_edges"], [[1, 1], [2, 2], [3, 3]])
        self.assertEqual(payload["g1_plus"]["nodes"], [0, 1, 2, 3])


class TestGluePreservation(unittest.TestCase):
    """Three-valued verdicts of the gluing checker."""

    def setUp(self):
        """Set up test fixtures."""
        fixtures_dir = Path(__file__).parent.parent / "fixtures"
        self.prism = spec_from_payload(json.loads((fixtures_dir / "prism_glue.json").read_text()))

    def test_holds_at_one(self):
        """Test that the prism keeps toughness 1."""
        verdict = check_glue_preservation(self.prism, 1)

        self.assertEqual(verdict.status, HOLDS)
        self.assertEqual(verdict.toughness['u'], Fraction(3, 2))
        self.assertIsNone(verdict.toughness['g1_plus'])
        self.assertEqual(verdict.to_dict()['toughness']['g1'], 'infinite')

    def test_degree_too_small(self):
        """Test that a matching is not enough for t = 3/2."""
        verdict = check_glue_preservation(self.prism, Fraction(3, 2))

        self.assertEqual(verdict.status, NOT_APPLICABLE)
        self.assertEqual(verdict.required_degree, 2)
        self.assertEqual(verdict.to_dict()['min_degree'], 1)

    def test_cut_inequality(self):
        """Test the component-count inequality on a few cuts of the prism."""
        for cut in ({(1, 1), (1, 2)}, {(1, 1), (1, 2), (1, 3)}, {(1, 1), (2, 2)}):
            self.assertTrue(cut_inequality_holds(self.prism, cut), cut)

    def test_hexagon_gluing_is_a_triangulation(self):
        """Test that gluing T to its apex extension at a white is maximal planar."""
        block = build_T()
        spec = hexagon_glue_spec(block, block.vertex('w1'))

        union = glue(spec)

        self.assertEqual(min_bipartite_degree(spec), 2)
        self.assertEqual(union.number_of_nodes(), 17)
        self.assertEqual(union.number_of_edges(), 3 * 17 - 6)
        self.assertTrue(nx.check_planarity(union)[0])

    def test_random_instance_meets_hypotheses(self):
        """Test that random instances satisfy the degree condition for their threshold."""
        spec, t = random_glue_instance(4, size_cap=6)

        self.assertLessEqual(t, Fraction(3, 2))
        self.assertGreaterEqual(min_bipartite_degree(spec), -(-t.numerator // t.denominator))
        self.assertEqual(check_glue_preservation(spec, t).status, HOLDS)


class TestHarnesses(unittest.TestCase):
    """Seeded random harnesses."""

    def test_glue_harness(self):
        """Test a small gluing harness run."""
        report = run_glue_harness(instances=3, seed=0, cuts=5, size_cap=6)

        self.assertTrue(report.passed)
        self.assertEqual(report.holds + report.not_applicable, 3)
        self.assertEqual(report.cut_checks, 15)

    def test_constr3_harness(self):
        """Test that K4 replacements keep toughness above 1."""
        verdicts = run_constr3_harness(instances=2, seed=1, sizes=(5, 7))

        self.assertEqual(len(verdicts), 2)
        for verdict in verdicts:
            self.assertEqual(verdict.status, HOLDS)
            self.assertTrue(verdict.after is None or verdict.after > 1)

    def test_constr3_not_applicable(self):
        """Test that graphs with toughness at most 1 are skipped."""
        for seed in range(30):
            block = random_triangulation(8, seed=seed)
            value = toughness_exact(block).value
            if block.k4regions and value is not None and value <= 1:
                verdict = check_constr3_preservation(block, block.k4regions[0])
                self.assertEqual(verdict.status, NOT_APPLICABLE)
                self.assertIsNone(verdict.to_dict()['after'])
                return
        self.skipTest("no triangulation with toughness at most 1 among the seeds tried")


class TestWeakHypothesisHunt(unittest.TestCase):
    """Counterexample search under the covering condition."""

    def test_budget_reports_statistics(self):
        """Test that an exhausted budget raises with search statistics."""
        with self.assertRaises(NotFoundWithinBudget) as context:
            find_weak_lemma_counterexample(1, size_cap=5, budget=SearchBudget(nodes=20, seconds=60.0))

        statistics = context.exception.statistics
        self.assertEqual(statistics['cross_sets'], 20)
        self.assertFalse(statistics['exhausted'])
        self.assertEqual(context.exception.exit_code, 3)

    @unittest.skipUnless(SLOW, "set SHORTNESS_LAB_SLOW=1 for the full hunt")
    def test_hunt_at_three_halves(self):
        """Test that a found counterexample re-verifies."""
        try:
            found = find_weak_lemma_counterexample(Fraction(3, 2), size_cap=8,
                                                   budget=SearchBudget(nodes=10 ** 6, seconds=1800.0))
        except NotFoundWithinBudget as exc:
            self.skipTest(f"no counterexample in budget: {exc.statistics}")
        self.assertLess(Fraction(len(found.cut), found.components), Fraction(3, 2))
        self.assertEqual(found.to_dict()['t'], '3/2')


if __name__ == '__main__':
    unittest.main()
