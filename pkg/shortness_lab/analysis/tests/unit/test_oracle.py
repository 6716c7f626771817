#!/usr/bin/env python3
"""
Unit tests for the exact search oracles: longest cycles and paths,
white-maximal cycles, toughness and the LP export.
"""

import os
import sys
import unittest
from fractions import Fraction
from pathlib import Path

import networkx as nx

# Add the project root to the Python path
project_root = Path(__file__).parent.parent.parent.parent.parent
sys.path.insert(0, str(project_root))

from shortness_lab.analysis.oracle import (
    LP_LINE_WIDTH,
    CycleWitness,
    PathWitness,
    SearchBudget,
    canonicalize_cut,
    cycle_search,
    export_toughness_lp,
    longest_cycle_exact,
    longest_cycle_with_outer_edges,
    longest_path_exact,
    max_white_cycle,
    strip_simplicial,
    t_region_cut,
    toughness_exact,
    toughness_search,
)
from shortness_lab.analysis.witness import verify_witness
from shortness_lab.errors import (
    BudgetExceeded,
    NoSimplicialVertex,
    NotApplicable,
)
from shortness_lab.graphs.assembly import FamilyId, build_family
from shortness_lab.graphs.blocks import add_apex, build_F10, build_F20, build_T
from shortness_lab.graphs.graphcore import VertexCut, components_after_cut
from shortness_lab.graphs.generators import random_triangulation

try:
    from hypothesis import given, settings, strategies as st
    HAS_HYPOTHESIS = True
except ImportError:
    HAS_HYPOTHESIS = False

SLOW = os.environ.get('SHORTNESS_LAB_SLOW') == '1'


class TestSearchBudget(unittest.TestCase):
    """Budget validation and rendering."""

    def test_rejects_non_positive(self):
        """Test that limits must be positive."""
        with self.assertRaises(ValueError):
            SearchBudget(0, 10.0)
        with self.assertRaises(ValueError):
            SearchBudget(10, -1.0)

    def test_describe(self):
        """Test the human-readable budget."""
        self.assertEqual(SearchBudget(100, 2.5).describe(), '100 nodes, 2.5 s')
        self.assertEqual(SearchBudget.unlimited().describe(), 'unlimited, unlimited')


class TestWitnessTypes(unittest.TestCase):
    """Cycle and path witnesses."""

    def test_cycle_edges_close(self):
        """Test that cycle edges wrap around."""
        cycle = CycleWitness((1, 2, 3))

        self.assertEqual(cycle.edges(), [(1, 2), (2, 3), (3, 1)])
        with self.assertRaises(ValueError):
            CycleWitness((1, 2))

    def test_path_edges_open(self):
        """Test that path edges do not wrap."""
        self.assertEqual(PathWitness((1, 2, 3)).edges(), [(1, 2), (2, 3)])
        self.assertEqual(len(PathWitness((7,))), 1)


class TestCycleSearch(unittest.TestCase):
    """Longest and white-maximal cycles."""

    def test_T_is_hamiltonian(self):
        """Test that T has a Hamiltonian cycle."""
        length, witness = longest_cycle_exact(build_T())

        self.assertEqual(length, 9)
        self.assertTrue(verify_witness(build_T(), witness))

    def test_T_outer_edge_profile(self):
        """Test the longest cycles through one and two outer edges of T."""
        block = build_T()

        self.assertEqual(longest_cycle_with_outer_edges(block, 1), 9)
        self.assertEqual(longest_cycle_with_outer_edges(block, 2), 8)

    def test_F20_longest_cycle(self):
        """Test that F2,0 is not Hamiltonian: its longest cycle has 14 vertices."""
        length, witness = longest_cycle_exact(build_F20())

        self.assertEqual(length, 14)
        self.assertEqual(len(witness), 14)
        self.assertTrue(verify_witness(build_F20(), witness))

    def test_F20_white_bound(self):
        """Test that no cycle of F2,0 collects all six whites."""
        count, witness = max_white_cycle(build_F20())

        self.assertEqual(count, 5)
        self.assertEqual(len(set(witness.vertices) & build_F20().whites), 5)

    def test_result_reports_upper_bound(self):
        """Test the search statistics on the result."""
        result = cycle_search(build_T())

        self.assertEqual(result.value, 9)
        self.assertGreaterEqual(result.upper_bound, result.value)
        self.assertGreater(result.nodes, 0)

    def test_incumbent_must_be_a_cycle(self):
        """Test that an invalid incumbent is rejected."""
        with self.assertRaises(ValueError):
            cycle_search(build_T(), incumbent=[6, 7, 8])

    def test_incumbent_vertices_must_exist(self):
        """Test that an incumbent naming unknown vertices is rejected."""
        with self.assertRaises(ValueError) as context:
            cycle_search(build_T(), incumbent=[0, 1, 99])

        self.assertIn("99", str(context.exception))

    def test_invalid_arguments(self):
        """Test objective and outer-edge validation."""
        with self.assertRaises(ValueError):
            cycle_search(build_T(), objective='weight')
        with self.assertRaises(ValueError):
            cycle_search(build_T(), outer_edges=3)

    def test_white_objective_needs_whites(self):
        """Test that uncoloured graphs have no white objective."""
        with self.assertRaises(NotApplicable):
            cycle_search(nx.complete_graph(5), objective='white')

    def test_budget_exceeded_carries_best(self):
        """Test that a tiny budget raises with the best bound so far."""
        with self.assertRaises(BudgetExceeded) as context:
            longest_cycle_exact(build_F20(), SearchBudget(nodes=1))

        self.assertEqual(context.exception.exit_code, 3)
        self.assertLessEqual(context.exception.nodes, 2)

    def test_plain_networkx_graph(self):
        """Test the search on an uncoloured networkx graph."""
        length, witness = longest_cycle_exact(nx.petersen_graph())

        self.assertEqual(length, 9)
        self.assertTrue(verify_witness(nx.petersen_graph(), witness))


class TestPathSearch(unittest.TestCase):
    """Longest paths."""

    def test_T(self):
        """Test a Hamiltonian path of T."""
        length, witness = longest_path_exact(build_T())

        self.assertEqual(length, 9)
        self.assertTrue(verify_witness(build_T(), witness))

    def test_F20(self):
        """Test that F2,0 has a Hamiltonian path though no Hamiltonian cycle."""
        length, _ = longest_path_exact(build_F20())

        self.assertEqual(length, 15)

    def test_star(self):
        """Test a tree where the longest path has three vertices."""
        length, _ = longest_path_exact(nx.star_graph(4))

        self.assertEqual(length, 3)


class TestToughness(unittest.TestCase):
    """Exact toughness and threshold searches."""

    def test_T(self):
        """Test that T is exactly 3/2-tough."""
        report = toughness_exact(build_T())

        self.assertEqual(report.kind, 'exact')
        self.assertEqual(report.value, Fraction(3, 2))
        count, _ = components_after_cut(build_T().graph, report.cut)
        self.assertEqual(Fraction(len(report.cut), count), report.value)

    def test_complete_graph_is_infinitely_tough(self):
        """Test that complete graphs have no separating cut."""
        report = toughness_exact(nx.complete_graph(5))

        self.assertTrue(report.is_infinite)
        self.assertTrue(report.at_least(Fraction(100)))
        self.assertEqual(report.to_dict()['value'], 'infinite')

    def test_disconnected_graph(self):
        """Test that a disconnected graph has toughness 0."""
        graph = nx.Graph([(0, 1), (2, 3)])

        self.assertEqual(toughness_exact(graph).value, 0)

    def test_star_toughness(self):
        """Test that K_{1,4} has toughness 1/4."""
        self.assertEqual(toughness_exact(nx.star_graph(4)).value, Fraction(1, 4))

    def test_pruning_does_not_change_value(self):
        """Test pruned and unpruned enumeration on random triangulations."""
        for seed in range(6):
            block = random_triangulation(9, seed=seed)
            pruned = toughness_exact(block, prune=True, reduction='none').value
            full = toughness_exact(block, prune=False, reduction='none').value
            self.assertEqual(pruned, full, f"seed {seed}")

    def test_F20_above_one(self):
        """Test that F2,0 and its apex extension are more than 1-tough."""
        self.assertGreater(toughness_exact(build_F20()).value, 1)
        self.assertGreater(toughness_exact(add_apex(build_F20())).value, 1)

    def test_unknown_reduction(self):
        """Test that reductions come from a fixed vocabulary."""
        with self.assertRaises(ValueError):
            toughness_exact(build_T(), reduction='magic')

    def test_forced_reduction_needs_outside_vertex(self):
        """Test that T alone cannot be reduced: its region is the whole graph."""
        with self.assertRaises(NotApplicable):
            toughness_exact(build_T(), reduction='t_region')

    def test_report_threshold_check(self):
        """Test at_least on exact reports only."""
        report = toughness_exact(build_T())

        self.assertTrue(report.at_least(Fraction(3, 2)))
        self.assertFalse(report.at_least(Fraction(2)))

    def test_search_finds_violation(self):
        """Test that T is not 2-tough and the violating cut re-verifies."""
        report = toughness_search(build_T(), 2)

        self.assertEqual(report.kind, 'violation')
        self.assertLess(report.value, 2)
        count, _ = components_after_cut(build_T().graph, report.cut)
        self.assertEqual(count, report.components)
        with self.assertRaises(ValueError):
            report.at_least(Fraction(1))

    def test_search_without_violation(self):
        """Test that T has no cut below 3/2."""
        report = toughness_search(build_T(), Fraction(3, 2))

        self.assertEqual(report.kind, 'no_violation_found')
        self.assertTrue(report.complete)

    def test_search_rejects_non_positive_threshold(self):
        """Test threshold validation."""
        with self.assertRaises(ValueError):
            toughness_search(build_T(), 0)

    @unittest.skipUnless(SLOW, "set SHORTNESS_LAB_SLOW=1 for the F3,1 toughness search")
    def test_F31_reduced(self):
        """Test exact toughness of F3,1 through canonical cuts."""
        report = toughness_exact(build_family(FamilyId(3, 1)))

        self.assertGreater(report.value, 1)


class TestToughnessBudgets(unittest.TestCase):
    """Parallel enumeration and budget exhaustion of the toughness solvers."""

    def test_threads_agree_with_sequential(self):
        """Test that worker processes find the same toughness as one process."""
        for seed in range(4):
            block = random_triangulation(9, seed=seed)
            sequential = toughness_exact(block, reduction='none', threads=1)
            parallel = toughness_exact(block, reduction='none', threads=2)
            self.assertEqual(parallel.value, sequential.value, f"seed {seed}")
            count, _ = components_after_cut(block.graph, parallel.cut)
            self.assertEqual(Fraction(len(parallel.cut), count), parallel.value)

    def test_parallel_enumeration_out_of_nodes(self):
        """Test that worker processes stop on one shared node budget."""
        with self.assertRaises(BudgetExceeded) as context:
            toughness_exact(build_F20(), SearchBudget(nodes=5, seconds=60.0), threads=2, reduction='none')

        self.assertEqual(context.exception.exit_code, 3)
        self.assertGreater(context.exception.nodes, 5)

    def test_sequential_enumeration_out_of_nodes(self):
        """Test the single-process enumeration under a tiny node budget."""
        with self.assertRaises(BudgetExceeded) as context:
            toughness_exact(build_F20(), SearchBudget(nodes=5), threads=1, reduction='none')

        self.assertEqual(context.exception.exit_code, 3)

    def test_canonical_enumeration_out_of_nodes(self):
        """Test the canonical-cut enumeration under a tiny node budget."""
        with self.assertRaises(BudgetExceeded):
            toughness_exact(build_family(FamilyId(3, 1)), SearchBudget(nodes=3), reduction='t_region')

    def test_search_out_of_nodes_is_incomplete(self):
        """Test that an exhausted threshold search reports an incomplete result."""
        report = toughness_search(build_F20(), 1, SearchBudget(nodes=3))

        self.assertEqual(report.kind, 'no_violation_found')
        self.assertFalse(report.complete)
        self.assertEqual(report.to_dict()['budget'], '3 nodes, 60 s')

    def test_report_states_limits(self):
        """Test that exact reports carry the budget they ran under."""
        report = toughness_exact(build_T(), SearchBudget(nodes=10 ** 6, seconds=30.0))

        self.assertEqual(report.budget, '1000000 nodes, 30 s')
        self.assertEqual(report.to_dict()['budget'], '1000000 nodes, 30 s')


class TestCutTools(unittest.TestCase):
    """Region cuts, canonicalisation and simplicial stripping."""

    def setUp(self):
        """Set up test fixtures."""
        self.block = build_F20()
        self.region = self.block.regions[0]

    def test_t_region_cut(self):
        """Test the outer triangle plus two greys of a region."""
        cut = t_region_cut(self.block, self.region)

        self.assertEqual(len(cut), 5)
        self.assertTrue(set(self.region.outer) <= cut.members)

    def test_canonicalize_moves_inner_vertices(self):
        """Test that the inner part of a cut is replaced by the canonical grey."""
        o = self.region.outer
        members = {o[0], o[1], self.region.whites[2]}

        canonical = canonicalize_cut(self.block, members, self.region, 1)

        self.assertEqual(canonical.members, frozenset({o[0], o[1], self.region.greys[2]}))

    def test_canonicalize_single_outer(self):
        """Test that cuts touching one outer vertex are left alone or rejected."""
        members = {self.region.outer[0], self.region.greys[1]}

        self.assertEqual(canonicalize_cut(self.block, members, self.region, 1).members, frozenset(members))
        with self.assertRaises(NotApplicable):
            canonicalize_cut(self.block, members, self.region, 1, strict=True)

    def test_canonicalize_below_one(self):
        """Test that canonical cuts need t >= 1."""
        with self.assertRaises(NotApplicable):
            canonicalize_cut(self.block, set(self.region.outer), self.region, Fraction(1, 2))

    def test_canonicalize_keeps_violation(self):
        """Test that a violating cut stays violating after canonicalisation."""
        o = self.region.outer
        members = frozenset(o) | {self.region.greys[0], self.region.greys[1]}
        count, _ = components_after_cut(self.block.graph, members)

        canonical = canonicalize_cut(self.block, members, self.region, Fraction(3, 2))

        self.assertIsInstance(canonical, VertexCut)
        new_count, _ = components_after_cut(self.block.graph, canonical)
        self.assertGreaterEqual(Fraction(new_count, len(canonical)), Fraction(count, len(members)))

    def test_strip_simplicial(self):
        """Test removing a white vertex."""
        stripped = strip_simplicial(build_T(), 6)

        self.assertEqual(stripped.number_of_nodes(), 8)
        self.assertNotIn('outer_face', stripped.graph)

    def test_strip_non_simplicial(self):
        """Test that only simplicial vertices may be stripped."""
        with self.assertRaises(NoSimplicialVertex):
            strip_simplicial(build_T(), 3)
        with self.assertRaises(NoSimplicialVertex):
            strip_simplicial(nx.cycle_graph(5))

    def test_strip_default_vertex(self):
        """Test that the smallest simplicial vertex is the default."""
        stripped = strip_simplicial(build_T())

        self.assertNotIn(6, stripped)


class TestLpExport(unittest.TestCase):
    """The integer-program export."""

    def test_structure(self):
        """Test the sections and variable counts of the LP file."""
        text = export_toughness_lp(nx.complete_graph(4), Fraction(3, 2))
        lines = text.splitlines()

        self.assertTrue(lines[0].startswith("\\ Toughness violation search for t = 3/2 on 4 vertices"))
        for section in ("Maximize", "Subject To", "Binary", "End"):
            self.assertIn(section, lines)
        self.assertIn(" part_0: s_0 + x_0_1 + x_0_2 + x_0_3 + x_0_4 = 1", lines)
        self.assertTrue(any(line.startswith(" ratio: 3 u_1") for line in lines))
        self.assertIn(" separating: u_1 + u_2 + u_3 + u_4 >= 2", lines)

    def test_long_rows_are_wrapped(self):
        """Test that no LP line exceeds the line width on a larger graph."""
        block = random_triangulation(40, seed=3)
        text = export_toughness_lp(block, Fraction(3, 2))
        lines = text.splitlines()

        self.assertTrue(all(len(line) <= LP_LINE_WIDTH for line in lines))
        start = next(i for i, line in enumerate(lines) if line.startswith(" used_1:"))
        self.assertTrue(lines[start + 1].startswith("    - x_"))
        self.assertTrue(any(line.endswith("<= 0") for line in lines[start:start + 3]))
        self.assertEqual(sum(1 for line in lines if line.startswith("\\ vertex index map:")), 3)

    def test_threshold_validation(self):
        """Test that thresholds must be positive."""
        with self.assertRaises(ValueError):
            export_toughness_lp(nx.complete_graph(4), 0)


@unittest.skipUnless(SLOW, "set SHORTNESS_LAB_SLOW=1 for searches on F1,0")
class TestBoundedToughnessF10(unittest.TestCase):
    """Bounded toughness evidence on the 102-vertex block."""

    def test_violation_at_three_halves(self):
        """Test that F1,0 is not 3/2-tough."""
        report = toughness_search(build_F10(), Fraction(3, 2))

        self.assertEqual(report.kind, 'violation')

    def test_no_violation_at_five_quarters(self):
        """Test the budgeted search for cuts below 5/4."""
        report = toughness_search(build_F10(), Fraction(5, 4), SearchBudget(10 ** 6, 600.0))

        self.assertEqual(report.kind, 'no_violation_found')


@unittest.skipUnless(HAS_HYPOTHESIS, "hypothesis is not installed")
class TestToughnessProperties(unittest.TestCase):
    """Property suite on random triangulations."""

    if HAS_HYPOTHESIS:
        @settings(max_examples=25, deadline=None)
        @given(st.integers(min_value=5, max_value=10), st.integers(min_value=0, max_value=10 ** 6))
        def test_simplicial_stripping_never_lowers_toughness(self, n, seed):
            """Test that removing a simplicial vertex cannot make a graph less tough."""
            block = random_triangulation(n, seed=seed)
            whole = toughness_exact(block, reduction='none').value
            part = toughness_exact(strip_simplicial(block), reduction='none').value

            self.assertTrue(part is None or (whole is not None and whole <= part))

        @settings(max_examples=25, deadline=None)
        @given(st.integers(min_value=5, max_value=9), st.integers(min_value=0, max_value=10 ** 6))
        def test_argmin_cut_reverifies(self, n, seed):
            """Test that the returned cut attains the toughness value."""
            report = toughness_exact(random_triangulation(n, seed=seed), reduction='none')
            if report.value is None:
                return
            graph = random_triangulation(n, seed=seed).graph
            count, _ = components_after_cut(graph, report.cut)
            self.assertEqual(Fraction(len(report.cut), count), report.value)


if __name__ == '__main__':
    unittest.main()
