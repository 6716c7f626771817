#!/usr/bin/env python3
"""
Unit tests for the building blocks: T, the r-fans, F1,0, F2,0 and apex
extensions, with their colourings and region descriptors.
"""

import sys
import unittest
from itertools import combinations
from pathlib import Path

# Add the project root to the Python path
project_root = Path(__file__).parent.parent.parent.parent.parent
sys.path.insert(0, str(project_root))

from shortness_lab.graphs.blocks import (
    APEX_X,
    BLACK,
    BLUE,
    GREY,
    OUTER_O,
    WHITE,
    LabeledBlock,
    add_apex,
    build_F10,
    build_F20,
    build_T,
    build_fan,
)
from shortness_lab.graphs.graphcore import is_maximal_planar, simplicial_vertices


class TestBlockT(unittest.TestCase):
    """The nine-vertex block T."""

    def setUp(self):
        """Set up test fixtures."""
        self.block = build_T()

    def test_shape(self):
        """Test vertex, edge and role counts."""
        self.assertEqual(self.block.n_vertices, 9)
        self.assertEqual(len(self.block.graph.edges()), 21)
        self.assertEqual(len(self.block.with_color(OUTER_O)), 3)
        self.assertEqual(len(self.block.with_color(GREY)), 3)
        self.assertEqual(self.block.whites, frozenset({6, 7, 8}))

    def test_single_region_describes_T(self):
        """Test that T is its own T-region with the documented index roles."""
        self.assertEqual(len(self.block.regions), 1)
        region = self.block.regions[0]
        adjacency = self.block.graph.adjacency

        self.assertEqual(set(region.outer), {0, 1, 2})
        self.assertEqual(set(region.greys), {3, 4, 5})
        for i in range(3):
            others = {region.outer[j] for j in range(3) if j != i}
            self.assertTrue(others <= adjacency[region.greys[i]])
            self.assertNotIn(region.outer[i], adjacency[region.greys[i]])
            self.assertEqual(adjacency[region.whites[i]], frozenset(others | {region.greys[i]}))

    def test_common_inner_neighbor(self):
        """Test the grey shared by two outer vertices."""
        region = self.block.regions[0]

        grey = region.common_inner_neighbor(region.outer[0], region.outer[1])

        self.assertEqual(grey, region.greys[2])
        with self.assertRaises(ValueError):
            region.common_inner_neighbor(region.outer[0], region.outer[0])

    def test_forced_cut(self):
        """Test the canonical inner vertices for each outer pattern."""
        region = self.block.regions[0]

        self.assertEqual(region.forced_cut([region.outer[0]]), frozenset())
        self.assertEqual(region.forced_cut(region.outer[:2]), frozenset({region.greys[2]}))
        self.assertEqual(len(region.forced_cut(region.outer)), 2)

    def test_every_white_is_a_K4_region(self):
        """Test that each white of T sits in a K4-region."""
        self.assertEqual(sorted(r.white for r in self.block.k4regions), [6, 7, 8])

    def test_cached(self):
        """Test that T is built once."""
        self.assertIs(build_T(), self.block)


class TestFans(unittest.TestCase):
    """The r-fan family and F1,0."""

    def test_fan_two(self):
        """Test the smallest fan."""
        block = build_fan(2)

        self.assertEqual(block.n_vertices, 22)
        self.assertEqual(len(block.whites), 6)
        self.assertEqual(len(block.regions), 2)
        self.assertEqual(len(block.with_color(BLACK)), 4)
        self.assertEqual(len(block.with_color(BLUE)), 4)
        self.assertTrue(is_maximal_planar(block.graph))

    def test_fan_regions_share_only_the_hub(self):
        """Test that the regions of a fan meet exactly in c."""
        block = build_fan(3)
        hub = block.vertex('c')

        for first, second in combinations(block.regions, 2):
            self.assertEqual(first.vertices & second.vertices, frozenset({hub}))

    def test_fan_radius_too_small(self):
        """Test that a fan needs at least two highlighted triangles."""
        with self.assertRaises(ValueError):
            build_fan(1)

    def test_F10(self):
        """Test F1,0: the ten-fan with 102 vertices and 30 whites."""
        block = build_F10()

        self.assertEqual(block.name, 'F1,0')
        self.assertEqual(block.n_vertices, 102)
        self.assertEqual(len(block.whites), 30)
        self.assertEqual(len(block.regions), 10)
        self.assertEqual(block.whites, simplicial_vertices(block.graph))

    def test_outer_face_avoids_whites(self):
        """Test that the outer face of a fan is c' with two blue vertices."""
        block = build_fan(2)

        self.assertEqual(block.label(block.outer_face[0]), "c'")
        self.assertFalse(set(block.outer_face) & block.whites)


class TestF20AndApex(unittest.TestCase):
    """F2,0 and apex extensions."""

    def test_F20(self):
        """Test F2,0: two T-regions on a shared black triangle."""
        block = build_F20()

        self.assertEqual(block.n_vertices, 15)
        self.assertEqual(len(block.whites), 6)
        self.assertEqual(len(block.regions), 2)
        self.assertEqual(len(block.with_color(BLACK)), 3)
        first, second = block.regions
        self.assertFalse(first.inner & second.inner)

    def test_F20_outer_face_is_grey(self):
        """Test that F2,0 is embedded with a grey outer face."""
        block = build_F20()

        self.assertEqual({block.colors[v] for v in block.outer_face}, {GREY})

    def test_apex_extension(self):
        """Test F+2,0: one more vertex, one fewer T-region."""
        block = build_F20()

        plus = add_apex(block)

        self.assertEqual(plus.name, 'F+2,0')
        self.assertEqual(plus.n_vertices, 16)
        self.assertEqual(plus.colors[plus.vertex('x')], APEX_X)
        self.assertEqual(plus.graph.degree(plus.vertex('x')), 3)
        self.assertEqual(len(plus.regions), 1)
        self.assertTrue(is_maximal_planar(plus.graph))

    def test_apex_keeps_vertex_ids(self):
        """Test that the original vertices keep their ids under the apex."""
        block = build_F20()

        plus = add_apex(block)

        for v in block.graph.vertices():
            self.assertEqual(plus.label(v), block.label(v))


class TestLabeledBlock(unittest.TestCase):
    """Validation on LabeledBlock."""

    def test_color_count_mismatch(self):
        """Test that every vertex needs a colour."""
        graph = build_T().graph

        with self.assertRaises(ValueError):
            LabeledBlock(graph, (WHITE,) * 8)

    def test_unknown_color(self):
        """Test that colours come from the role vocabulary."""
        graph = build_T().graph

        with self.assertRaises(ValueError) as context:
            LabeledBlock(graph, ('green',) * 9)

        self.assertIn("Unknown role colors", str(context.exception))

    def test_networkx_view_has_colors(self):
        """Test that the networkx view carries colours and the name."""
        view = build_T().to_networkx()

        self.assertEqual(view.nodes[6]['color'], WHITE)
        self.assertEqual(view.graph['name'], 'T')


if __name__ == '__main__':
    unittest.main()
