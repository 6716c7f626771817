import logging
import random
from typing import Any, Dict, Optional

import networkx as nx

from shortness_lab.graphs.blocks import PLAIN, WHITE, LabeledBlock
from shortness_lab.graphs.graphcore import TriangleComplex

logger = logging.getLogger(__name__)

TETRAHEDRON_FACES = ((0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2))


def _stack(complex_: TriangleComplex, rng: random.Random) -> int:
    a, b, c = rng.choice(complex_.faces())
    x = complex_.add_vertex(str(len(complex_.labels)))
    complex_.remove_face((a, b, c))
    for face in ((a, b, x), (b, c, x), (c, a, x)):
        complex_.add_face(face)
    return x


def _try_flip(complex_: TriangleComplex, u: int, v: int) -> bool:
    """Replace edge u-v by the opposite diagonal when the result stays simple."""
    first = complex_.face_at(u, v)
    second = complex_.face_at(v, u)
    if first is None or second is None:
        return False
    x, y = first[2], second[2]
    if x == y or complex_.has_edge(x, y) or complex_.degree(u) <= 3 or complex_.degree(v) <= 3:
        return False
    complex_.remove_face(first)
    complex_.remove_face(second)
    complex_.add_face((x, u, y))
    complex_.add_face((y, v, x))
    return True


def random_triangulation(n: int, seed: int = 0, flips: Optional[int] = None) -> LabeledBlock:
    """A random maximal planar graph on ``n`` vertices, reproducible for a seed.

    Vertices are stacked into random faces of a tetrahedron, random legal
    edge flips mix the result, and the last vertex is stacked after the
    flips so every graph on five or more vertices has a degree-3 vertex.
    Degree-3 vertices are coloured white (none for the tetrahedron itself,
    whose degree-3 vertices are pairwise adjacent).
    """
    if n < 4:
        raise ValueError(f"A triangulation needs at least 4 vertices, got {n}")
    rng = random.Random(seed)
    complex_ = TriangleComplex()
    for v in range(4):
        complex_.add_vertex(str(v))
    for face in TETRAHEDRON_FACES:
        complex_.add_face(face)

    if n > 4:
        while len(complex_.labels) < n - 1:
            _stack(complex_, rng)
        budget = 3 * n if flips is None else flips
        for _ in range(budget):
            u = rng.randrange(len(complex_.labels))
            nbrs = complex_.neighbors(u)
            _try_flip(complex_, u, rng.choice(sorted(nbrs)))
        _stack(complex_, rng)

    for v in range(len(complex_.labels)):
        if n > 4 and complex_.degree(v) == 3:
            complex_.colors[v] = WHITE
        else:
            complex_.colors[v] = PLAIN

    whites = {v for v, color in enumerate(complex_.colors) if color == WHITE}
    outer = next((face for face in complex_.faces() if not whites & set(face)), complex_.faces()[0])
    graph, colors, _ = complex_.freeze(outer)
    return LabeledBlock.create(graph, colors, f'random(n={n}, seed={seed})')


def relabel_randomly(G: nx.Graph, seed: int = 0) -> nx.Graph:
    """Copy of ``G`` under a random permutation of its node ids."""
    nodes = sorted(G.nodes)
    shuffled = list(nodes)
    random.Random(seed).shuffle(shuffled)
    mapping: Dict[Any, Any] = dict(zip(nodes, shuffled))
    relabeled = nx.relabel_nodes(nx.Graph(G), mapping, copy=True)
    if 'outer_face' in G.graph:
        relabeled.graph['outer_face'] = tuple(mapping[v] for v in G.graph['outer_face'])
    return relabeled
