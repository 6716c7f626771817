"""
Building blocks of the three families: the 9-vertex block T, the fan block
F1,0 (and its generalisation to r highlighted triangles), the doubled block
F2,0 and apex extensions, together with the role colouring and the region
descriptors the analysis modules rely on.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx

from shortness_lab.errors import ReconstructionInvalid
from shortness_lab.graphs.graphcore import (
    TriangleComplex,
    Triangulation,
    independence_number,
    is_dominating,
    is_maximal_planar,
    simplicial_vertices,
)

logger = logging.getLogger(__name__)

WHITE = 'white'
GREY = 'grey'
BLACK = 'black'
BLUE = 'blue'
HUB_C = 'hub_c'
HUB_CPRIME = 'hub_cprime'
OUTER_O = 'outer_o'
APEX_X = 'apex_x'
PLAIN = 'plain'

ROLE_COLORS = (WHITE, GREY, BLACK, BLUE, HUB_C, HUB_CPRIME, OUTER_O, APEX_X, PLAIN)

# Interior faces of T over ids o1,o2,o3,g1,g2,g3,w1,w2,w3 = 0..8; the outer face is (o1, o3, o2).
T_LABELS = ('o1', 'o2', 'o3', 'g1', 'g2', 'g3', 'w1', 'w2', 'w3')
T_COLORS = (OUTER_O,) * 3 + (GREY,) * 3 + (WHITE,) * 3
T_OUTER_FACE = (0, 2, 1)
T_INNER_FACES = (
    (1, 2, 6), (2, 3, 6), (3, 1, 6),
    (2, 0, 7), (0, 4, 7), (4, 2, 7),
    (0, 1, 8), (1, 5, 8), (5, 0, 8),
    (0, 5, 4), (1, 3, 5), (2, 4, 3),
    (3, 4, 5),
)


@dataclass(frozen=True)
class TRegionDescriptor:
    """An induced copy of T whose six inner vertices see nothing outside it.

    Index ``i`` ties the roles together: ``greys[i]`` is adjacent to the two
    outer vertices other than ``outer[i]`` and ``whites[i]`` sits in the
    triangle formed by those two and ``greys[i]``.
    """

    outer: Tuple[int, int, int]
    greys: Tuple[int, int, int]
    whites: Tuple[int, int, int]

    @property
    def inner(self) -> FrozenSet[int]:
        return frozenset(self.greys) | frozenset(self.whites)

    @property
    def vertices(self) -> FrozenSet[int]:
        return self.inner | frozenset(self.outer)

    def common_inner_neighbor(self, a: int, b: int) -> int:
        """Grey vertex adjacent to both outer vertices ``a`` and ``b``."""
        missing = [i for i, o in enumerate(self.outer) if o not in (a, b)]
        if a == b or len(missing) != 1:
            raise ValueError(f"{a} and {b} are not two distinct outer vertices of the region")
        return self.greys[missing[0]]

    def forced_cut(self, present: Sequence[int]) -> FrozenSet[int]:
        """Inner vertices a canonical cut holds when it contains ``present`` outer vertices."""
        outers = [o for o in self.outer if o in set(present)]
        if len(outers) <= 1:
            return frozenset()
        if len(outers) == 2:
            return frozenset({self.common_inner_neighbor(*outers)})
        return frozenset(sorted(self.greys)[:2])


@dataclass(frozen=True)
class K4RegionDescriptor:
    white: int
    outer: Tuple[int, int, int]


@dataclass(frozen=True)
class LabeledBlock:
    graph: Triangulation
    colors: Tuple[str, ...]
    name: str = ''
    regions: Tuple[TRegionDescriptor, ...] = field(default=(), compare=False)
    k4regions: Tuple[K4RegionDescriptor, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'colors', tuple(self.colors))
        if len(self.colors) != self.graph.n_vertices:
            raise ValueError(f"Expected {self.graph.n_vertices} colors, got {len(self.colors)}")
        unknown = set(self.colors) - set(ROLE_COLORS)
        if unknown:
            raise ValueError(f"Unknown role colors: {sorted(unknown)}")

    @classmethod
    def create(cls, graph: Triangulation, colors: Sequence[str], name: str = '') -> 'LabeledBlock':
        bare = cls(graph, tuple(colors), name)
        return cls(graph, tuple(colors), name, tuple(find_T_regions(bare)), tuple(find_K4_regions(bare)))

    @property
    def n_vertices(self) -> int:
        return self.graph.n_vertices

    @property
    def outer_face(self) -> Tuple[int, int, int]:
        return self.graph.outer_face

    def label(self, v: int) -> str:
        return self.graph.labels[v]

    def vertex(self, label: str) -> int:
        return self.graph.vertex_by_label(label)

    def with_color(self, color: str) -> FrozenSet[int]:
        return frozenset(v for v, c in enumerate(self.colors) if c == color)

    @cached_property
    def whites(self) -> FrozenSet[int]:
        return self.with_color(WHITE)

    @cached_property
    def _networkx(self) -> nx.Graph:
        graph = nx.Graph(self.graph.to_networkx())
        graph.graph['name'] = self.name
        for v, color in enumerate(self.colors):
            graph.nodes[v]['color'] = color
        return nx.freeze(graph)

    def to_networkx(self) -> nx.Graph:
        return self._networkx


def find_T_regions(G: LabeledBlock) -> List[TRegionDescriptor]:
    graph = G.graph
    adjacency = graph.adjacency
    greys = sorted(G.with_color(GREY))
    grey_set = set(greys)
    found = []
    for g1 in greys:
        for g2 in sorted(adjacency[g1] & grey_set):
            if g2 <= g1:
                continue
            for g3 in sorted(adjacency[g1] & adjacency[g2] & grey_set):
                if g3 <= g2:
                    continue
                region = _match_T_region(G, (g1, g2, g3))
                if region is not None:
                    found.append(region)
    return found


def _match_T_region(G: LabeledBlock, greys: Tuple[int, int, int]) -> Optional[TRegionDescriptor]:
    adjacency = G.graph.adjacency
    outer = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        common = adjacency[greys[j]] & adjacency[greys[k]] - {greys[i]}
        if len(common) != 1:
            return None
        outer.append(next(iter(common)))
    if len(set(outer)) != 3 or set(outer) & set(greys):
        return None
    if any(outer[b] not in adjacency[outer[a]] for a, b in ((0, 1), (1, 2), (2, 0))):
        return None

    whites = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        expected_white_nbrs = frozenset({outer[j], outer[k], greys[i]})
        candidates = [w for w in adjacency[greys[i]]
                      if G.colors[w] == WHITE and adjacency[w] == expected_white_nbrs]
        if len(candidates) != 1:
            return None
        whites.append(candidates[0])
        if adjacency[greys[i]] != frozenset({greys[j], greys[k], outer[j], outer[k], whites[i]}):
            return None
    return TRegionDescriptor(tuple(outer), tuple(greys), tuple(whites))


def find_K4_regions(G: LabeledBlock) -> List[K4RegionDescriptor]:
    graph = G.graph
    found = []
    for w in sorted(G.whites):
        nbrs = graph.rotation[w]
        if len(nbrs) != 3:
            continue
        a1, a2, a3 = nbrs
        if graph.has_edge(a1, a2) and graph.has_edge(a2, a3) and graph.has_edge(a3, a1):
            found.append(K4RegionDescriptor(w, (a1, a2, a3)))
    return found


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise ReconstructionInvalid(message)


def _check_whites(block: LabeledBlock) -> None:
    _check(is_maximal_planar(block.graph), f"{block.name} is not maximal planar")
    _check(block.whites == simplicial_vertices(block.graph),
           f"{block.name}: white vertices differ from the simplicial vertices")
    _check(all(not block.graph.has_edge(a, b) for a, b in combinations(sorted(block.whites), 2)),
           f"{block.name}: white vertices are not independent")


@lru_cache(maxsize=None)
def build_T() -> LabeledBlock:
    graph = Triangulation.from_faces(T_INNER_FACES + (T_OUTER_FACE,), T_OUTER_FACE, T_LABELS)
    block = LabeledBlock.create(graph, T_COLORS, 'T')

    _check(block.n_vertices == 9, "T must have 9 vertices")
    _check(sorted((graph.degree(v) for v in graph.vertices()), reverse=True) == [6, 6, 6, 5, 5, 5, 3, 3, 3],
           "T has the wrong degree sequence")
    _check_whites(block)
    outer = set(block.with_color(OUTER_O))
    for w in block.whites:
        _check(len(graph.adjacency[w] - outer) == 1, f"White {graph.labels[w]} must have one non-outer neighbour")
    for pair in combinations(sorted(outer), 2):
        _check(is_dominating(graph, pair), f"Outer pair {pair} does not dominate T")
    _check(len(block.regions) == 1, "T must be its own T-region")
    logger.debug("Built T")
    return block


def _t_patch_colors(outer_color: str = OUTER_O) -> Tuple[str, ...]:
    return (outer_color,) * 3 + T_COLORS[3:]


@lru_cache(maxsize=None)
def build_fan(r: int) -> LabeledBlock:
    """The r-fan: r copies of T sharing the hub c inside a black/blue antiprism.

    Vertices are created as c, c', b0..b(2r-1), u0..u(2r-1); the highlighted
    triangle (c, b2i, b2i+1) is then replaced by a copy of T labelled "r{i}.".
    """
    if r < 2:
        raise ValueError(f"A fan needs at least 2 highlighted triangles, got r={r}")
    size = 2 * r
    complex_ = TriangleComplex()
    c = complex_.add_vertex('c', HUB_C)
    cp = complex_.add_vertex("c'", HUB_CPRIME)
    black = [complex_.add_vertex(f'b{j}', BLACK) for j in range(size)]
    blue = [complex_.add_vertex(f'u{j}', BLUE) for j in range(size)]
    for j in range(size):
        nj = (j + 1) % size
        complex_.add_face((c, black[j], black[nj]))
        complex_.add_face((black[nj], black[j], blue[j]))
        complex_.add_face((black[nj], blue[j], blue[nj]))
        complex_.add_face((cp, blue[nj], blue[j]))

    t_block = build_T()
    patch_colors = _t_patch_colors()
    for i in range(r):
        complex_.replace_face((c, black[2 * i], black[2 * i + 1]), t_block.graph, patch_colors, f'r{i}.')

    graph, colors, _ = complex_.freeze((cp, blue[1], blue[0]))
    block = LabeledBlock.create(graph, colors, f'fan({r})')
    _check_fan(block, r)
    logger.info("Built %s with %d vertices and %d white vertices", block.name, block.n_vertices, len(block.whites))
    return block


def _check_fan(block: LabeledBlock, r: int) -> None:
    graph = block.graph
    _check(block.n_vertices == 10 * r + 2, f"{block.name} must have {10 * r + 2} vertices")
    _check(len(block.whites) == 3 * r, f"{block.name} must have {3 * r} white vertices")
    _check_whites(block)
    hub = graph.vertex_by_label('c')
    _check(len(block.regions) == r, f"{block.name} must have {r} T-regions")
    for first, second in combinations(block.regions, 2):
        _check(first.vertices & second.vertices == {hub}, f"{block.name}: T-regions must meet only in c")
    blue = block.with_color(BLUE)
    black = block.with_color(BLACK)
    inner = set().union(*(region.inner for region in block.regions))
    for u in blue:
        _check(bool(graph.adjacency[u] & black), f"Blue vertex {graph.labels[u]} has no black neighbour")
        _check(not graph.adjacency[u] & inner, f"Blue vertex {graph.labels[u]} touches a T-region interior")
    hub_prime = graph.vertex_by_label("c'")
    _check(graph.adjacency[hub_prime] == blue, "c' must be adjacent to exactly the blue vertices")
    alpha = independence_number(graph, black | blue)
    _check(alpha == (4 * r) // 3, f"{block.name}: independence number of the black/blue ring is {alpha}")


@lru_cache(maxsize=None)
def build_F10() -> LabeledBlock:
    block = build_fan(10)
    return LabeledBlock(block.graph, block.colors, 'F1,0', block.regions, block.k4regions)


@lru_cache(maxsize=None)
def build_F20() -> LabeledBlock:
    t_block = build_T()
    complex_ = TriangleComplex()
    for v, label in enumerate(T_LABELS):
        color = BLACK if T_COLORS[v] == OUTER_O else T_COLORS[v]
        complex_.add_vertex(label if v < 3 else f'a.{label}', color)
    for face in T_INNER_FACES:
        complex_.add_face(face)
    mapping = complex_.fill_hole(T_OUTER_FACE, t_block.graph, _t_patch_colors(), 'b.')
    grey_face = tuple(mapping[t_block.vertex(label)] for label in ('g1', 'g2', 'g3'))
    graph, colors, _ = complex_.freeze(grey_face)
    block = LabeledBlock.create(graph, colors, 'F2,0')

    _check(block.n_vertices == 15, "F2,0 must have 15 vertices")
    _check(len(block.whites) == 6, "F2,0 must have 6 white vertices")
    _check_whites(block)
    _check(len(block.regions) == 2, "F2,0 must contain two T-regions")
    first, second = block.regions
    _check(not first.inner & second.inner, "The T-regions of F2,0 must have disjoint interiors")
    _check(first.inner | second.inner | block.with_color(BLACK) == frozenset(graph.vertices()),
           "The T-regions of F2,0 and the shared triangle must cover the graph")
    for pair in combinations(sorted(block.with_color(BLACK)), 2):
        _check(is_dominating(graph, pair), f"Black pair {pair} does not dominate F2,0")
    logger.info("Built F2,0")
    return block


def add_apex(B: LabeledBlock) -> LabeledBlock:
    p1, p2, p3 = B.outer_face
    complex_ = TriangleComplex.from_graph(B.graph, B.colors)
    complex_.remove_face((p1, p2, p3))
    x = complex_.add_vertex('x', APEX_X)
    for face in ((p1, p2, x), (p2, p3, x), (p3, p1, x)):
        complex_.add_face(face)
    graph, colors, _ = complex_.freeze((p1, p2, x))
    name = 'F+' + B.name[1:] if B.name.startswith('F') else f'{B.name}+'
    return LabeledBlock.create(graph, colors, name)
