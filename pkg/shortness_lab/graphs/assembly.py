"""
Recursive family constructions.

Families 1 and 2 replace every white vertex by a copy of an arranged block,
joining the copy's outer triangle to the removed vertex's neighbours through
a hexagonal annulus. Family 3 replaces every K4-region by a T-region.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from shortness_lab.analysis import bounds
from shortness_lab.errors import BudgetExceeded, GluingNotPlanar, EmbeddingInconsistent
from shortness_lab.graphs.blocks import (
    K4RegionDescriptor,
    LabeledBlock,
    T_COLORS,
    build_F10,
    build_F20,
    build_T,
)
from shortness_lab.graphs.graphcore import TriangleComplex, simplicial_vertices

logger = logging.getLogger(__name__)

DEFAULT_MAX_VERTICES = 10 ** 6

K_CERTIFICATES = ('exhaustive', 'supplied')


@dataclass(frozen=True)
class ArrangedBlock:
    g0: LabeledBlock
    j: int
    W: FrozenSet[int]
    O: Tuple[int, int, int]
    k: int
    k_certificate: str = 'supplied'
    k_evidence: Optional[str] = None

    def __post_init__(self):
        graph = self.g0.graph
        if self.j != graph.n_vertices:
            raise ValueError(f"j = {self.j} differs from the block order {graph.n_vertices}")
        if self.k < 1:
            raise ValueError(f"k must be at least 1, got {self.k}")
        if not self.W:
            raise ValueError("The white set of an arranged block must be non-empty")
        if not self.W <= simplicial_vertices(graph):
            raise ValueError("Every vertex of W must be simplicial")
        if any(graph.has_edge(a, b) for a, b in combinations(sorted(self.W), 2)):
            raise ValueError("W must be an independent set")
        if any(not graph.has_edge(a, b) for a, b in combinations(self.O, 2)):
            raise ValueError("O must induce a clique")
        if frozenset(self.O) not in {frozenset(face) for face in graph.faces}:
            raise ValueError(f"O = {self.O} is not a face of the block")
        if set(self.W) & set(self.O):
            raise ValueError("W and O must be disjoint")
        if self.k_certificate not in K_CERTIFICATES and not self.k_certificate.startswith('fan_formula('):
            raise ValueError(f"Unknown k certificate: {self.k_certificate}")
        if self.k_certificate == 'exhaustive' and not self.k_evidence:
            raise ValueError("An exhaustive k certificate must name the base case that verified it")

    @property
    def glue_face(self) -> Tuple[int, int, int]:
        """O in the block's face orientation, starting at O[0]."""
        face = next(face for face in self.g0.graph.faces if set(face) == set(self.O))
        start = face.index(self.O[0])
        return face[start:] + face[:start]


@dataclass(frozen=True)
class FamilyId:
    family: int
    n: int

    def __post_init__(self):
        if self.family not in (1, 2, 3):
            raise ValueError(f"Family must be 1, 2 or 3, got {self.family}")
        if self.n < 0:
            raise ValueError(f"Depth must be non-negative, got {self.n}")

    def __str__(self) -> str:
        return f"F{self.family},{self.n}"


@dataclass
class ExpansionTrace:
    """Where every vertex of the previous level went during one expansion.

    ``copies[w][v]`` is the id of block vertex ``v`` inside the copy that
    replaced white ``w``; ``holes[w]`` is the neighbour triangle of ``w``
    after renumbering.
    """

    vertex_map: Dict[int, int] = field(default_factory=dict)
    copies: Dict[int, Tuple[int, ...]] = field(default_factory=dict)
    holes: Dict[int, Tuple[int, int, int]] = field(default_factory=dict)


def arranged_F10() -> ArrangedBlock:
    block = build_F10()
    return ArrangedBlock(block, block.n_vertices, block.whites, block.outer_face,
                         bounds.fan_white_bound(10), 'fan_formula(10)')


def arranged_F20() -> ArrangedBlock:
    block = build_F20()
    return ArrangedBlock(block, block.n_vertices, block.whites, block.outer_face, 5, 'exhaustive',
                         'max_white_F20')


def hexagon_faces(hole: Tuple[int, int, int], outer: Tuple[int, int, int]) -> List[Tuple[int, int, int]]:
    """Faces triangulating the annulus between a hole and a copy's outer triangle.

    With the hole ``a`` in rotation order and the copy's outer face
    ``(p1, p2, p3)`` read backwards as ``q``, vertex ``a[i]`` is joined to
    ``q[i]`` and ``q[i+1]``.
    """
    p1, p2, p3 = outer
    q = (p1, p3, p2)
    faces = []
    for i in range(3):
        nxt = (i + 1) % 3
        faces.append((q[nxt], q[i], hole[i]))
        faces.append((hole[i], hole[nxt], q[nxt]))
    return faces


def hexagon_edges(hole: Tuple[int, int, int], outer: Tuple[int, int, int]) -> List[Tuple[int, int]]:
    p1, p2, p3 = outer
    q = (p1, p3, p2)
    return [(hole[i], q[(i + offset) % 3]) for i in range(3) for offset in (0, 1)]


def _sorted_by_label(g: LabeledBlock, vertices: Iterable[int]) -> List[int]:
    return sorted(vertices, key=lambda v: g.label(v))


def expand_once_traced(g_prev: LabeledBlock, block: ArrangedBlock,
                       whites: Optional[Iterable[int]] = None) -> Tuple[LabeledBlock, ExpansionTrace]:
    targets = _sorted_by_label(g_prev, g_prev.whites if whites is None else whites)
    complex_ = TriangleComplex.from_graph(g_prev.graph, g_prev.colors)
    g0 = block.g0
    outer = block.glue_face
    local_copies: Dict[int, Dict[int, int]] = {}
    local_holes: Dict[int, Tuple[int, int, int]] = {}
    for w in targets:
        if complex_.degree(w) != 3:
            raise GluingNotPlanar(f"White vertex {g_prev.label(w)} has degree {complex_.degree(w)}, expected 3")
        hole = complex_.star_hole(w)
        mapping = complex_.insert(g0.graph, g0.colors, f'{g_prev.label(w)}.', skip=outer)
        try:
            for face in hexagon_faces(hole, tuple(mapping[v] for v in outer)):
                complex_.add_face(face)
        except EmbeddingInconsistent as e:
            raise GluingNotPlanar(f"Hexagon around {g_prev.label(w)} does not close: {e}")
        local_copies[w] = mapping
        local_holes[w] = hole

    final_outer = g_prev.outer_face
    try:
        graph, colors, id_map = complex_.freeze(final_outer)
    except EmbeddingInconsistent as e:
        raise GluingNotPlanar(f"Expanded embedding is inconsistent: {e}")

    trace = ExpansionTrace()
    trace.vertex_map = {v: id_map[v] for v in g_prev.graph.vertices() if v in id_map}
    for w, mapping in local_copies.items():
        trace.copies[w] = tuple(id_map[mapping[v]] for v in g0.graph.vertices())
        trace.holes[w] = tuple(id_map[a] for a in local_holes[w])

    result = LabeledBlock.create(graph, colors, g_prev.name)
    logger.info("Expanded %d white vertices into %d vertices", len(targets), result.n_vertices)
    return result, trace


def expand_once(g_prev: LabeledBlock, block: ArrangedBlock,
                whites: Optional[Iterable[int]] = None) -> LabeledBlock:
    return expand_once_traced(g_prev, block, whites)[0]


def _replace_regions(g: LabeledBlock, regions: List[K4RegionDescriptor]) -> LabeledBlock:
    t_block = build_T()
    complex_ = TriangleComplex.from_graph(g.graph, g.colors)
    for region in sorted(regions, key=lambda r: g.label(r.white)):
        hole = complex_.star_hole(region.white)
        if set(hole) != set(region.outer):
            raise EmbeddingInconsistent(f"K4-region of {g.label(region.white)} does not match its neighbourhood")
        complex_.fill_hole(hole, t_block.graph, T_COLORS, f'{g.label(region.white)}.')
    outer = g.outer_face
    if any(not complex_.alive[v] for v in outer):
        outer = complex_.faces()[0]
    graph, colors, _ = complex_.freeze(outer)
    return LabeledBlock.create(graph, colors, g.name)


def replace_K4_with_T(g: LabeledBlock, region: K4RegionDescriptor) -> LabeledBlock:
    if region.white not in g.whites or g.graph.degree(region.white) != 3:
        raise ValueError(f"Vertex {region.white} is not the white vertex of a K4-region")
    return _replace_regions(g, [region])


def replace_all_K4_with_T(g: LabeledBlock) -> LabeledBlock:
    regions = list(g.k4regions)
    result = _replace_regions(g, regions)
    logger.info("Replaced %d K4-regions, %d vertices now", len(regions), result.n_vertices)
    return result


def _base_block(family: int) -> LabeledBlock:
    if family == 1:
        return build_F10()
    if family == 2:
        return build_F20()
    return build_T()


def check_order(fid: FamilyId, max_vertices: int = DEFAULT_MAX_VERTICES) -> int:
    size = bounds.f(fid.family, fid.n)
    if size > max_vertices:
        raise BudgetExceeded(f"{fid} has {size} vertices, above the limit of {max_vertices}")
    return size


def build_family_traced(fid: FamilyId, max_vertices: int = DEFAULT_MAX_VERTICES
                        ) -> Tuple[LabeledBlock, List[ExpansionTrace]]:
    size = check_order(fid, max_vertices)

    graph = _base_block(fid.family)
    traces: List[ExpansionTrace] = []
    if fid.family in (1, 2):
        block = arranged_F10() if fid.family == 1 else arranged_F20()
        for _ in range(fid.n):
            graph, trace = expand_once_traced(graph, block)
            traces.append(trace)
    else:
        for _ in range(fid.n):
            graph = replace_all_K4_with_T(graph)

    result = LabeledBlock(graph.graph, graph.colors, str(fid), graph.regions, graph.k4regions)
    if result.n_vertices != size:
        raise EmbeddingInconsistent(f"{fid} has {result.n_vertices} vertices, expected {size}")
    return result, traces


def build_family(fid: FamilyId, max_vertices: int = DEFAULT_MAX_VERTICES) -> LabeledBlock:
    return build_family_traced(fid, max_vertices)[0]
