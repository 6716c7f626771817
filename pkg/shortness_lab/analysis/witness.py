"""
Explicit long cycles and paths in the three families, and longest-cycle
certificates combining them with the analytic upper bounds.

Families 1 and 2 start from a base cycle of the block through an outer-face
edge; at every expansion each white vertex on the cycle is replaced by the
base cycle of its copy, opened at that outer edge and spliced in through the
hexagon. Family 3 cycles are assembled from the recursive region paths.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from shortness_lab.analysis import bounds
from shortness_lab.analysis.oracle import (
    CycleWitness,
    PathWitness,
    SearchBudget,
    longest_cycle_exact,
    longest_cycle_with_outer_edges,
    max_white_cycle,
)
from shortness_lab.errors import BaseCaseUnverified, ConstructionFailed, NotApplicable, VerificationFailed
from shortness_lab.graphs.assembly import (
    DEFAULT_MAX_VERTICES,
    ArrangedBlock,
    FamilyId,
    arranged_F10,
    arranged_F20,
    build_family,
    build_family_traced,
    hexagon_edges,
)
from shortness_lab.graphs.blocks import LabeledBlock, TRegionDescriptor, build_F20, build_fan, build_T
from shortness_lab.graphs.graphcore import as_networkx

logger = logging.getLogger(__name__)

FAN_RADIUS = 10


def verify_witness(G: Any, w: Union[CycleWitness, PathWitness]) -> bool:
    graph = as_networkx(G)
    seq = w.vertices
    if len(set(seq)) != len(seq) or any(v not in graph for v in seq):
        return False
    return all(graph.has_edge(u, v) for u, v in w.edges())


def outer_edge_count(G: Any, w: CycleWitness) -> int:
    graph = as_networkx(G)
    outer = graph.graph.get('outer_face')
    if outer is None:
        raise NotApplicable("The graph has no outer face")
    a, b, c = outer
    sides = {frozenset((a, b)), frozenset((b, c)), frozenset((c, a))}
    return sum(1 for u, v in w.edges() if frozenset((u, v)) in sides)


def _roles(region: TRegionDescriptor, start: int, end: int) -> Tuple[int, int, int]:
    a = region.outer.index(start)
    c = region.outer.index(end)
    if a == c:
        raise ValueError("Region paths need two distinct outer vertices")
    return a, 3 - a - c, c


def region_full_path(region: TRegionDescriptor, start: int, end: int) -> List[int]:
    """Path through all nine vertices of a T-region between two outer vertices."""
    a, b, c = _roles(region, start, end)
    o, g, w = region.outer, region.greys, region.whites
    return [o[a], w[b], g[b], g[c], w[c], o[b], w[a], g[a], o[c]]


def region_partial_path(region: TRegionDescriptor, start: int, end: int) -> List[int]:
    """Path through seven vertices of a T-region, skipping the third outer vertex and its far white."""
    a, b, c = _roles(region, start, end)
    o, g, w = region.outer, region.greys, region.whites
    return [o[a], w[c], g[c], g[b], g[a], w[a], o[c]]


def fan_cycle(block: LabeledBlock, r: int) -> CycleWitness:
    """A cycle through 2r + 2 whites of the r-fan: two regions fully, the rest partially."""
    v = block.vertex
    hub = v('c')
    hub_prime = v("c'")
    black = [v(f'b{j}') for j in range(2 * r)]
    blue = [v(f'u{j}') for j in range(2 * r)]
    by_outer = {frozenset(region.outer): region for region in block.regions}

    def region(i: int) -> TRegionDescriptor:
        return by_outer[frozenset((hub, black[2 * i], black[2 * i + 1]))]

    seq = region_full_path(region(0), hub, black[0]) + [blue[0]]
    for i in range(1, r - 1):
        seq += [blue[2 * i - 1]] + region_partial_path(region(i), black[2 * i], black[2 * i + 1]) + [blue[2 * i]]
    seq += [blue[2 * r - 3], blue[2 * r - 2], hub_prime, blue[2 * r - 1]]
    seq += region_full_path(region(r - 1), black[2 * r - 1], hub)[:-1]
    return CycleWitness(tuple(seq))


def _F20_regions(block: LabeledBlock) -> Tuple[TRegionDescriptor, TRegionDescriptor]:
    first, second = sorted(block.regions, key=lambda region: block.label(region.greys[0]))
    return first, second


def F20_cycle(block: LabeledBlock) -> CycleWitness:
    """Fourteen vertices: all of one T-region and seven of the other, five whites."""
    a_region, b_region = _F20_regions(block)
    o1, o3 = block.vertex('o1'), block.vertex('o3')
    seq = region_full_path(a_region, o1, o3) + region_partial_path(b_region, o3, o1)[1:-1]
    return CycleWitness(tuple(seq))


def F20_path(block: LabeledBlock) -> PathWitness:
    a_region, b_region = _F20_regions(block)
    o1, o2, o3 = (block.vertex(label) for label in ('o1', 'o2', 'o3'))
    i1, i2, i3 = (b_region.outer.index(o) for o in (o1, o2, o3))
    g, w = b_region.greys, b_region.whites
    seq = [w[i3], g[i3], g[i1], w[i1]] + region_full_path(a_region, o2, o1) + [g[i2], w[i2]]
    return PathWitness(tuple(seq))


@dataclass(frozen=True)
class RegionLeaf:
    white: int
    outer: FrozenSet[int]


@dataclass(frozen=True)
class RegionNode:
    """A T-shaped region of a family-3 graph; child i sits in (o_j, o_k, g_i)."""

    outer: Tuple[int, int, int]
    greys: Tuple[int, int, int]
    children: Tuple[Union[RegionLeaf, 'RegionNode'], ...]

    def index(self, v: int) -> int:
        return self.outer.index(v)


def region_tree(block: LabeledBlock, prefix: str = '') -> RegionNode:
    graph = block.graph
    adjacency = graph.adjacency
    try:
        greys = tuple(graph.vertex_by_label(f'{prefix}g{i}') for i in (1, 2, 3))
    except KeyError:
        raise NotApplicable(f"{block.name or 'graph'} has no region with prefix {prefix!r}")
    outer = []
    for i in range(3):
        j, k = [m for m in range(3) if m != i]
        common = (adjacency[greys[j]] & adjacency[greys[k]]) - {greys[i]}
        if len(common) != 1:
            raise NotApplicable(f"Greys of region {prefix!r} do not determine its outer triangle")
        outer.append(next(iter(common)))
    children = []
    for i in range(3):
        label = f'{prefix}w{i + 1}'
        if label in graph.label_index:
            white = graph.vertex_by_label(label)
            children.append(RegionLeaf(white, frozenset(adjacency[white])))
        else:
            children.append(region_tree(block, f'{label}.'))
    return RegionNode(tuple(outer), greys, tuple(children))


def _long_path(region: Union[RegionLeaf, RegionNode], x: int, z: int) -> List[int]:
    """Path x -> z through every vertex of the region (s1-type)."""
    if isinstance(region, RegionLeaf):
        (y,) = region.outer - {x, z}
        return [x, region.white, y, z]
    a, c = region.index(x), region.index(z)
    b = 3 - a - c
    o, g, ch = region.outer, region.greys, region.children
    return _short_path(ch[b], o[a], g[b]) + _short_path(ch[c], g[c], o[b]) + _long_path(ch[a], o[b], o[c])[1:]


def _short_path(region: Union[RegionLeaf, RegionNode], x: int, z: int) -> List[int]:
    """Path x -> z avoiding the third outer vertex (s2-type)."""
    if isinstance(region, RegionLeaf):
        return [x, region.white, z]
    a, c = region.index(x), region.index(z)
    b = 3 - a - c
    o, g, ch = region.outer, region.greys, region.children
    return _short_path(ch[c], o[a], g[c]) + [g[b]] + _short_path(ch[a], g[a], o[c])


def s_profile_witnesses(block: LabeledBlock) -> Tuple[CycleWitness, CycleWitness, CycleWitness]:
    """Cycles realising (s0, s1, s2): no, exactly one and exactly two outer-face edges."""
    node = region_tree(block)
    o, ch = node.outer, node.children
    s0 = _long_path(ch[0], o[1], o[2]) + _long_path(ch[1], o[2], o[0])[1:] + _long_path(ch[2], o[0], o[1])[1:-1]
    s1 = _long_path(node, o[0], o[2])
    s2 = _short_path(node, o[0], o[2]) + [o[1]]
    return CycleWitness(tuple(s0)), CycleWitness(tuple(s1)), CycleWitness(tuple(s2))


def _F31_path(block: LabeledBlock) -> PathWitness:
    node = region_tree(block)
    o, g = node.outer, node.greys
    first, second, third = node.children
    if not all(isinstance(child, RegionNode) for child in node.children):
        raise NotApplicable("The spanning path construction needs depth 1")

    def white(child: RegionNode, m: int) -> int:
        return child.children[m].white

    a1 = first.index(o[2])
    b1, c1 = [m for m in range(3) if m != a1]
    a3 = third.index(o[0])
    b3, c3 = third.index(g[2]), third.index(o[1])
    seq = ([white(first, b1), first.greys[b1], first.greys[c1], white(first, c1)]
           + _long_path(second, o[2], g[1])
           + [g[0], white(first, a1), first.greys[a1], o[1], white(third, a3), third.greys[a3], g[2]]
           + [white(third, c3), third.greys[c3], third.greys[b3], white(third, b3)])
    return PathWitness(tuple(seq))


def _base_cycle(family: int, block: LabeledBlock) -> CycleWitness:
    if family == 1:
        return fan_cycle(block, FAN_RADIUS)
    return F20_cycle(block)


def _open_at_outer_edge(block: LabeledBlock, cycle: Sequence[int]) -> List[int]:
    sides = block.graph.outer_edges()
    size = len(cycle)
    for i in range(size):
        if frozenset((cycle[i], cycle[(i + 1) % size])) in sides:
            return list(cycle[i + 1:]) + list(cycle[:i + 1])
    raise ConstructionFailed("The base cycle uses no outer-face edge")


def family_witness(fid: FamilyId, max_vertices: int = DEFAULT_MAX_VERTICES) -> Tuple[LabeledBlock, CycleWitness]:
    """Build F_{i,n} together with a cycle of c_i(n) vertices in it."""
    if fid.family == 3:
        graph = build_family(fid, max_vertices)
        witness = s_profile_witnesses(graph)[0]
    else:
        graph, traces = build_family_traced(fid, max_vertices)
        arranged = arranged_F10() if fid.family == 1 else arranged_F20()
        g0 = arranged.g0
        base = _base_cycle(fid.family, g0)
        opened = _open_at_outer_edge(g0, base.vertices)
        cycle = list(base.vertices)
        for trace in traces:
            spliced: List[int] = []
            size = len(cycle)
            for pos, v in enumerate(cycle):
                if v not in trace.copies:
                    spliced.append(trace.vertex_map[v])
                    continue
                copy = trace.copies[v]
                prev = trace.vertex_map[cycle[pos - 1]]
                nxt = trace.vertex_map[cycle[(pos + 1) % size]]
                joins = {frozenset(edge) for edge in hexagon_edges(trace.holes[v], tuple(copy[x] for x in g0.outer_face))}
                path = [copy[x] for x in opened]
                for candidate in (path, path[::-1]):
                    if frozenset((prev, candidate[0])) in joins and frozenset((candidate[-1], nxt)) in joins:
                        spliced.extend(candidate)
                        break
                else:
                    raise ConstructionFailed(f"No hexagon matching splices the copy replacing vertex {v}")
            cycle = spliced
        witness = CycleWitness(tuple(cycle))

    expected = bounds.c(fid.family, fid.n)
    if len(witness) != expected or not verify_witness(graph, witness):
        raise ConstructionFailed(f"Witness for {fid} has {len(witness)} vertices, expected a valid cycle of {expected}")
    logger.info("Built a %d-vertex cycle witness in %s", len(witness), fid)
    return graph, witness


def build_cycle_witness(fid: FamilyId, max_vertices: int = DEFAULT_MAX_VERTICES) -> CycleWitness:
    return family_witness(fid, max_vertices)[1]


def build_path_witness(fid: FamilyId) -> PathWitness:
    if (fid.family, fid.n) == (2, 0):
        return F20_path(build_F20())
    if (fid.family, fid.n) == (3, 0):
        graph = build_T()
        node = region_tree(graph)
        return PathWitness(tuple(_long_path(node, node.outer[0], node.outer[2])))
    if (fid.family, fid.n) == (3, 1):
        return _F31_path(build_family(fid))
    raise NotApplicable(f"No path construction for {fid}")


# Observed value each exhaustive base case must reproduce.
EXPECTED_BASE_CASES: Dict[str, Any] = {
    'max_white_F20': 5,
    'outer_edge_F20': 14,
    'fan_r2': 6,
    'fan_r3': 8,
    'outer_edge_F10': 94,
    's_profile_T': (9, 9, 8),
    's_profile_F31': (24, 22, 16),
}

REQUIRED_BASE_CASES = {
    1: ('fan_r2', 'fan_r3', 'outer_edge_F10'),
    2: ('max_white_F20', 'outer_edge_F20'),
    3: ('s_profile_T', 's_profile_F31'),
}


@dataclass
class BaseCaseLedger:
    observed: Dict[str, Any] = field(default_factory=dict)

    def record(self, name: str, value: Any) -> None:
        if name not in EXPECTED_BASE_CASES:
            raise KeyError(f"Unknown base case: {name}")
        self.observed[name] = value

    def require(self, names: Iterable[str]) -> Dict[str, Any]:
        missing = [name for name in names if name not in self.observed]
        if missing:
            raise BaseCaseUnverified(f"Base cases not verified yet: {', '.join(missing)}")
        wrong = [name for name in names if self.observed[name] != EXPECTED_BASE_CASES[name]]
        if wrong:
            raise BaseCaseUnverified(f"Base cases disagree with their expected values: {', '.join(wrong)}")
        return {name: self.observed[name] for name in names}

    def confirm_arranged_block(self, block: ArrangedBlock) -> None:
        """Check that an exhaustively certified k was actually observed."""
        if block.k_certificate != 'exhaustive':
            return
        self.require([block.k_evidence])
        if self.observed[block.k_evidence] != block.k:
            raise BaseCaseUnverified(
                f"Arranged block claims k = {block.k} but {block.k_evidence} observed {self.observed[block.k_evidence]}")


def _s_profile(block: LabeledBlock, budget: Optional[SearchBudget]) -> Tuple[int, int, int]:
    s0, s1, s2 = s_profile_witnesses(block)
    length, _ = longest_cycle_exact(block, budget, incumbent=s0.vertices)
    one = longest_cycle_with_outer_edges(block, 1, budget, incumbent=s1.vertices)
    two = longest_cycle_with_outer_edges(block, 2, budget, incumbent=s2.vertices)
    return length, one, two


def _run_base_case(name: str, budget: Optional[SearchBudget]) -> Any:
    if name == 'max_white_F20':
        return max_white_cycle(build_F20(), budget)[0]
    if name == 'outer_edge_F20':
        block = build_F20()
        return longest_cycle_with_outer_edges(block, 2, budget, incumbent=F20_cycle(block).vertices)
    if name == 'fan_r2':
        block = build_fan(2)
        return max_white_cycle(block, budget, incumbent=fan_cycle(block, 2).vertices, use_region_bound=False)[0]
    if name == 'fan_r3':
        block = build_fan(3)
        return max_white_cycle(block, budget, incumbent=fan_cycle(block, 3).vertices)[0]
    if name == 'outer_edge_F10':
        block = arranged_F10().g0
        return longest_cycle_with_outer_edges(block, 1, budget, incumbent=fan_cycle(block, FAN_RADIUS).vertices)
    if name == 's_profile_T':
        return _s_profile(build_T(), budget)
    if name == 's_profile_F31':
        return _s_profile(build_family(FamilyId(3, 1)), budget)
    raise KeyError(f"Unknown base case: {name}")


def verify_base_cases(budget: Optional[SearchBudget] = None, ledger: Optional[BaseCaseLedger] = None,
                      names: Optional[Iterable[str]] = None) -> BaseCaseLedger:
    """Run the exhaustive base-case searches and record what they found.

    Raises VerificationFailed as soon as a search disagrees with the value the
    certificates rely on; BudgetExceeded propagates unchanged.
    """
    ledger = ledger if ledger is not None else BaseCaseLedger()
    for name in (EXPECTED_BASE_CASES if names is None else names):
        value = _run_base_case(name, budget)
        ledger.record(name, value)
        logger.info("Base case %s = %s", name, value)
        if value != EXPECTED_BASE_CASES[name]:
            raise VerificationFailed(f"Base case {name} gave {value}, expected {EXPECTED_BASE_CASES[name]}")
    return ledger


@dataclass(frozen=True)
class BoundCertificate:
    graph: str
    bound: int
    derivation: str
    witness: CycleWitness
    conditional_on: str
    base_cases: Dict[str, Any]

    def to_payload(self) -> Dict[str, Any]:
        return {
            "graph": self.graph,
            "bound": self.bound,
            "derivation": self.derivation,
            "conditional_on": self.conditional_on,
            "base_cases": {name: list(value) if isinstance(value, tuple) else value
                           for name, value in self.base_cases.items()},
            "witness": list(self.witness.vertices),
        }


def _analytic_bound(fid: FamilyId) -> Tuple[int, str, str]:
    if fid.family == 1:
        if fid.n == 0:
            return bounds.fan_cycle_bound(FAN_RADIUS), f'fan_count({FAN_RADIUS})', 'fan white-vertex count'
        j, w_size, k = bounds.ARRANGED_PARAMETERS[1]
        return (bounds.lemma_cyc_bound(j, w_size, k, fid.n), f'arranged_block(k={k}, n={fid.n})',
                'arranged-block cycle bound with k from the fan count')
    if fid.family == 2:
        j, w_size, k = bounds.ARRANGED_PARAMETERS[2]
        return (bounds.lemma_cyc_bound(j, w_size, k, fid.n), f'arranged_block(k={k}, n={fid.n})',
                'arranged-block cycle bound with exhaustive k')
    return bounds.s_values(fid.n)[0], f's_recurrence({fid.n})', 'region recurrence for (s0, s1, s2)'


def certify_longest_cycle(fid: FamilyId, ledger: BaseCaseLedger,
                          max_vertices: int = DEFAULT_MAX_VERTICES) -> BoundCertificate:
    base_cases = ledger.require(REQUIRED_BASE_CASES[fid.family])
    if fid.family == 2:
        ledger.confirm_arranged_block(arranged_F20())
    bound, derivation, conditional_on = _analytic_bound(fid)
    _, witness = family_witness(fid, max_vertices)
    if len(witness) != bound:
        raise ConstructionFailed(f"{fid}: analytic bound {bound} differs from witness length {len(witness)}")
    return BoundCertificate(str(fid), bound, derivation, witness, conditional_on, base_cases)
