"""
Executable forms of the toughness-preservation results used by the
constructions: gluing two graphs along vertex neighbourhoods, and replacing a
K4-region by a T-region. Each comes with a checker returning a three-valued
verdict and a seeded random harness; the hunt for counterexamples to the
weakened gluing hypothesis lives here too.
"""

import logging
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from multiprocessing import Pool
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from shortness_lab.analysis.oracle import SearchBudget, ToughnessReport, toughness_exact, toughness_search
from shortness_lab.errors import InvalidCrossEdge, NotFoundWithinBudget, VerificationFailed
from shortness_lab.graphs.assembly import hexagon_edges, replace_K4_with_T
from shortness_lab.graphs.blocks import K4RegionDescriptor, LabeledBlock, add_apex
from shortness_lab.graphs.exports import from_payload
from shortness_lab.graphs.generators import random_triangulation
from shortness_lab.graphs.graphcore import TriangleComplex, as_networkx, components_after_cut

logger = logging.getLogger(__name__)

HOLDS = 'holds'
NOT_APPLICABLE = 'not_applicable'
REFUTED = 'refuted'

HARNESS_T_CAP = Fraction(3, 2)
HARNESS_SIZE_CAP = 8


@dataclass(frozen=True, eq=False)
class GlueSpec:
    g1_plus: nx.Graph
    v1: Any
    g2_plus: nx.Graph
    v2: Any
    cross_edges: FrozenSet[Tuple[Any, Any]]

    def __post_init__(self):
        object.__setattr__(self, 'g1_plus', as_networkx(self.g1_plus))
        object.__setattr__(self, 'g2_plus', as_networkx(self.g2_plus))
        object.__setattr__(self, 'cross_edges', frozenset(tuple(edge) for edge in self.cross_edges))
        if self.v1 not in self.g1_plus:
            raise InvalidCrossEdge(f"v1 = {self.v1} is not a vertex of G1+")
        if self.v2 not in self.g2_plus:
            raise InvalidCrossEdge(f"v2 = {self.v2} is not a vertex of G2+")
        n1, n2 = self.n1, self.n2
        for a, b in self.cross_edges:
            if a not in n1 or b not in n2:
                raise InvalidCrossEdge(f"Cross edge ({a}, {b}) does not join N(v1) to N(v2)")

    @property
    def n1(self) -> FrozenSet[Any]:
        return frozenset(self.g1_plus.neighbors(self.v1))

    @property
    def n2(self) -> FrozenSet[Any]:
        return frozenset(self.g2_plus.neighbors(self.v2))

    def g1(self) -> nx.Graph:
        return _without(self.g1_plus, self.v1)

    def g2(self) -> nx.Graph:
        return _without(self.g2_plus, self.v2)


def _without(graph: nx.Graph, v: Any) -> nx.Graph:
    result = nx.Graph(graph)
    result.remove_node(v)
    result.graph.pop('outer_face', None)
    return result


def glue(spec: GlueSpec) -> nx.Graph:
    """(G1+ - v1) and (G2+ - v2) side by side, joined by the cross edges.

    Vertices of U are pairs (1, v) and (2, v).
    """
    union = nx.Graph()
    for side, graph in ((1, spec.g1()), (2, spec.g2())):
        union.add_nodes_from(((side, v), data) for v, data in graph.nodes(data=True))
        union.add_edges_from(((side, u), (side, v)) for u, v in graph.edges())
    union.add_edges_from(((1, a), (2, b)) for a, b in spec.cross_edges)
    return union


def min_bipartite_degree(spec: GlueSpec) -> int:
    degree: Dict[Tuple[int, Any], int] = {(1, a): 0 for a in spec.n1}
    degree.update({(2, b): 0 for b in spec.n2})
    for a, b in spec.cross_edges:
        degree[(1, a)] += 1
        degree[(2, b)] += 1
    return min(degree.values()) if degree else 0


def _graph_payload(graph: nx.Graph) -> Dict[str, Any]:
    return {"nodes": sorted(graph.nodes), "edges": sorted(tuple(sorted(edge)) for edge in graph.edges())}


def _graph_from_payload(data: Dict[str, Any]) -> nx.Graph:
    if "rotation" in data:
        return from_payload(data).to_networkx()
    graph = nx.Graph()
    graph.add_nodes_from(data.get("nodes", []))
    graph.add_edges_from(tuple(edge) for edge in data.get("edges", []))
    return graph


def spec_to_payload(spec: GlueSpec) -> Dict[str, Any]:
    return {
        "g1_plus": _graph_payload(spec.g1_plus),
        "v1": spec.v1,
        "g2_plus": _graph_payload(spec.g2_plus),
        "v2": spec.v2,
        "cross_edges": sorted([a, b] for a, b in spec.cross_edges),
    }


def spec_from_payload(data: Dict[str, Any]) -> GlueSpec:
    missing = [key for key in ("g1_plus", "v1", "g2_plus", "v2", "cross_edges") if key not in data]
    if missing:
        raise ValueError(f"Glue spec is missing fields: {', '.join(missing)}")
    return GlueSpec(_graph_from_payload(data["g1_plus"]), data["v1"],
                    _graph_from_payload(data["g2_plus"]), data["v2"],
                    frozenset(tuple(edge) for edge in data["cross_edges"]))


def _value(report: ToughnessReport) -> Optional[Fraction]:
    return report.value


def _at_least(value: Optional[Fraction], t: Fraction) -> bool:
    return value is None or value >= t


def _format(value: Optional[Fraction]) -> str:
    return 'infinite' if value is None else str(value)


@dataclass(frozen=True)
class GlueVerdict:
    status: str
    t: Fraction
    toughness: Dict[str, Optional[Fraction]]
    min_degree: int

    @property
    def required_degree(self) -> int:
        return math.ceil(self.t)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status,
            "t": str(self.t),
            "toughness": {name: _format(value) for name, value in self.toughness.items()},
            "min_degree": self.min_degree,
            "required_degree": self.required_degree,
        }


def check_glue_preservation(spec: GlueSpec, t: Any, budget: Optional[SearchBudget] = None) -> GlueVerdict:
    """Evaluate the gluing implication on one instance with exact toughness values."""
    t = Fraction(t)
    values = {
        'g1_plus': _value(toughness_exact(spec.g1_plus, budget, reduction='none')),
        'g1': _value(toughness_exact(spec.g1(), budget, reduction='none')),
        'g2_plus': _value(toughness_exact(spec.g2_plus, budget, reduction='none')),
        'g2': _value(toughness_exact(spec.g2(), budget, reduction='none')),
        'u': _value(toughness_exact(glue(spec), budget, reduction='none')),
    }
    degree = min_bipartite_degree(spec)
    hypotheses = all(_at_least(values[name], t) for name in ('g1_plus', 'g1', 'g2_plus', 'g2'))
    if not hypotheses or degree < math.ceil(t):
        status = NOT_APPLICABLE
    elif _at_least(values['u'], t):
        status = HOLDS
    else:
        status = REFUTED
        logger.error("Gluing refuted at t=%s: U has toughness %s", t, values['u'])
    return GlueVerdict(status, t, values, degree)


def _component_count(graph: nx.Graph, removed: Iterable[Any]) -> int:
    removed = set(removed)
    return nx.number_connected_components(graph.subgraph(v for v in graph.nodes if v not in removed))


def cut_inequality_holds(spec: GlueSpec, cut: Iterable[Any]) -> bool:
    """c(U - X) <= c(G1 - X1) + c(G2 - X2) for a cut X of U."""
    cut = set(cut)
    left = {v for side, v in cut if side == 1}
    right = {v for side, v in cut if side == 2}
    return _component_count(glue(spec), cut) <= _component_count(spec.g1(), left) + _component_count(spec.g2(), right)


def _cross_edges(rng: random.Random, n1: Sequence[Any], n2: Sequence[Any], degree: int) -> FrozenSet[Tuple[Any, Any]]:
    edges = set()
    for a in n1:
        for b in rng.sample(list(n2), min(degree, len(n2))):
            edges.add((a, b))
    for b in n2:
        have = sum(1 for a in n1 if (a, b) in edges)
        spare = [a for a in n1 if (a, b) not in edges]
        for a in rng.sample(spare, max(0, min(degree - have, len(spare)))):
            edges.add((a, b))
    extra = rng.randrange(0, 3)
    for _ in range(extra):
        edges.add((rng.choice(list(n1)), rng.choice(list(n2))))
    return frozenset(edges)


def random_glue_instance(seed: int, size_cap: int = HARNESS_SIZE_CAP,
                         t_cap: Fraction = HARNESS_T_CAP) -> Tuple[GlueSpec, Fraction]:
    """Two random triangulations, a vertex of each, and cross edges meeting the degree hypothesis.

    The threshold is the smallest toughness among G1+, G1, G2+, G2, capped at
    ``t_cap``, so the hypotheses on the four graphs hold by construction.
    """
    rng = random.Random(seed)
    sides = []
    for _ in range(2):
        graph = random_triangulation(rng.randint(4, size_cap), seed=rng.randrange(2 ** 31)).to_networkx()
        sides.append((graph, rng.choice(sorted(graph.nodes))))
    (g1_plus, v1), (g2_plus, v2) = sides
    values = [toughness_exact(graph, reduction='none').value
              for graph in (g1_plus, _without(g1_plus, v1), g2_plus, _without(g2_plus, v2))]
    t = min([t_cap] + [value for value in values if value is not None])
    n1 = sorted(g1_plus.neighbors(v1))
    n2 = sorted(g2_plus.neighbors(v2))
    spec = GlueSpec(g1_plus, v1, g2_plus, v2, _cross_edges(rng, n1, n2, math.ceil(t)))
    return spec, t


def _harness_instance(args: Tuple[int, int, int]) -> Dict[str, Any]:
    seed, size_cap, cuts = args
    spec, t = random_glue_instance(seed, size_cap)
    verdict = check_glue_preservation(spec, t)
    union = glue(spec)
    nodes = sorted(union.nodes)
    rng = random.Random(seed + 1)
    failures = 0
    for _ in range(cuts):
        size = rng.randint(1, max(1, len(nodes) - 2))
        if not cut_inequality_holds(spec, rng.sample(nodes, size)):
            failures += 1
    return {"seed": seed, "status": verdict.status, "t": str(t), "cut_failures": failures}


@dataclass
class GlueHarnessReport:
    instances: int = 0
    holds: int = 0
    not_applicable: int = 0
    refuted: List[int] = field(default_factory=list)
    cut_checks: int = 0
    cut_failures: List[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.refuted and not self.cut_failures


def run_glue_harness(instances: int = 200, seed: int = 0, cuts: int = 100, size_cap: int = HARNESS_SIZE_CAP,
                     threads: int = 1) -> GlueHarnessReport:
    tasks = [(seed + i, size_cap, cuts) for i in range(instances)]
    if threads > 1:
        with Pool(processes=threads) as pool:
            results = pool.map(_harness_instance, tasks)
    else:
        results = [_harness_instance(task) for task in tasks]

    report = GlueHarnessReport(instances=instances, cut_checks=instances * cuts)
    for result in results:
        if result["status"] == HOLDS:
            report.holds += 1
        elif result["status"] == NOT_APPLICABLE:
            report.not_applicable += 1
        else:
            report.refuted.append(result["seed"])
        if result["cut_failures"]:
            report.cut_failures.append(result["seed"])
    logger.info("Gluing harness: %d holds, %d not applicable, %d refuted",
                report.holds, report.not_applicable, len(report.refuted))
    return report


def hexagon_glue_spec(block: LabeledBlock, white: int) -> GlueSpec:
    """Gluing that reproduces one expansion step: the block with ``white`` against its apex extension."""
    plus = add_apex(block)
    hole = TriangleComplex.from_graph(block.graph, block.colors).star_hole(white)
    cross = hexagon_edges(hole, block.outer_face)
    return GlueSpec(block.to_networkx(), white, plus.to_networkx(), plus.vertex('x'), frozenset(cross))


@dataclass(frozen=True)
class WeakLemmaCounterexample:
    spec: GlueSpec
    t: Fraction
    toughness: Dict[str, Optional[Fraction]]
    cut: Tuple[Any, ...]
    components: int
    statistics: Dict[str, Any]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": str(self.t),
            "toughness": {name: _format(value) for name, value in self.toughness.items()},
            "cut": [list(v) for v in self.cut],
            "components": self.components,
            "statistics": self.statistics,
            "spec": spec_to_payload(self.spec),
        }


def _candidate_pool(t: Fraction, size_cap: int, seed: int) -> List[Tuple[nx.Graph, Any]]:
    graphs = [nx.complete_graph(4), nx.complete_graph(5)]
    rng = random.Random(seed)
    for n in range(5, size_cap + 1):
        for _ in range(2):
            graphs.append(nx.Graph(random_triangulation(n, seed=rng.randrange(2 ** 31)).to_networkx()))
    pool = []
    for graph in graphs:
        if graph.number_of_nodes() > size_cap:
            continue
        if not _at_least(toughness_exact(graph, reduction='none').value, t):
            continue
        complete = graph.number_of_edges() == graph.number_of_nodes() * (graph.number_of_nodes() - 1) // 2
        for v in (sorted(graph.nodes)[:1] if complete else sorted(graph.nodes)):
            if _at_least(toughness_exact(_without(graph, v), reduction='none').value, t):
                pool.append((graph, v))
    pool.sort(key=lambda item: item[0].number_of_nodes())
    return pool


def _covering_sets(n1: Sequence[Any], n2: Sequence[Any]) -> Iterator[FrozenSet[Tuple[Any, Any]]]:
    """Cross-edge sets touching every vertex of both sides, sparsest first."""
    pairs = list(product(n1, n2))
    for size in range(max(len(n1), len(n2)), len(pairs) + 1):
        for chosen in combinations(pairs, size):
            if {a for a, _ in chosen} == set(n1) and {b for _, b in chosen} == set(n2):
                yield frozenset(chosen)


def find_weak_lemma_counterexample(t: Any = Fraction(3, 2), size_cap: int = 12,
                                   budget: Optional[SearchBudget] = None, seed: int = 0) -> WeakLemmaCounterexample:
    """Search for a gluing that is t-tough on both sides with every neighbour covered, yet U is not t-tough.

    Only the weaker covering condition (each vertex of N(v1) and N(v2) meets a
    cross edge) is imposed; for t <= 1 it coincides with the degree condition
    of the gluing result and the search cannot succeed.
    """
    t = Fraction(t)
    budget = budget or SearchBudget()
    started = time.monotonic()
    pool = _candidate_pool(t, size_cap, seed)
    stats: Dict[str, Any] = {"pool": len(pool), "pairs": 0, "cross_sets": 0, "exhausted": False}

    def out_of_budget() -> bool:
        if budget.nodes is not None and stats["cross_sets"] >= budget.nodes:
            return True
        return budget.seconds is not None and time.monotonic() - started > budget.seconds

    for (g1_plus, v1), (g2_plus, v2) in product(pool, repeat=2):
        stats["pairs"] += 1
        n1 = sorted(g1_plus.neighbors(v1))
        n2 = sorted(g2_plus.neighbors(v2))
        for cross in _covering_sets(n1, n2):
            if out_of_budget():
                stats["seconds"] = round(time.monotonic() - started, 3)
                raise NotFoundWithinBudget(f"No counterexample for t={t} within the budget", stats)
            stats["cross_sets"] += 1
            spec = GlueSpec(g1_plus, v1, g2_plus, v2, cross)
            report = toughness_search(glue(spec), t)
            if report.kind != 'violation':
                continue
            stats["seconds"] = round(time.monotonic() - started, 3)
            found = _reverify(spec, t, report, stats)
            logger.info("Counterexample for t=%s after %d cross-edge sets", t, stats["cross_sets"])
            return found

    stats["exhausted"] = True
    stats["seconds"] = round(time.monotonic() - started, 3)
    raise NotFoundWithinBudget(f"Searched every candidate pair up to {size_cap} vertices without a counterexample for t={t}", stats)


def _reverify(spec: GlueSpec, t: Fraction, report: ToughnessReport, stats: Dict[str, Any]) -> WeakLemmaCounterexample:
    values = {
        'g1_plus': toughness_exact(spec.g1_plus, reduction='none').value,
        'g1': toughness_exact(spec.g1(), reduction='none').value,
        'g2_plus': toughness_exact(spec.g2_plus, reduction='none').value,
        'g2': toughness_exact(spec.g2(), reduction='none').value,
    }
    for name, value in values.items():
        if not _at_least(value, t):
            raise VerificationFailed(f"{name} has toughness {value}, below {t}")
    union = glue(spec)
    cut = tuple(report.cut)
    count, _ = components_after_cut(union, cut)
    if count < 2 or Fraction(len(cut), count) >= t:
        raise VerificationFailed(f"Cut {cut} does not show U below {t}-toughness")
    values['u'] = toughness_exact(union, reduction='none').value
    return WeakLemmaCounterexample(spec, t, values, cut, count, dict(stats))


@dataclass(frozen=True)
class ReplacementVerdict:
    status: str
    before: Optional[Fraction]
    after: Optional[Fraction]

    def to_dict(self) -> Dict[str, Any]:
        return {"status": self.status, "before": _format(self.before),
                "after": None if self.status == NOT_APPLICABLE else _format(self.after)}


def check_constr3_preservation(g: LabeledBlock, region: K4RegionDescriptor,
                               budget: Optional[SearchBudget] = None) -> ReplacementVerdict:
    """Toughness above 1 survives replacing a K4-region by T."""
    before = toughness_exact(g, budget).value
    if before is not None and before <= 1:
        return ReplacementVerdict(NOT_APPLICABLE, before, None)
    after = toughness_exact(replace_K4_with_T(g, region), budget).value
    status = HOLDS if after is None or after > 1 else REFUTED
    if status == REFUTED:
        logger.error("K4 replacement refuted: toughness %s became %s", before, after)
    return ReplacementVerdict(status, before, after)


def run_constr3_harness(instances: int = 20, seed: int = 0, sizes: Tuple[int, int] = (5, 8),
                        budget: Optional[SearchBudget] = None) -> List[ReplacementVerdict]:
    """Random triangulations with toughness above 1 and a K4-region, one replacement each."""
    rng = random.Random(seed)
    verdicts: List[ReplacementVerdict] = []
    attempts = 0
    while len(verdicts) < instances:
        attempts += 1
        if attempts > 50 * instances:
            raise NotFoundWithinBudget(f"Only {len(verdicts)} suitable triangulations in {attempts} attempts",
                                       {"attempts": attempts, "found": len(verdicts)})
        block = random_triangulation(rng.randint(*sizes), seed=rng.randrange(2 ** 31))
        if not block.k4regions:
            continue
        value = toughness_exact(block, budget).value
        if value is not None and value <= 1:
            continue
        verdicts.append(check_constr3_preservation(block, rng.choice(block.k4regions), budget))
    return verdicts
