"""
Exact desk-scale solvers.

Graphs are converted once into bitmask adjacency (vertex ``i`` of the sorted
node list is bit ``i``). The cycle and path searches are depth-first
branch-and-bound; toughness is computed by cut enumeration, optionally over
canonical cuts of the T-regions only. Every search runs under a
:class:`SearchBudget` and reports budget exhaustion instead of truncating
silently.
"""

import logging
import time
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations
from multiprocessing import Pool, Value
from multiprocessing import TimeoutError as PoolTimeout
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from shortness_lab.errors import (
    BudgetExceeded,
    NoSimplicialVertex,
    NoSuchCycle,
    NotApplicable,
    ReductionUnsound,
    VerificationFailed,
)
from shortness_lab.graphs.blocks import WHITE, LabeledBlock, TRegionDescriptor
from shortness_lab.graphs.graphcore import (
    VertexCut,
    as_networkx,
    components_after_cut,
    simplicial_vertices,
)

logger = logging.getLogger(__name__)

DEFAULT_NODE_LIMIT = 10 ** 7
DEFAULT_SECONDS = 60.0

# Above this order toughness_exact switches to canonical T-region cuts when it can.
REDUCTION_MIN_ORDER = 18


@dataclass(frozen=True)
class SearchBudget:
    nodes: Optional[int] = DEFAULT_NODE_LIMIT
    seconds: Optional[float] = DEFAULT_SECONDS
    seed: Optional[int] = None

    def __post_init__(self):
        if self.nodes is not None and self.nodes <= 0:
            raise ValueError(f"Node budget must be positive, got {self.nodes}")
        if self.seconds is not None and self.seconds <= 0:
            raise ValueError(f"Time budget must be positive, got {self.seconds}")

    @classmethod
    def unlimited(cls) -> 'SearchBudget':
        return cls(None, None)

    def describe(self) -> str:
        nodes = 'unlimited' if self.nodes is None else f'{self.nodes} nodes'
        seconds = 'unlimited' if self.seconds is None else f'{self.seconds:g} s'
        return f'{nodes}, {seconds}'


class _OutOfBudget(Exception):
    pass


class _Done(Exception):
    pass


class _Meter:

    def __init__(self, budget: Optional[SearchBudget]):
        self.budget = budget or SearchBudget()
        self.nodes = 0
        self.started = time.monotonic()

    def tick(self) -> None:
        self.nodes += 1
        if self.budget.nodes is not None and self.nodes > self.budget.nodes:
            raise _OutOfBudget()
        if self.budget.seconds is not None and self.nodes % 512 == 0:
            if time.monotonic() - self.started > self.budget.seconds:
                raise _OutOfBudget()

    @property
    def seconds(self) -> float:
        return time.monotonic() - self.started


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _popcount(mask: int) -> int:
    return bin(mask).count('1')


def _components(masks: Sequence[int], alive: int) -> List[int]:
    parts = []
    rest = alive
    while rest:
        low = rest & -rest
        part = low
        frontier = low
        while frontier:
            bit = frontier & -frontier
            frontier ^= bit
            grow = masks[bit.bit_length() - 1] & rest & ~part
            part |= grow
            frontier |= grow
        rest &= ~part
        parts.append(part)
    return parts


@dataclass(frozen=True)
class _Region:
    outer: Tuple[int, int, int]
    greys: Tuple[int, int, int]
    inner_mask: int
    vertex_mask: int

    def forced(self, cut_mask: int) -> int:
        present = [i for i, o in enumerate(self.outer) if cut_mask >> o & 1]
        if len(present) <= 1:
            return 0
        if len(present) == 2:
            missing = ({0, 1, 2} - set(present)).pop()
            return 1 << self.greys[missing]
        low_two = sorted(self.greys)[:2]
        return (1 << low_two[0]) | (1 << low_two[1])


class _BitGraph:

    def __init__(self, graph: nx.Graph, regions: Iterable[TRegionDescriptor] = ()):
        self.graph = graph
        self.nodes: List[Any] = sorted(graph.nodes)
        self.index: Dict[Any, int] = {v: i for i, v in enumerate(self.nodes)}
        self.n = len(self.nodes)
        self.full = (1 << self.n) - 1
        self.masks: List[int] = [0] * self.n
        for u, v in graph.edges():
            self.masks[self.index[u]] |= 1 << self.index[v]
            self.masks[self.index[v]] |= 1 << self.index[u]
        self.whites = 0
        for v, data in graph.nodes(data=True):
            if data.get('color') == WHITE:
                self.whites |= 1 << self.index[v]
        outer = graph.graph.get('outer_face')
        self.outer: Optional[Tuple[int, int, int]] = None
        if outer is not None and all(v in self.index for v in outer):
            self.outer = tuple(self.index[v] for v in outer)
        self.regions: List[_Region] = []
        for region in regions:
            outer_idx = tuple(self.index[v] for v in region.outer)
            greys_idx = tuple(self.index[v] for v in region.greys)
            inner_mask = self.mask_of(region.inner)
            self.regions.append(_Region(outer_idx, greys_idx, inner_mask, inner_mask | self.mask_of(region.outer)))

    def mask_of(self, vertices: Iterable[Any]) -> int:
        mask = 0
        for v in vertices:
            mask |= 1 << self.index[v]
        return mask

    def vertices_of(self, mask: int) -> List[Any]:
        return [self.nodes[i] for i in _bits(mask)]

    def is_complete(self) -> bool:
        return all(self.masks[i] == self.full & ~(1 << i) for i in range(self.n))

    def forced(self, cut_mask: int) -> int:
        extra = 0
        for region in self.regions:
            extra |= region.forced(cut_mask)
        return extra

    def inner_mask(self) -> int:
        mask = 0
        for region in self.regions:
            mask |= region.inner_mask
        return mask

    def reducible(self) -> bool:
        return bool(self.regions) and all(region.vertex_mask != self.full for region in self.regions)


def _prepare(G: Any) -> _BitGraph:
    if isinstance(G, LabeledBlock):
        return _BitGraph(G.to_networkx(), G.regions)
    return _BitGraph(as_networkx(G))


@dataclass(frozen=True)
class CycleWitness:
    vertices: Tuple[Any, ...]

    def __post_init__(self):
        object.__setattr__(self, 'vertices', tuple(self.vertices))
        if len(self.vertices) < 3:
            raise ValueError(f"A cycle needs at least 3 vertices, got {len(self.vertices)}")

    def __len__(self) -> int:
        return len(self.vertices)

    def edges(self) -> List[Tuple[Any, Any]]:
        seq = self.vertices
        return [(seq[i], seq[(i + 1) % len(seq)]) for i in range(len(seq))]


@dataclass(frozen=True)
class PathWitness:
    vertices: Tuple[Any, ...]

    def __post_init__(self):
        object.__setattr__(self, 'vertices', tuple(self.vertices))
        if not self.vertices:
            raise ValueError("A path needs at least one vertex")

    def __len__(self) -> int:
        return len(self.vertices)

    def edges(self) -> List[Tuple[Any, Any]]:
        seq = self.vertices
        return [(seq[i], seq[i + 1]) for i in range(len(seq) - 1)]


@dataclass(frozen=True)
class CycleSearchResult:
    value: int
    witness: CycleWitness
    upper_bound: int
    nodes: int
    seconds: float


def region_correction(bg: _BitGraph) -> int:
    """Whites (or vertices) every cycle misses because of T-regions sharing one vertex.

    For a vertex o, greedily collect T-regions through o that pairwise meet
    only in o. A cycle collects every white of at most two of them, so it
    misses at least one vertex in each of the others.
    """
    best = 0
    for o in range(bg.n):
        chosen: List[_Region] = []
        for region in bg.regions:
            if o not in region.outer:
                continue
            if all(region.vertex_mask & other.vertex_mask == 1 << o for other in chosen):
                chosen.append(region)
        best = max(best, len(chosen))
    return max(0, best - 2)


class _CycleSearch:

    def __init__(self, bg: _BitGraph, objective: str, outer_edges: Optional[int],
                 meter: _Meter, use_region_bound: bool):
        self.bg = bg
        self.masks = bg.masks
        self.meter = meter
        self.objective = objective
        self.weight_mask = bg.whites if objective == 'white' else bg.full
        self.required_outer = outer_edges
        self.outer_nbr = [0] * bg.n
        if bg.outer is not None:
            a, b, c = bg.outer
            for x, y in ((a, b), (b, c), (c, a)):
                self.outer_nbr[x] |= 1 << y
                self.outer_nbr[y] |= 1 << x
        correction = region_correction(bg) if use_region_bound else 0
        self.static_ub = _popcount(self.weight_mask) - correction
        self.best = 0
        self.best_cycle: Optional[Tuple[int, ...]] = None
        self.avail = bg.full
        self.s = 0

    def _weight(self, v: int) -> int:
        return self.weight_mask >> v & 1

    def _outer_count(self, cycle: Sequence[int]) -> int:
        return sum(self.outer_nbr[cycle[i]] >> cycle[(i + 1) % len(cycle)] & 1 for i in range(len(cycle)))

    def offer(self, cycle: Sequence[int]) -> None:
        cycle = tuple(cycle)
        if len(cycle) < 3 or len(set(cycle)) != len(cycle):
            raise ValueError("Incumbent is not a simple cycle")
        for i, v in enumerate(cycle):
            if not self.masks[v] >> cycle[(i + 1) % len(cycle)] & 1:
                raise ValueError("Incumbent uses a non-edge")
        if self.required_outer is not None and self._outer_count(cycle) != self.required_outer:
            raise ValueError("Incumbent does not have the required number of outer edges")
        weight = sum(self._weight(v) for v in cycle)
        if weight > self.best:
            self.best = weight
            self.best_cycle = cycle

    def run(self) -> None:
        if self.objective == 'white':
            starts = list(_bits(self.bg.whites))
        else:
            starts = list(range(self.bg.n))
        excluded = 0
        try:
            for s in starts:
                if self.best >= self.static_ub:
                    break
                if _popcount(self.weight_mask & ~excluded) <= self.best:
                    break
                self.avail = self.bg.full & ~excluded
                self.s = s
                self._extend([s], 1 << s, s, self._weight(s), 0)
                excluded |= 1 << s
        except _Done:
            pass

    def _extend(self, path: List[int], path_mask: int, v: int, weight: int, outer_count: int) -> None:
        self.meter.tick()
        s = self.s
        masks = self.masks
        if len(path) >= 3 and masks[v] >> s & 1 and path[1] < v:
            closing = outer_count + (self.outer_nbr[v] >> s & 1)
            if (self.required_outer is None or closing == self.required_outer) and weight > self.best:
                self.best = weight
                self.best_cycle = tuple(path)
                logger.debug("Cycle search improved to %d after %d nodes", weight, self.meter.nodes)
                if self.best >= self.static_ub:
                    raise _Done()

        if self._bound(path, path_mask, v, weight) <= self.best:
            return

        free = self.avail & ~path_mask
        candidates = list(_bits(masks[v] & free))
        candidates.sort(key=lambda u: (_popcount(masks[u] & free), u))
        for u in candidates:
            new_outer = outer_count + (self.outer_nbr[v] >> u & 1)
            if self.required_outer is not None and new_outer > self.required_outer:
                continue
            path.append(u)
            self._extend(path, path_mask | 1 << u, u, weight + self._weight(u), new_outer)
            path.pop()

    def _bound(self, path: List[int], path_mask: int, v: int, weight: int) -> int:
        if len(path) == 1:
            return self.static_ub
        masks = self.masks
        s = self.s
        ends = (1 << v) | (1 << s)
        rest = self.avail & ~path_mask

        changed = True
        while changed:
            changed = False
            live = rest | ends
            for u in _bits(rest):
                if _popcount(masks[u] & live) < 2:
                    rest &= ~(1 << u)
                    changed = True

        reach = 0
        frontier = masks[v] & rest
        while frontier:
            reach |= frontier
            grow = 0
            for u in _bits(frontier):
                grow |= masks[u]
            frontier = grow & rest & ~reach

        second = path[1]
        above_second = self.bg.full & ~((1 << (second + 1)) - 1)
        closers = masks[s] & reach & above_second
        can_close_now = len(path) >= 3 and masks[v] >> s & 1 and v > second
        if not closers:
            return weight if can_close_now else -1

        live = reach | ends
        forced = 0
        for u in _bits(reach & self.weight_mask):
            if _popcount(masks[u] & live) == 2:
                forced |= 1 << u
        correction = 0
        if forced:
            touched = 0
            for u in _bits(forced):
                touched |= masks[u]
            excess = 0
            for y in _bits(touched & live & ~forced):
                capacity = 1 if y == v or y == s else 2
                load = _popcount(masks[y] & forced)
                if load > capacity:
                    excess += load - capacity
            correction = (excess + 1) // 2
        return min(self.static_ub, weight + _popcount(reach & self.weight_mask) - correction)


def cycle_search(G: Any, objective: str = 'length', outer_edges: Optional[int] = None,
                 budget: Optional[SearchBudget] = None, incumbent: Optional[Sequence[Any]] = None,
                 use_region_bound: bool = True) -> CycleSearchResult:
    """Exhaustive branch-and-bound for a cycle maximising length or white count.

    ``outer_edges`` restricts the search to cycles using exactly that many
    edges of the outer face. An incumbent cycle (host vertex ids) seeds the
    lower bound; the search still proves optimality.
    """
    if objective not in ('length', 'white'):
        raise ValueError(f"Unknown objective: {objective}")
    bg = _prepare(G)
    if outer_edges is not None:
        if outer_edges not in (0, 1, 2):
            raise ValueError(f"A cycle uses 0, 1 or 2 outer edges, got {outer_edges}")
        if bg.outer is None:
            raise NotApplicable("The graph has no outer face")
    if objective == 'white' and not bg.whites:
        raise NotApplicable("The graph has no white vertices")

    meter = _Meter(budget)
    search = _CycleSearch(bg, objective, outer_edges, meter, use_region_bound)
    if incumbent is not None:
        unknown = [v for v in incumbent if v not in bg.index]
        if unknown:
            raise ValueError(f"Incumbent vertices not in the graph: {unknown}")
        search.offer([bg.index[v] for v in incumbent])
    try:
        search.run()
    except _OutOfBudget:
        witness = bg.vertices_of(0) if search.best_cycle is None else [bg.nodes[i] for i in search.best_cycle]
        raise BudgetExceeded(
            f"Cycle search stopped after {meter.nodes} nodes; best {objective} so far is {search.best}",
            best_bound=search.best, best_witness=witness or None, nodes=meter.nodes, seconds=meter.seconds)

    if search.best_cycle is None:
        raise NoSuchCycle(f"No cycle with exactly {outer_edges} outer edges exists")
    witness = CycleWitness(tuple(bg.nodes[i] for i in search.best_cycle))
    logger.debug("Cycle search finished: %s = %d in %d nodes", objective, search.best, meter.nodes)
    return CycleSearchResult(search.best, witness, search.static_ub, meter.nodes, meter.seconds)


def longest_cycle_exact(G: Any, budget: Optional[SearchBudget] = None,
                        incumbent: Optional[Sequence[Any]] = None,
                        use_region_bound: bool = True) -> Tuple[int, CycleWitness]:
    result = cycle_search(G, 'length', None, budget, incumbent, use_region_bound)
    return result.value, result.witness


def longest_cycle_with_outer_edges(G: Any, i: int, budget: Optional[SearchBudget] = None,
                                   incumbent: Optional[Sequence[Any]] = None,
                                   use_region_bound: bool = True) -> int:
    return cycle_search(G, 'length', i, budget, incumbent, use_region_bound).value


def max_white_cycle(G: Any, budget: Optional[SearchBudget] = None,
                    incumbent: Optional[Sequence[Any]] = None,
                    use_region_bound: bool = True) -> Tuple[int, CycleWitness]:
    result = cycle_search(G, 'white', None, budget, incumbent, use_region_bound)
    return result.value, result.witness


class _PathSearch:

    def __init__(self, bg: _BitGraph, meter: _Meter):
        self.bg = bg
        self.masks = bg.masks
        self.meter = meter
        self.best: Tuple[int, ...] = ()

    def run(self) -> None:
        try:
            for s in range(self.bg.n):
                self._extend([s], 1 << s, s)
        except _Done:
            pass

    def _extend(self, path: List[int], path_mask: int, v: int) -> None:
        self.meter.tick()
        if len(path) > len(self.best) and (len(path) == 1 or path[-1] > path[0]):
            self.best = tuple(path)
            if len(path) == self.bg.n:
                raise _Done()
        free = self.bg.full & ~path_mask
        reach = 0
        frontier = self.masks[v] & free
        while frontier:
            reach |= frontier
            grow = 0
            for u in _bits(frontier):
                grow |= self.masks[u]
            frontier = grow & free & ~reach
        if len(path) + _popcount(reach) <= len(self.best):
            return
        candidates = list(_bits(self.masks[v] & free))
        candidates.sort(key=lambda u: (_popcount(self.masks[u] & free), u))
        for u in candidates:
            path.append(u)
            self._extend(path, path_mask | 1 << u, u)
            path.pop()


def longest_path_exact(G: Any, budget: Optional[SearchBudget] = None) -> Tuple[int, PathWitness]:
    bg = _prepare(G)
    if bg.n == 0:
        raise NotApplicable("The graph has no vertices")
    meter = _Meter(budget)
    search = _PathSearch(bg, meter)
    try:
        search.run()
    except _OutOfBudget:
        raise BudgetExceeded(
            f"Path search stopped after {meter.nodes} nodes; best so far has {len(search.best)} vertices",
            best_bound=len(search.best), best_witness=[bg.nodes[i] for i in search.best],
            nodes=meter.nodes, seconds=meter.seconds)
    return len(search.best), PathWitness(tuple(bg.nodes[i] for i in search.best))


@dataclass(frozen=True)
class ToughnessReport:
    """Outcome of a toughness computation.

    ``kind`` is ``exact`` (``value`` is the toughness, None meaning infinite),
    ``violation`` (``cut`` has ratio ``value`` below ``threshold``) or
    ``no_violation_found`` (``complete`` tells whether the search space was
    exhausted under the stated reduction).
    """

    kind: str
    value: Optional[Fraction]
    cut: Optional[VertexCut] = None
    components: int = 0
    threshold: Optional[Fraction] = None
    reduction: str = 'none'
    complete: bool = True
    nodes: int = 0
    seconds: float = 0.0
    budget: Optional[str] = None

    @property
    def is_infinite(self) -> bool:
        return self.kind == 'exact' and self.value is None

    def at_least(self, t: Fraction) -> bool:
        if self.kind != 'exact':
            raise ValueError(f"Only exact reports carry a toughness value, this one is {self.kind}")
        return self.value is None or self.value >= t

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "value": 'infinite' if self.is_infinite else (None if self.value is None else str(self.value)),
            "cut": None if self.cut is None else [v for v in self.cut],
            "components": self.components,
            "threshold": None if self.threshold is None else str(self.threshold),
            "reduction": self.reduction,
            "complete": self.complete,
            "nodes": self.nodes,
            "seconds": round(self.seconds, 3),
            "budget": self.budget,
        }


def _touches_two(masks: Sequence[int], cut: Sequence[int], parts: Sequence[int]) -> bool:
    for x in cut:
        if sum(1 for part in parts if masks[x] & part) < 2:
            return False
    return True


def _neighbourhood_bound(bg: _BitGraph) -> Optional[Fraction]:
    best = None
    for v in range(bg.n):
        cut = bg.masks[v]
        alive = bg.full & ~cut
        if alive == 1 << v:
            continue
        parts = _components(bg.masks, alive)
        if len(parts) >= 2:
            ratio = Fraction(_popcount(cut), len(parts))
            if best is None or ratio < best:
                best = ratio
    return best


# Shared across the cut-size workers of one enumeration.
_cut_nodes = None

# Cuts a worker enumerates between charges to the shared counter.
_CHARGE_EVERY = 256


def _init_cut_worker(counter) -> None:
    global _cut_nodes
    _cut_nodes = counter


def _charge(nodes: int, node_limit: Optional[int]) -> bool:
    with _cut_nodes.get_lock():
        _cut_nodes.value += nodes
        total = _cut_nodes.value
    return node_limit is not None and total > node_limit


def _best_cut_of_size(args: Tuple[Sequence[int], int, int, bool, Optional[int], Optional[float]]):
    masks, n, k, prune, node_limit, deadline = args
    full = (1 << n) - 1
    best = None
    nodes = 0
    pending = 0
    for combo in combinations(range(n), k):
        nodes += 1
        pending += 1
        if pending == _CHARGE_EVERY:
            pending = 0
            if _charge(_CHARGE_EVERY, node_limit):
                return k, best, nodes, True
            if deadline is not None and time.time() > deadline:
                return k, best, nodes, True
        cut = 0
        for x in combo:
            cut |= 1 << x
        parts = _components(masks, full & ~cut)
        if len(parts) < 2:
            continue
        if prune and not _touches_two(masks, combo, parts):
            continue
        ratio = Fraction(k, len(parts))
        if best is None or ratio < best[0]:
            best = (ratio, combo, len(parts))
    return k, best, nodes, _charge(pending, node_limit)


def _parallel_cuts(bg: _BitGraph, meter: _Meter, prune: bool, threads: int):
    n = bg.n
    ceiling = _neighbourhood_bound(bg)
    sizes = [k for k in range(1, n - 1) if ceiling is None or Fraction(k, n - k) <= ceiling]
    budget = meter.budget
    node_limit = None if budget.nodes is None else budget.nodes - meter.nodes
    remaining = None if budget.seconds is None else budget.seconds - meter.seconds
    if (node_limit is not None and node_limit <= 0) or (remaining is not None and remaining <= 0):
        return None, True
    deadline = None if remaining is None else time.time() + remaining
    counter = Value('q', 0)
    tasks = [(bg.masks, n, k, prune, node_limit, deadline) for k in sizes]
    with Pool(processes=threads, initializer=_init_cut_worker, initargs=(counter,)) as pool:
        pending = pool.map_async(_best_cut_of_size, tasks)
        try:
            # Workers stop at the deadline themselves; the extra seconds cover pool start-up.
            results = pending.get(None if remaining is None else remaining + 5.0)
        except PoolTimeout:
            pool.terminate()
            meter.nodes += counter.value
            return None, True

    best = None
    exhausted = False
    for k, found, nodes, stopped in sorted(results, key=lambda item: item[0]):
        meter.nodes += nodes
        exhausted = exhausted or stopped
        if found is not None and (best is None or found[0] < best[0]):
            best = found
    return best, exhausted


def _full_toughness(bg: _BitGraph, meter: _Meter, prune: bool, threads: int) -> ToughnessReport:
    n = bg.n
    best: Optional[Tuple[Fraction, Tuple[int, ...], int]] = None
    try:
        if threads > 1:
            best, exhausted = _parallel_cuts(bg, meter, prune, threads)
            if exhausted:
                raise _OutOfBudget()
        else:
            for k in range(1, n - 1):
                if best is not None and Fraction(k, n - k) >= best[0]:
                    break
                for combo in combinations(range(n), k):
                    meter.tick()
                    cut = 0
                    for x in combo:
                        cut |= 1 << x
                    parts = _components(bg.masks, bg.full & ~cut)
                    if len(parts) < 2:
                        continue
                    if prune and not _touches_two(bg.masks, combo, parts):
                        continue
                    ratio = Fraction(k, len(parts))
                    if best is None or ratio < best[0]:
                        best = (ratio, combo, len(parts))
    except _OutOfBudget:
        raise BudgetExceeded(
            f"Toughness enumeration stopped after {meter.nodes} cuts",
            best_bound=None if best is None else best[0],
            best_witness=None if best is None else [bg.nodes[i] for i in best[1]],
            nodes=meter.nodes, seconds=meter.seconds)

    if best is None:
        raise NotApplicable("The graph has no separating set")
    ratio, combo, count = best
    return ToughnessReport('exact', ratio, VertexCut.of(bg.nodes[i] for i in combo), count,
                           reduction='none', nodes=meter.nodes, seconds=meter.seconds)


def _reduced_toughness(bg: _BitGraph, meter: _Meter) -> Optional[ToughnessReport]:
    free = [v for v in range(bg.n) if not bg.inner_mask() >> v & 1]
    best = None
    try:
        for size in range(1, len(free) + 1):
            for combo in combinations(free, size):
                meter.tick()
                base = 0
                for x in combo:
                    base |= 1 << x
                cut = base | bg.forced(base)
                alive = bg.full & ~cut
                if not alive:
                    continue
                parts = _components(bg.masks, alive)
                if len(parts) < 2:
                    continue
                key = (Fraction(_popcount(cut), len(parts)), _popcount(cut), tuple(_bits(cut)))
                if best is None or key < best[0]:
                    best = (key, cut, len(parts))
    except _OutOfBudget:
        raise BudgetExceeded(
            f"Reduced toughness enumeration stopped after {meter.nodes} cuts",
            best_bound=None if best is None else best[0][0], nodes=meter.nodes, seconds=meter.seconds)
    if best is None:
        return None
    (ratio, _, _), cut, count = best
    return ToughnessReport('exact', ratio, VertexCut.of(bg.vertices_of(cut)), count,
                           reduction='t_region_canonical', nodes=meter.nodes, seconds=meter.seconds)


def _stamped(report: ToughnessReport, meter: _Meter) -> ToughnessReport:
    return replace(report, budget=meter.budget.describe())


def toughness_exact(G: Any, budget: Optional[SearchBudget] = None, prune: bool = True,
                    reduction: str = 'auto', threads: int = 1) -> ToughnessReport:
    """Exact toughness with an argmin cut.

    ``reduction`` is ``auto`` (canonical T-region cuts for graphs above
    REDUCTION_MIN_ORDER vertices when every region has an outside vertex),
    ``t_region`` (always, failing when inapplicable) or ``none``. Canonical
    cuts are exact whenever the resulting value is at least 1; below that the
    computation falls back to full enumeration.
    """
    if reduction not in ('auto', 't_region', 'none'):
        raise ValueError(f"Unknown reduction: {reduction}")
    bg = _prepare(G)
    meter = _Meter(budget)
    if bg.n == 0 or bg.is_complete():
        return _stamped(ToughnessReport('exact', None, reduction='none'), meter)
    parts = _components(bg.masks, bg.full)
    if len(parts) >= 2:
        return _stamped(ToughnessReport('exact', Fraction(0), VertexCut.of(()), len(parts), reduction='none'), meter)

    if reduction == 't_region' and not bg.reducible():
        raise NotApplicable("Canonical cuts need T-regions that each leave an outside vertex")
    use_regions = reduction == 't_region' or (reduction == 'auto' and bg.n > REDUCTION_MIN_ORDER and bg.reducible())
    if use_regions:
        report = _reduced_toughness(bg, meter)
        if report is not None and report.value >= 1:
            logger.info("Toughness %s from canonical cuts (%d cuts)", report.value, report.nodes)
            return _stamped(report, meter)
        logger.info("Canonical cuts gave a value below 1, falling back to full enumeration")
    return _stamped(_full_toughness(bg, meter, prune, threads), meter)


def _violation_report(bg: _BitGraph, cut: int, t: Fraction, reduction: str, meter: _Meter) -> ToughnessReport:
    members = bg.vertices_of(cut)
    count, _ = components_after_cut(bg.graph, members)
    ratio = Fraction(len(members), count)
    if count < 2 or ratio >= t:
        raise VerificationFailed(f"Cut {members} does not re-verify as a violation of {t}-toughness")
    return ToughnessReport('violation', ratio, VertexCut.of(members), count, t, reduction,
                           True, meter.nodes, meter.seconds, meter.budget.describe())


def toughness_search(G: Any, t: Any, budget: Optional[SearchBudget] = None) -> ToughnessReport:
    """Hunt for a cut S with c(G - S) > |S| / t.

    Seeds the search with T-region cuts and vertex neighbourhoods, then
    branches over the vertices outside the T-region interiors, completing
    each partial cut with the canonical inner vertices of every region.
    A returned violation is always re-verified; ``no_violation_found`` with
    ``complete=False`` is evidence under the budget, not a proof.
    """
    t = Fraction(t)
    if t <= 0:
        raise ValueError(f"Threshold must be positive, got {t}")
    bg = _prepare(G)
    meter = _Meter(budget)
    if bg.n == 0 or bg.is_complete():
        return _stamped(ToughnessReport('no_violation_found', None, threshold=t, reduction='none', complete=True), meter)
    if len(_components(bg.masks, bg.full)) >= 2:
        return _violation_report(bg, 0, t, 'none', meter)

    use_regions = t >= 1 and bg.reducible()
    reduction = 't_region_canonical' if use_regions else 'none'
    masks = bg.masks

    def violates(cut: int) -> bool:
        alive = bg.full & ~cut
        if not alive:
            return False
        count = len(_components(masks, alive))
        return count >= 2 and t * count > _popcount(cut)

    seeds = []
    for region in bg.regions:
        if region.vertex_mask != bg.full:
            outer_mask = sum(1 << o for o in region.outer)
            seeds.append(outer_mask | region.forced(outer_mask))
    for v in range(bg.n):
        seeds.append(masks[v])
    for cut in seeds:
        if violates(cut):
            logger.info("Seed cut violates %s-toughness", t)
            return _violation_report(bg, cut, t, 'seed', meter)

    inner = bg.inner_mask() if use_regions else 0
    order = sorted((v for v in range(bg.n) if not inner >> v & 1), key=lambda v: (-_popcount(masks[v]), v))
    regions = bg.regions if use_regions else []

    class _Found(Exception):
        def __init__(self, cut: int):
            self.cut = cut

    def branch(i: int, chosen: int, dropped: int) -> None:
        meter.tick()
        cut = chosen | (bg.forced(chosen) if use_regions else 0)
        if violates(cut):
            raise _Found(cut)
        if i == len(order):
            return
        ceiling = len(_components(masks, dropped)) + (len(order) - i)
        for region in regions:
            outer_dropped = any(dropped >> o & 1 for o in region.outer)
            ceiling += 1 if outer_dropped else 3
        if t * ceiling <= _popcount(chosen):
            return
        v = order[i]
        branch(i + 1, chosen | 1 << v, dropped)
        branch(i + 1, chosen, dropped | 1 << v)

    try:
        branch(0, 0, 0)
    except _Found as found:
        return _violation_report(bg, found.cut, t, reduction, meter)
    except _OutOfBudget:
        logger.info("Toughness search for %s exhausted its budget after %d nodes", t, meter.nodes)
        complete = False
    else:
        complete = True
    return ToughnessReport('no_violation_found', None, threshold=t, reduction=reduction, complete=complete,
                           nodes=meter.nodes, seconds=meter.seconds, budget=meter.budget.describe())


def t_region_cut(block: LabeledBlock, region: TRegionDescriptor) -> VertexCut:
    """Outer triangle plus two greys: isolates two whites and a grey-white pair."""
    return VertexCut.of(frozenset(region.outer) | region.forced_cut(region.outer))


def _violates(graph: nx.Graph, members: frozenset, t: Fraction) -> bool:
    if members >= set(graph.nodes):
        return False
    count, _ = components_after_cut(graph, members)
    return count >= 2 and t * count > len(members)


def canonicalize_cut(G: Any, S: Any, region: TRegionDescriptor, t: Any, strict: bool = False) -> VertexCut:
    """Move the part of S inside a T-region onto the canonical inner vertices.

    Cuts meeting the region's outer triangle in at most one vertex are
    returned unchanged (or rejected with ``strict``). A violating cut stays
    violating; the check is performed and a failure raises ReductionUnsound.
    """
    t = Fraction(t)
    if t < 1:
        raise NotApplicable(f"Canonical cuts need t >= 1, got {t}")
    graph = as_networkx(G)
    members = frozenset(S.members if isinstance(S, VertexCut) else S)
    present = [o for o in region.outer if o in members]
    if len(present) <= 1:
        if strict:
            raise NotApplicable("The cut meets the region's outer triangle in at most one vertex")
        return VertexCut.of(members)
    canonical = (members - region.inner) | region.forced_cut(present)
    if _violates(graph, members, t) and not _violates(graph, canonical, t):
        raise ReductionUnsound(f"Canonical form of {sorted(members)} loses the {t}-toughness violation")
    return VertexCut.of(canonical)


def strip_simplicial(G: Any, v: Any = None) -> nx.Graph:
    graph = as_networkx(G)
    simplicial = simplicial_vertices(graph)
    if v is None:
        if not simplicial:
            raise NoSimplicialVertex("The graph has no simplicial vertex")
        v = min(simplicial)
    elif v not in simplicial:
        raise NoSimplicialVertex(f"Vertex {v} is not simplicial")
    result = nx.Graph(graph)
    result.remove_node(v)
    result.graph.pop('outer_face', None)
    return result


# Longest line written to LP files; longer rows continue on indented lines.
LP_LINE_WIDTH = 255


def _lp_row(name: str, terms: Sequence[str], rhs: Optional[str]) -> List[str]:
    """Render ``name: t1 t2 ... rhs``, where every term after the first carries its sign."""
    lines = []
    current = f" {name}:"
    for token in list(terms) + ([rhs] if rhs else []):
        if len(current) + 1 + len(token) > LP_LINE_WIDTH and current.strip():
            lines.append(current)
            current = "   "
        current = f"{current} {token}"
    lines.append(current)
    return lines


def export_toughness_lp(G: Any, t: Any) -> str:
    """LP-format integer program that is feasible iff G is not t-tough.

    s_v marks cut vertices, x_v_k puts a surviving vertex in colour class k
    and u_k marks used classes. Classes are unions of components, so the
    number of used classes bounds the component count from below.
    """
    t = Fraction(t)
    if t <= 0:
        raise ValueError(f"Threshold must be positive, got {t}")
    bg = _prepare(G)
    n = bg.n
    colours = range(1, n + 1)

    def plus(names: Iterable[str]) -> List[str]:
        names = list(names)
        return names[:1] + [f"+ {name}" for name in names[1:]]

    lines = [f"\\ Toughness violation search for t = {t.numerator}/{t.denominator} on {n} vertices",
             "Maximize"]
    lines.extend(_lp_row("obj", plus(f"u_{k}" for k in colours), None))
    lines.append("Subject To")
    for v in range(n):
        lines.extend(_lp_row(f"part_{v}", plus([f"s_{v}"] + [f"x_{v}_{k}" for k in colours]), "= 1"))
    for v in range(n):
        for w in _bits(bg.masks[v]):
            for k in colours:
                lines.append(f" join_{v}_{w}_{k}: x_{v}_{k} - x_{w}_{k} - s_{v} - s_{w} <= 0")
    for k in colours:
        lines.extend(_lp_row(f"used_{k}", [f"u_{k}"] + [f"- x_{v}_{k}" for v in range(n)], "<= 0"))
    for k in colours:
        if k < n:
            lines.append(f" order_{k}: u_{k} - u_{k + 1} >= 0")
    lines.extend(_lp_row("separating", plus(f"u_{k}" for k in colours), ">= 2"))
    used = plus(f"{t.numerator} u_{k}" for k in colours)
    cut = [f"- {t.denominator} s_{v}" for v in range(n)]
    lines.extend(_lp_row("ratio", used + cut, ">= 1"))
    lines.append("Binary")
    lines.extend(f" s_{v}" for v in range(n))
    lines.extend(f" x_{v}_{k}" for v in range(n) for k in colours)
    lines.extend(f" u_{k}" for k in colours)
    lines.append("End")
    pairs = [f"{i}={bg.nodes[i]}" for i in range(n)]
    for start in range(0, len(pairs), 16):
        lines.append("\\ vertex index map: " + ", ".join(pairs[start:start + 16]))
    return "\n".join(lines) + "\n"
