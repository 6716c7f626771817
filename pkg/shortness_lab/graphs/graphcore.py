"""
Embedded planar triangulations.

A triangulation is stored as a rotation system: ``rotation[v]`` lists the
neighbours of ``v`` in cyclic order. An oriented face ``(x, y, z)`` satisfies
``succ_x(y) == z``; walking the dart ``u -> v`` continues with
``v -> pred_v(u)``. Every constructor in the lab produces its graphs through
:class:`TriangleComplex`, so embeddings are correct by construction and only
re-checked by face traversal plus Euler counts.
"""

import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx

from shortness_lab.errors import CutIsWholeGraph, EmbeddingInconsistent

logger = logging.getLogger(__name__)

Face = Tuple[int, int, int]
RotationLike = Sequence[Sequence[int]]


def canonical_face(face: Sequence[int]) -> Face:
    """Rotate an oriented triangle so its smallest vertex comes first."""
    x, y, z = face
    if x <= y and x <= z:
        return (x, y, z)
    if y <= x and y <= z:
        return (y, z, x)
    return (z, x, y)


def _rotation_of(G: Union['Triangulation', RotationLike]) -> RotationLike:
    if isinstance(G, Triangulation):
        return G.rotation
    return G


def _face_walks(rotation: RotationLike, strict: bool) -> List[Tuple[int, ...]]:
    n = len(rotation)
    position: List[Dict[int, int]] = []
    for v, nbrs in enumerate(rotation):
        index = {}
        for i, w in enumerate(nbrs):
            if not 0 <= w < n:
                raise EmbeddingInconsistent(f"Vertex {v} lists unknown neighbour {w}")
            if w == v:
                raise EmbeddingInconsistent(f"Vertex {v} lists itself as a neighbour")
            if w in index:
                raise EmbeddingInconsistent(f"Vertex {v} lists neighbour {w} twice")
            index[w] = i
        position.append(index)

    for v, nbrs in enumerate(rotation):
        for w in nbrs:
            if v not in position[w]:
                raise EmbeddingInconsistent(f"Edge {v}-{w} is missing from the rotation of {w}")

    seen = set()
    walks: List[Tuple[int, ...]] = []
    for u, nbrs in enumerate(rotation):
        for v in nbrs:
            if (u, v) in seen:
                continue
            walk = []
            a, b = u, v
            while (a, b) not in seen:
                seen.add((a, b))
                walk.append(a)
                around = rotation[b]
                a, b = b, around[(position[b][a] - 1) % len(around)]
            if (a, b) != (u, v):
                raise EmbeddingInconsistent(f"Face walk starting at dart {u}->{v} does not close")
            if strict and (len(walk) != 3 or len(set(walk)) != 3):
                raise EmbeddingInconsistent(
                    f"Face walk starting at dart {u}->{v} has boundary {walk}, expected a triangle")
            walks.append(tuple(walk))
    return walks


def traverse_faces(G: Union['Triangulation', RotationLike], strict: bool = True) -> List[Tuple[int, ...]]:
    """Return the oriented faces of a rotation system.

    With ``strict`` every face must be a triangle and the face count must be
    exactly ``2n - 4``; any violation raises EmbeddingInconsistent. Without it
    the raw boundary walks are returned for the caller to judge.
    """
    rotation = _rotation_of(G)
    walks = _face_walks(rotation, strict)
    if strict:
        n = len(rotation)
        if len(walks) != 2 * n - 4:
            raise EmbeddingInconsistent(
                f"Traversal found {len(walks)} faces, a triangulation on {n} vertices has {2 * n - 4}")
    return walks


def _is_connected(rotation: RotationLike) -> bool:
    if not rotation:
        return False
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in rotation[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(rotation)


def is_maximal_planar(G: Union['Triangulation', RotationLike]) -> bool:
    rotation = _rotation_of(G)
    n = len(rotation)
    if n < 4:
        return False
    walks = _face_walks(rotation, strict=False)
    edge_count = sum(len(nbrs) for nbrs in rotation) // 2
    if edge_count != 3 * n - 6 or len(walks) != 2 * n - 4:
        return False
    if any(len(walk) != 3 or len(set(walk)) != 3 for walk in walks):
        return False
    if not _is_connected(rotation):
        return False
    if isinstance(G, Triangulation):
        return canonical_face(G.outer_face) in {canonical_face(walk) for walk in walks}
    return True


@dataclass(frozen=True)
class VertexCut:
    members: FrozenSet[Any]

    @classmethod
    def of(cls, vertices: Iterable[Any]) -> 'VertexCut':
        return cls(frozenset(vertices))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Any]:
        return iter(sorted(self.members))

    def __contains__(self, vertex: Any) -> bool:
        return vertex in self.members

    def is_separating(self, G: Any) -> bool:
        graph = as_networkx(G)
        if self.members >= set(graph.nodes):
            return False
        count, _ = components_after_cut(graph, self)
        return count >= 2


@dataclass(frozen=True)
class Triangulation:
    """A maximal planar graph with a fixed embedding and outer face.

    Instances are validated on construction and never mutated; the derived
    adjacency structures are computed lazily and cached.
    """

    rotation: Tuple[Tuple[int, ...], ...]
    outer_face: Face
    labels: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, 'rotation', tuple(tuple(nbrs) for nbrs in self.rotation))
        object.__setattr__(self, 'outer_face', tuple(self.outer_face))
        object.__setattr__(self, 'labels', tuple(self.labels))
        n = len(self.rotation)
        if n < 4:
            raise EmbeddingInconsistent(f"A triangulation needs at least 4 vertices, got {n}")
        if len(self.labels) != n:
            raise EmbeddingInconsistent(f"Expected {n} labels, got {len(self.labels)}")
        if len(self.outer_face) != 3:
            raise EmbeddingInconsistent(f"Outer face must be a vertex triple, got {self.outer_face}")
        faces = traverse_faces(self.rotation, strict=True)
        edge_count = sum(len(nbrs) for nbrs in self.rotation) // 2
        if edge_count != 3 * n - 6:
            raise EmbeddingInconsistent(f"Edge count {edge_count} differs from 3n-6 = {3 * n - 6}")
        if canonical_face(self.outer_face) not in {canonical_face(face) for face in faces}:
            raise EmbeddingInconsistent(f"Outer face {self.outer_face} is not a face of the embedding")

    @classmethod
    def from_faces(cls, faces: Iterable[Sequence[int]], outer_face: Sequence[int],
                   labels: Sequence[str]) -> 'Triangulation':
        n = len(labels)
        succ: List[Dict[int, int]] = [dict() for _ in range(n)]
        for face in faces:
            x, y, z = face
            for p, q, r in ((x, y, z), (y, z, x), (z, x, y)):
                if not 0 <= p < n:
                    raise EmbeddingInconsistent(f"Face {tuple(face)} uses unknown vertex {p}")
                if q in succ[p]:
                    raise EmbeddingInconsistent(f"Dart {p}->{q} bounds two faces")
                succ[p][q] = r

        rotation = []
        for v, around in enumerate(succ):
            if not around:
                raise EmbeddingInconsistent(f"Vertex {v} lies on no face")
            start = min(around)
            cycle = [start]
            nxt = around[start]
            while nxt != start:
                if nxt not in around or len(cycle) > len(around):
                    raise EmbeddingInconsistent(f"Faces around vertex {v} do not close into one disc")
                cycle.append(nxt)
                nxt = around[nxt]
            if len(cycle) != len(around):
                raise EmbeddingInconsistent(f"Faces around vertex {v} form more than one cycle")
            rotation.append(tuple(cycle))
        return cls(tuple(rotation), tuple(outer_face), tuple(labels))

    @property
    def n_vertices(self) -> int:
        return len(self.rotation)

    def vertices(self) -> range:
        return range(len(self.rotation))

    @cached_property
    def adjacency(self) -> Tuple[FrozenSet[int], ...]:
        return tuple(frozenset(nbrs) for nbrs in self.rotation)

    @cached_property
    def neighbor_masks(self) -> Tuple[int, ...]:
        masks = []
        for nbrs in self.rotation:
            mask = 0
            for w in nbrs:
                mask |= 1 << w
            masks.append(mask)
        return tuple(masks)

    @cached_property
    def faces(self) -> Tuple[Face, ...]:
        return tuple(sorted(canonical_face(face) for face in traverse_faces(self)))

    @cached_property
    def label_index(self) -> Dict[str, int]:
        return {label: v for v, label in enumerate(self.labels)}

    def vertex_by_label(self, label: str) -> int:
        try:
            return self.label_index[label]
        except KeyError:
            raise KeyError(f"No vertex labelled {label!r}")

    def degree(self, v: int) -> int:
        return len(self.rotation[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def successor(self, v: int, u: int) -> int:
        around = self.rotation[v]
        return around[(around.index(u) + 1) % len(around)]

    def predecessor(self, v: int, u: int) -> int:
        around = self.rotation[v]
        return around[(around.index(u) - 1) % len(around)]

    def edges(self) -> List[Tuple[int, int]]:
        return sorted((u, w) for u, nbrs in enumerate(self.rotation) for w in nbrs if u < w)

    def outer_edges(self) -> FrozenSet[FrozenSet[int]]:
        a, b, c = self.outer_face
        return frozenset({frozenset((a, b)), frozenset((b, c)), frozenset((c, a))})

    @cached_property
    def _networkx(self) -> nx.Graph:
        graph = nx.Graph(outer_face=self.outer_face)
        for v, label in enumerate(self.labels):
            graph.add_node(v, label=label)
        graph.add_edges_from(self.edges())
        return nx.freeze(graph)

    def to_networkx(self) -> nx.Graph:
        return self._networkx


def as_networkx(G: Any) -> nx.Graph:
    if isinstance(G, nx.Graph):
        return G
    if hasattr(G, 'to_networkx'):
        return G.to_networkx()
    raise TypeError(f"Cannot interpret {type(G).__name__} as a graph")


def simplicial_vertices(G: Any) -> FrozenSet[Any]:
    graph = as_networkx(G)
    result = set()
    for v in graph.nodes:
        nbrs = list(graph.neighbors(v))
        if all(graph.has_edge(a, b) for i, a in enumerate(nbrs) for b in nbrs[i + 1:]):
            result.add(v)
    return frozenset(result)


def components_after_cut(G: Any, S: Union[VertexCut, Iterable[Any]]) -> Tuple[int, List[FrozenSet[Any]]]:
    graph = as_networkx(G)
    members = S.members if isinstance(S, VertexCut) else frozenset(S)
    unknown = members - set(graph.nodes)
    if unknown:
        raise ValueError(f"Cut contains vertices not in the graph: {sorted(unknown, key=repr)}")
    remaining = [v for v in graph.nodes if v not in members]
    if not remaining:
        raise CutIsWholeGraph("Removing the cut leaves no vertices")
    parts = [frozenset(part) for part in nx.connected_components(graph.subgraph(remaining))]
    parts.sort(key=lambda part: min(part))
    return len(parts), parts


def is_dominating(G: Any, D: Iterable[Any]) -> bool:
    graph = as_networkx(G)
    dominators = set(D)
    for v in graph.nodes:
        if v in dominators:
            continue
        if not any(w in dominators for w in graph.neighbors(v)):
            return False
    return True


def independence_number(G: Any, vertices: Optional[Iterable[Any]] = None) -> int:
    """Size of a maximum independent set of the subgraph induced by ``vertices``.

    Exact memoised branching on bitmasks; intended for the sparse ring graphs
    used as construction fingerprints rather than for arbitrary inputs.
    """
    graph = as_networkx(G)
    nodes = sorted(graph.nodes if vertices is None else vertices)
    index = {v: i for i, v in enumerate(nodes)}
    masks = [0] * len(nodes)
    for u, v in graph.subgraph(nodes).edges():
        masks[index[u]] |= 1 << index[v]
        masks[index[v]] |= 1 << index[u]

    @lru_cache(maxsize=None)
    def best(candidates: int) -> int:
        if not candidates:
            return 0
        low = candidates & -candidates
        v = low.bit_length() - 1
        rest = candidates & ~low
        taken = 1 + best(rest & ~masks[v])
        if bin(masks[v] & rest).count('1') <= 1:
            return taken
        return max(taken, best(rest))

    return best((1 << len(nodes)) - 1)


class TriangleComplex:
    """Mutable set of oriented triangles used to assemble triangulations.

    Faces are stored through their darts: ``succ[x][y] == z`` for every face
    ``(x, y, z)``. Removed vertices keep their slot until :meth:`freeze`
    compacts the ids in ascending order.
    """

    def __init__(self):
        self.labels: List[str] = []
        self.colors: List[str] = []
        self.alive: List[bool] = []
        self._succ: List[Dict[int, int]] = []

    @classmethod
    def from_graph(cls, graph: Triangulation, colors: Optional[Sequence[str]] = None) -> 'TriangleComplex':
        complex_ = cls()
        for v in graph.vertices():
            complex_.add_vertex(graph.labels[v], colors[v] if colors is not None else 'plain')
        for face in traverse_faces(graph):
            complex_.add_face(face)
        return complex_

    def add_vertex(self, label: str, color: str = 'plain') -> int:
        self.labels.append(label)
        self.colors.append(color)
        self.alive.append(True)
        self._succ.append({})
        return len(self.labels) - 1

    def add_face(self, face: Sequence[int]) -> None:
        x, y, z = face
        if len({x, y, z}) != 3:
            raise EmbeddingInconsistent(f"Degenerate face {tuple(face)}")
        for p, q in ((x, y), (y, z), (z, x)):
            if q in self._succ[p]:
                raise EmbeddingInconsistent(f"Dart {p}->{q} already bounds a face")
        self._succ[x][y] = z
        self._succ[y][z] = x
        self._succ[z][x] = y

    def remove_face(self, face: Sequence[int]) -> None:
        x, y, z = face
        if self._succ[x].get(y) != z:
            raise EmbeddingInconsistent(f"Face {tuple(face)} is not present")
        del self._succ[x][y]
        del self._succ[y][z]
        del self._succ[z][x]

    def face_at(self, u: int, v: int) -> Optional[Face]:
        w = self._succ[u].get(v)
        return None if w is None else (u, v, w)

    def neighbors(self, v: int) -> List[int]:
        return list(self._succ[v])

    def degree(self, v: int) -> int:
        return len(self._succ[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._succ[u]

    def faces(self) -> List[Face]:
        found = []
        for x, around in enumerate(self._succ):
            for y, z in around.items():
                if x < y and x < z:
                    found.append((x, y, z))
        return sorted(found)

    def star_hole(self, w: int) -> Face:
        """Delete a degree-3 vertex and return the triangular hole it leaves.

        The hole ``(a1, a2, a3)`` follows the rotation of ``w`` and is
        oriented like a face: a patch glued into it must supply the darts
        ``a1 -> a2 -> a3 -> a1``.
        """
        around = self._succ[w]
        if len(around) != 3:
            raise EmbeddingInconsistent(f"Vertex {w} has degree {len(around)}, a star hole needs degree 3")
        a1 = min(around)
        a2 = around[a1]
        a3 = around[a2]
        for face in ((w, a1, a2), (w, a2, a3), (w, a3, a1)):
            self.remove_face(face)
        self.alive[w] = False
        return (a1, a2, a3)

    def insert(self, graph: Triangulation, colors: Sequence[str], prefix: str,
               attach: Optional[Dict[int, int]] = None,
               skip: Optional[Sequence[int]] = None) -> Dict[int, int]:
        """Copy ``graph`` minus one face (the outer face unless ``skip`` names another).

        Vertices listed in ``attach`` are identified with existing vertices;
        the others become fresh vertices labelled ``prefix + label``. Returns
        the local-to-global id map.
        """
        attach = dict(attach or {})
        mapping: Dict[int, int] = {}
        for v in graph.vertices():
            if v in attach:
                mapping[v] = attach[v]
            else:
                mapping[v] = self.add_vertex(prefix + graph.labels[v], colors[v])
        omitted = canonical_face(graph.outer_face if skip is None else skip)
        for face in graph.faces:
            if face == omitted:
                continue
            self.add_face(tuple(mapping[v] for v in face))
        return mapping

    def fill_hole(self, hole: Sequence[int], graph: Triangulation, colors: Sequence[str],
                  prefix: str) -> Dict[int, int]:
        """Glue ``graph`` into a hole, identifying its outer face with the hole boundary."""
        x1, x2, x3 = graph.outer_face
        a1, a2, a3 = hole
        return self.insert(graph, colors, prefix, attach={x1: a1, x3: a2, x2: a3})

    def replace_face(self, face: Sequence[int], graph: Triangulation, colors: Sequence[str],
                     prefix: str) -> Dict[int, int]:
        self.remove_face(face)
        return self.fill_hole(face, graph, colors, prefix)

    def freeze(self, outer_face: Sequence[int]) -> Tuple[Triangulation, Tuple[str, ...], Dict[int, int]]:
        """Compact live vertices and build the validated triangulation.

        Returns the triangulation, its per-vertex colors and the map from
        complex ids to final ids.
        """
        id_map: Dict[int, int] = {}
        for v, alive in enumerate(self.alive):
            if alive:
                id_map[v] = len(id_map)
        labels = [self.labels[v] for v in id_map]
        colors = tuple(self.colors[v] for v in id_map)
        faces = [tuple(id_map[v] for v in face) for face in self.faces()]
        graph = Triangulation.from_faces(faces, tuple(id_map[v] for v in outer_face), labels)
        logger.debug("Froze triangle complex into %d vertices and %d faces", graph.n_vertices, len(faces))
        return graph, colors, id_map
