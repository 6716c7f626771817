import json
from typing import Any, Dict, Union

from shortness_lab.errors import EmbeddingInconsistent
from shortness_lab.graphs.blocks import PLAIN, ROLE_COLORS, LabeledBlock
from shortness_lab.graphs.graphcore import Triangulation

GraphLike = Union[Triangulation, LabeledBlock]

DOT_COLORS = {
    "white": "gray60",
    "grey": "gray30",
    "black": "black",
    "blue": "blue",
    "hub_c": "red",
    "hub_cprime": "orange",
    "outer_o": "darkgreen",
    "apex_x": "purple",
    "plain": "black",
}


def _parts(G: GraphLike):
    if isinstance(G, LabeledBlock):
        return G.graph, G.colors, G.name
    return G, (PLAIN,) * G.n_vertices, ''


def to_payload(G: GraphLike) -> Dict[str, Any]:
    graph, colors, _ = _parts(G)
    return {
        "n": graph.n_vertices,
        "rotation": [list(nbrs) for nbrs in graph.rotation],
        "outer_face": list(graph.outer_face),
        "labels": list(graph.labels),
        "colors": list(colors),
    }


def to_json(G: GraphLike) -> str:
    return json.dumps(to_payload(G), indent=2) + "\n"


def from_payload(data: Any, name: str = '') -> LabeledBlock:
    if not isinstance(data, dict):
        raise EmbeddingInconsistent("Graph document must be a JSON object")
    missing = [key for key in ("n", "rotation", "outer_face", "labels", "colors") if key not in data]
    if missing:
        raise EmbeddingInconsistent(f"Graph document is missing fields: {', '.join(missing)}")

    n = data["n"]
    rotation = data["rotation"]
    labels = data["labels"]
    colors = data["colors"]
    outer = data["outer_face"]
    if not isinstance(n, int) or n < 4:
        raise EmbeddingInconsistent(f"Field 'n' must be an integer >= 4, got {n!r}")
    for field_name, value in (("rotation", rotation), ("labels", labels), ("colors", colors)):
        if not isinstance(value, list) or len(value) != n:
            raise EmbeddingInconsistent(f"Field '{field_name}' must be an array of length {n}")
    if not isinstance(outer, list) or len(outer) != 3 or not all(isinstance(v, int) for v in outer):
        raise EmbeddingInconsistent("Field 'outer_face' must be an array of three vertex ids")
    for v, nbrs in enumerate(rotation):
        if not isinstance(nbrs, list) or not all(isinstance(w, int) for w in nbrs):
            raise EmbeddingInconsistent(f"Rotation of vertex {v} must be an array of vertex ids")
    if not all(isinstance(label, str) for label in labels):
        raise EmbeddingInconsistent("Labels must be strings")
    unknown = sorted(set(colors) - set(ROLE_COLORS), key=str)
    if unknown:
        raise EmbeddingInconsistent(f"Unknown colors: {unknown}")

    graph = Triangulation(tuple(tuple(nbrs) for nbrs in rotation), tuple(outer), tuple(labels))
    return LabeledBlock.create(graph, colors, name)


def from_json(text: str, name: str = '') -> LabeledBlock:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise EmbeddingInconsistent(f"Invalid graph JSON: {e}")
    return from_payload(data, name)


def to_dot(G: GraphLike) -> str:
    graph, colors, name = _parts(G)
    lines = [f'graph "{name or "G"}" {{']
    for v in graph.vertices():
        lines.append(f'  {v} [label="{graph.labels[v]}", role="{colors[v]}", color="{DOT_COLORS[colors[v]]}"];')
    for u, w in graph.edges():
        lines.append(f'  {u} -- {w};')
    lines.append('}')
    return "\n".join(lines) + "\n"


def to_edge_list(G: GraphLike) -> str:
    graph, _, _ = _parts(G)
    return "".join(f"{u} {w}\n" for u, w in graph.edges())
