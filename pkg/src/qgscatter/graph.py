"""Finite graphs with semi-infinite tails.

A :class:`TailedGraph` is a finite undirected multigraph plus a list of tail
attachments. Each tail is identified by a :class:`TailLabel` ``(vertex,
ordinal)``; labels are ordered by attachment-list order and then by ordinal,
which fixes the row/column order of every S-matrix built from the graph.

The on-disk format is a JSON object::

    {"vertices": 3,
     "edges": [[0, 1], [0, 2], [1, 2]],
     "tails": [{"vertex": 0, "count": 1}]}

Repeated edges encode multiplicity and ``[v, v]`` is a self-loop.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np


class GraphFormatError(ValueError):
    """Raised for malformed or inconsistent graph documents."""


class TailLabel(NamedTuple):
    vertex: int
    ordinal: int

    def __str__(self) -> str:
        return f"{self.vertex}:{self.ordinal}"


@dataclass(frozen=True)
class TailedGraph:
    n_vertices: int
    edges: tuple[tuple[int, int], ...] = ()
    tails: tuple[tuple[int, int], ...] = ()
    labels: tuple[TailLabel, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.n_vertices, (int, np.integer)) or self.n_vertices < 1:
            raise GraphFormatError(f"vertex count must be a positive integer, got {self.n_vertices!r}")
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        tails = tuple((int(v), int(c)) for v, c in self.tails)
        for u, v in edges:
            for w in (u, v):
                if not 0 <= w < self.n_vertices:
                    raise GraphFormatError(f"vertex index out of range: {w} (graph has {self.n_vertices} vertices)")
        for v, c in tails:
            if not 0 <= v < self.n_vertices:
                raise GraphFormatError(f"vertex index out of range: tail at {v} (graph has {self.n_vertices} vertices)")
            if c < 1:
                raise GraphFormatError(f"non-positive tail count {c} at vertex {v}")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "tails", tails)

        seen: Counter[int] = Counter()
        labels = []
        for v, c in tails:
            for _ in range(c):
                labels.append(TailLabel(v, seen[v]))
                seen[v] += 1
        object.__setattr__(self, "labels", tuple(labels))

    @property
    def n_tails(self) -> int:
        return len(self.labels)

    def tail_counts(self) -> np.ndarray:
        """Number of tails attached to each vertex (``m_v``)."""
        m = np.zeros(self.n_vertices, dtype=int)
        for v, c in self.tails:
            m[v] += c
        return m

    def tailed_vertices(self) -> list[int]:
        return sorted({v for v, _ in self.tails})

    def edge_multiplicity(self, u: int, v: int) -> int:
        key = (min(u, v), max(u, v))
        return sum(1 for a, b in self.edges if (min(a, b), max(a, b)) == key)

    def adjacent(self, u: int, v: int) -> bool:
        return self.edge_multiplicity(u, v) > 0

    def label_index(self, label) -> int:
        """Position of ``label`` in the tail ordering.

        Accepts a :class:`TailLabel`, a ``(vertex, ordinal)`` pair, an integer
        position, or a ``"v:m"`` string.
        """
        return resolve_label(self.labels, label)

    # -- graph surgery (used to build recompute oracles) ------------------

    def without_tail(self, label) -> "TailedGraph":
        """Remove one tail from the vertex that carries ``label``."""
        v = self.labels[self.label_index(label)].vertex
        return TailedGraph(self.n_vertices, self.edges, _decrement(self.tails, v))

    def with_tail(self, vertex: int) -> "TailedGraph":
        """Attach one more tail at ``vertex`` (appended to that vertex's group)."""
        tails = list(self.tails)
        for i in range(len(tails) - 1, -1, -1):
            if tails[i][0] == vertex:
                tails[i] = (vertex, tails[i][1] + 1)
                break
        else:
            tails.append((vertex, 1))
        return TailedGraph(self.n_vertices, self.edges, tuple(tails))

    def with_stump(self, label, length: int) -> "TailedGraph":
        """Replace tail ``label`` by a path of ``length`` extra vertices."""
        v = self.labels[self.label_index(label)].vertex
        tails = _decrement(self.tails, v)
        edges = list(self.edges)
        prev = v
        for i in range(length):
            new = self.n_vertices + i
            edges.append((prev, new))
            prev = new
        return TailedGraph(self.n_vertices + length, tuple(edges), tails)

    def connected_tails(self, label1, label2) -> "TailedGraph":
        """Join two tails into an edge between their attachment vertices."""
        i, j = self.label_index(label1), self.label_index(label2)
        if i == j:
            raise GraphFormatError("cannot connect a tail to itself")
        v1, v2 = self.labels[i].vertex, self.labels[j].vertex
        tails = _decrement(_decrement(self.tails, v1), v2)
        return TailedGraph(self.n_vertices, self.edges + ((v1, v2),), tails)

    def disjoint_union(self, other: "TailedGraph") -> "TailedGraph":
        off = self.n_vertices
        edges = self.edges + tuple((u + off, v + off) for u, v in other.edges)
        tails = self.tails + tuple((v + off, c) for v, c in other.tails)
        return TailedGraph(self.n_vertices + other.n_vertices, edges, tails)


def _decrement(tails: tuple[tuple[int, int], ...], vertex: int) -> tuple[tuple[int, int], ...]:
    # drop the last tail attached at `vertex`
    out = list(tails)
    for i in range(len(out) - 1, -1, -1):
        if out[i][0] == vertex:
            if out[i][1] == 1:
                del out[i]
            else:
                out[i] = (vertex, out[i][1] - 1)
            return tuple(out)
    raise GraphFormatError(f"vertex {vertex} has no tail")


def resolve_label(labels: Iterable[TailLabel], label) -> int:
    labels = list(labels)
    if isinstance(label, str):
        if ":" in label:
            v, m = label.split(":", 1)
            label = TailLabel(int(v), int(m))
        else:
            label = int(label)
    if isinstance(label, (int, np.integer)) and not isinstance(label, bool):
        if not 0 <= label < len(labels):
            raise KeyError(f"tail index {label} out of range (have {len(labels)} tails)")
        return int(label)
    label = TailLabel(*label)
    try:
        return labels.index(label)
    except ValueError:
        raise KeyError(f"unknown tail label {label}") from None


# -- serialization -----------------------------------------------------------


def graph_from_dict(doc: dict) -> TailedGraph:
    if not isinstance(doc, dict):
        raise GraphFormatError("graph document must be an object")
    try:
        n = doc["vertices"]
        edges = doc.get("edges", [])
        tails = doc.get("tails", [])
    except KeyError as exc:
        raise GraphFormatError(f"missing key {exc}") from None
    if not isinstance(n, int) or isinstance(n, bool):
        raise GraphFormatError("'vertices' must be an integer")
    parsed_edges = []
    for e in edges:
        if not (isinstance(e, (list, tuple)) and len(e) == 2 and all(isinstance(x, int) for x in e)):
            raise GraphFormatError(f"edge must be a pair of integers, got {e!r}")
        parsed_edges.append(tuple(e))
    parsed_tails = []
    for t in tails:
        if not isinstance(t, dict) or set(t) != {"vertex", "count"}:
            raise GraphFormatError(f"tail entry must be {{'vertex', 'count'}}, got {t!r}")
        if not all(isinstance(t[k], int) for k in ("vertex", "count")):
            raise GraphFormatError(f"tail fields must be integers, got {t!r}")
        parsed_tails.append((t["vertex"], t["count"]))
    return TailedGraph(n, tuple(parsed_edges), tuple(parsed_tails))


def parse_graph(text: str) -> TailedGraph:
    """Parse a JSON graph document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"malformed document: {exc}") from None
    return graph_from_dict(doc)


def graph_to_dict(g: TailedGraph) -> dict:
    return {
        "vertices": g.n_vertices,
        "edges": [[u, v] for u, v in g.edges],
        "tails": [{"vertex": v, "count": c} for v, c in g.tails],
    }


def serialize_graph(g: TailedGraph) -> str:
    return json.dumps(graph_to_dict(g))


def load_graph(path) -> TailedGraph:
    with open(path) as fh:
        return parse_graph(fh.read())


# -- operators ---------------------------------------------------------------


def build_hamiltonian(g: TailedGraph) -> np.ndarray:
    """Minus the adjacency matrix; a self-loop contributes -2 on the diagonal."""
    H = np.zeros((g.n_vertices, g.n_vertices))
    for u, v in g.edges:
        if u == v:
            H[u, u] -= 2.0
        else:
            H[u, v] -= 1.0
            H[v, u] -= 1.0
    return H


def build_tail_operators(g: TailedGraph) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(R, Q)`` with ``R = diag(m_v)`` and ``Q = I - R``."""
    R = np.diag(g.tail_counts().astype(float))
    return R, np.eye(g.n_vertices) - R


# -- diagnostics -------------------------------------------------------------


@dataclass
class Diagnostics:
    components: int
    component_vertices: list[list[int]]
    tailed_vertices: list[int]
    n_tails: int
    warnings: list[str]

    def as_dict(self) -> dict:
        return {
            "components": self.components,
            "component_vertices": self.component_vertices,
            "tailed_vertices": self.tailed_vertices,
            "n_tails": self.n_tails,
            "warnings": self.warnings,
        }


def connected_components(g: TailedGraph) -> list[list[int]]:
    parent = list(range(g.n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges:
        parent[find(u)] = find(v)
    groups: dict[int, list[int]] = {}
    for v in range(g.n_vertices):
        groups.setdefault(find(v), []).append(v)
    return sorted(groups.values())


def validate(g: TailedGraph) -> Diagnostics:
    comps = connected_components(g)
    tailed = set(g.tailed_vertices())
    warnings = []
    for comp in comps:
        if not tailed.intersection(comp):
            warnings.append(f"component without tails: vertices {comp} (can only host bound states of the second kind)")
    return Diagnostics(len(comps), comps, sorted(tailed), g.n_tails, warnings)
