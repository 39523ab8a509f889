"""Canonical small graphs and a random-graph generator for tests and sweeps."""

from __future__ import annotations

import numpy as np

from .graph import TailedGraph

G1 = TailedGraph(1, (), ((0, 1),))
G2 = TailedGraph(1, (), ((0, 2),))
G3 = TailedGraph(1, (), ((0, 3),))
G4 = TailedGraph(2, ((0, 1),), ((0, 1), (1, 1)))
G5 = TailedGraph(2, ((0, 1),), ((0, 1),))
G6 = TailedGraph(3, ((0, 1), (0, 2)), ((0, 1),))
G7 = TailedGraph(3, ((0, 1), (0, 2), (1, 2)), ((0, 1),))

FIXTURES = {"G1": G1, "G2": G2, "G3": G3, "G4": G4, "G5": G5, "G6": G6, "G7": G7}


def random_tailed_graph(rng: np.random.Generator, max_vertices: int = 8, max_tails: int = 5,
                        edge_prob: float = 0.35) -> TailedGraph:
    """Connected simple graph with between 1 and ``max_tails`` tails."""
    n = int(rng.integers(1, max_vertices + 1))
    edges = set()
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.add((u, v))
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < edge_prob:
                edges.add((u, v))
    n_tails = int(rng.integers(1, max_tails + 1))
    counts: dict[int, int] = {}
    for _ in range(n_tails):
        v = int(rng.integers(0, n))
        counts[v] = counts.get(v, 0) + 1
    return TailedGraph(n, tuple(sorted(edges)), tuple(counts.items()))


def random_corpus(seed: int = 0, count: int = 50, **kwargs) -> list[TailedGraph]:
    rng = np.random.default_rng(seed)
    return [random_tailed_graph(rng, **kwargs) for _ in range(count)]


def random_momenta(rng: np.random.Generator, count: int, margin: float = 1e-3) -> np.ndarray:
    """Unit-circle points ``e^{ik}`` with ``k`` in ``(-pi, pi)`` kept ``margin`` away from 0 and +-pi."""
    k = rng.uniform(margin, np.pi - margin, size=count)
    sign = rng.choice([-1.0, 1.0], size=count)
    return np.exp(1j * sign * k)
