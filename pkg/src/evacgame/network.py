"""Social network construction, IO, and degree-based ranking."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping

import networkx as nx
import numpy as np

from . import rng

__all__ = [
    "ConfigurationError",
    "EdgeListError",
    "Graph",
    "Order",
    "DegreeRank",
    "PAPER_HISTOGRAM",
    "generate_small_world",
    "generate_from_histogram",
    "load_edge_list",
    "save_edge_list",
    "degree_rank",
    "degree_histogram",
]


class ConfigurationError(ValueError):
    """Invalid construction parameters or unrealizable degree sequence."""


class EdgeListError(ValueError):
    """Malformed edge-list file; message carries the offending line number."""


# Degree -> node count of the 5000-node network whose cumulative degree-class
# fractions match the published prioritisation thresholds (0.04%, 0.42%,
# 3.78%, 19.26%, 56.98%, 98.2%, 98.8% from the top; 1.2%, 1.8%, 43.02%,
# 80.74%, 96.22%, 99.58%, 99.96% from the bottom).
PAPER_HISTOGRAM: dict[int, int] = {
    9: 2,
    8: 19,
    7: 168,
    6: 774,
    5: 1886,
    4: 2061,
    3: 30,
    2: 60,
}


class Graph:
    """Immutable undirected simple graph in CSR form.

    Nodes are 0..node_count-1. Neighbor lists are sorted, symmetric, contain
    no self-loops or duplicates, and every node has degree >= 1.
    """

    __slots__ = ("node_count", "indptr", "indices")

    def __init__(self, node_count: int, edges: Iterable[tuple[int, int]]):
        edges = np.asarray(list(edges), dtype=np.int64)
        if node_count <= 0:
            raise ConfigurationError("node_count must be positive")
        if edges.size == 0:
            raise ConfigurationError("graph must have at least one edge")
        if edges.min() < 0 or edges.max() >= node_count:
            raise ConfigurationError("edge endpoint out of range")
        if (edges[:, 0] == edges[:, 1]).any():
            raise ConfigurationError("self-loops are not allowed")
        canon = np.sort(edges, axis=1)
        if len(np.unique(canon, axis=0)) != len(canon):
            raise ConfigurationError("duplicate edges are not allowed")

        both = np.concatenate([canon, canon[:, ::-1]])
        order = np.lexsort((both[:, 1], both[:, 0]))
        both = both[order]
        self.node_count = node_count
        self.indices = np.ascontiguousarray(both[:, 1])
        self.indptr = np.zeros(node_count + 1, dtype=np.int64)
        np.add.at(self.indptr, both[:, 0] + 1, 1)
        np.cumsum(self.indptr, out=self.indptr)
        if (self.degrees < 1).any():
            raise ConfigurationError("isolated node (degree 0)")

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    @property
    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(i).tolist() for i in range(self.node_count)]

    def edges(self) -> list[tuple[int, int]]:
        """Canonical (i < j) edge list, sorted."""
        out = []
        for i in range(self.node_count):
            for j in self.neighbors(i):
                if i < j:
                    out.append((i, int(j)))
        return out

    def neighbor_matrix(self) -> np.ndarray:
        """Padded (node_count, max_degree) neighbor array for vector sampling."""
        deg = self.degrees
        mat = np.zeros((self.node_count, int(deg.max())), dtype=np.int64)
        for i in range(self.node_count):
            mat[i, : deg[i]] = self.neighbors(i)
        return mat

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.node_count == other.node_count
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __repr__(self) -> str:
        return f"Graph(n={self.node_count}, m={self.edge_count})"


class Order(Enum):
    HIGHEST_FIRST = "highest"
    LOWEST_FIRST = "lowest"


@dataclass(frozen=True)
class DegreeRank:
    """Nodes ranked by degree, with cumulative degree-class boundaries.

    ``ranked_nodes`` is a permutation of node ids; ties within a degree class
    are broken by a seeded shuffle (the seed is part of run metadata).
    ``cumulative_thresholds`` gives, for each degree class in rank order, the
    exact fraction of the population covered once that class is fully
    included; the last entry is 1.
    """

    order: Order
    ranked_nodes: np.ndarray
    cumulative_thresholds: tuple[tuple[int, Fraction], ...]
    seed: int = 0

    @property
    def node_count(self) -> int:
        return len(self.ranked_nodes)

    def class_counts(self) -> list[tuple[int, int]]:
        """(degree, population) per class, in rank order."""
        out = []
        prev = Fraction(0)
        for degree, cum in self.cumulative_thresholds:
            out.append((degree, int((cum - prev) * self.node_count)))
            prev = cum
        return out


def degree_histogram(graph: Graph) -> dict[int, int]:
    degs, counts = np.unique(graph.degrees, return_counts=True)
    return {int(d): int(c) for d, c in zip(degs, counts)}


def generate_small_world(
    n: int, k: int, rewire_prob: float, seed: int
) -> Graph:
    """Connected Watts-Strogatz ring lattice with rewiring."""
    if not (n > k >= 2):
        raise ConfigurationError(f"require n > k >= 2, got n={n}, k={k}")
    if not (0.0 <= rewire_prob <= 1.0):
        raise ConfigurationError(f"rewire_prob must be in [0, 1], got {rewire_prob}")
    gen = stream_py_random(seed, "small-world")
    g = nx.connected_watts_strogatz_graph(n, k if k % 2 == 0 else k + 1, rewire_prob, tries=200, seed=gen)
    return Graph(n, g.edges())


def stream_py_random(seed: int, purpose: str):
    """Stdlib Random seeded from a derived stream key (for networkx)."""
    import random

    return random.Random(rng.derive_key(seed, purpose))


def _validate_histogram(hist: Mapping[int, int]) -> None:
    if not hist:
        raise ConfigurationError("empty histogram")
    n = sum(hist.values())
    for d, c in hist.items():
        if d < 1 or c < 0:
            raise ConfigurationError(f"invalid histogram entry {d}: {c}")
        if d >= n:
            raise ConfigurationError(f"degree {d} too large for {n} nodes")
    if sum(d * c for d, c in hist.items()) % 2 != 0:
        raise ConfigurationError("degree sum is odd; sequence not realizable")


def generate_from_histogram(hist: Mapping[int, int], seed: int) -> Graph:
    """Configuration-model graph realizing the histogram exactly.

    Stubs are paired at random; self-loops and duplicate edges are repaired
    by degree-preserving double-edge swaps against randomly chosen good
    edges, bounded at 100 x edge_count attempts.
    """
    _validate_histogram(hist)
    degseq = []
    for d in sorted(hist, reverse=True):
        degseq.extend([d] * hist[d])
    n = len(degseq)
    gen = rng.stream(seed, "config-model")

    stubs = np.repeat(np.arange(n), degseq)
    gen.shuffle(stubs)
    pairs = stubs.reshape(-1, 2)

    edge_set: set[tuple[int, int]] = set()
    defects: list[tuple[int, int]] = []
    for u, v in pairs:
        u, v = int(u), int(v)
        key = (min(u, v), max(u, v))
        if u == v or key in edge_set:
            defects.append((u, v))
        else:
            edge_set.add(key)

    edges = list(edge_set)
    budget = 100 * len(pairs)
    while defects:
        if budget <= 0:
            raise ConfigurationError("configuration-model repair budget exhausted")
        budget -= 1
        u, v = defects.pop()
        x, y = edges[int(gen.integers(len(edges)))]
        # swap (u,v),(x,y) -> (u,x),(v,y); retry the defect if the swap would
        # introduce a new self-loop or duplicate
        e1 = (min(u, x), max(u, x))
        e2 = (min(v, y), max(v, y))
        if u == x or v == y or e1 in edge_set or e2 in edge_set or e1 == e2:
            defects.append((u, v))
            continue
        edge_set.remove((min(x, y), max(x, y)))
        edges[edges.index((min(x, y), max(x, y)))] = e1
        edge_set.add(e1)
        edge_set.add(e2)
        edges.append(e2)
    return Graph(n, sorted(edge_set))


def save_edge_list(graph: Graph, path) -> None:
    with open(path, "w") as fh:
        for i, j in graph.edges():
            fh.write(f"{i} {j}\n")


def load_edge_list(path) -> Graph:
    edges = []
    max_id = -1
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 2:
                raise EdgeListError(f"{path}:{lineno}: expected 'i j', got {line.strip()!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListError(f"{path}:{lineno}: non-integer node id") from None
            if i < 0 or j < 0:
                raise EdgeListError(f"{path}:{lineno}: negative node id")
            if i == j:
                raise EdgeListError(f"{path}:{lineno}: self-loop {i} {j}")
            edges.append((i, j))
            max_id = max(max_id, i, j)
    if not edges:
        raise EdgeListError(f"{path}: no edges")
    return Graph(max_id + 1, edges)


def degree_rank(graph: Graph, order: Order, seed: int = 0) -> DegreeRank:
    """Rank nodes by degree; equal-degree ties broken by a seeded shuffle."""
    degrees = graph.degrees
    classes = sorted(set(degrees.tolist()), reverse=(order is Order.HIGHEST_FIRST))
    ranked = []
    thresholds = []
    covered = 0
    for d in classes:
        members = np.flatnonzero(degrees == d)
        members = members[rng.stream(seed, "rank-ties", order.value, d).permutation(len(members))]
        ranked.append(members)
        covered += len(members)
        thresholds.append((d, Fraction(covered, graph.node_count)))
    return DegreeRank(
        order=order,
        ranked_nodes=np.concatenate(ranked),
        cumulative_thresholds=tuple(thresholds),
        seed=seed,
    )
